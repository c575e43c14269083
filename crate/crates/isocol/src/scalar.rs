//! Scalar abstractions shared by the whole crate.
//!
//! [`Field`] is the minimal set of operations needed by the exact spline
//! kernel (blossoms, Bernstein products, embeddings), so the kernel runs on
//! floats as well as on exact rationals. [`Real`] adds what the numerical
//! parts (roots, Jacobian inverses, least squares) need.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use std::fmt::Debug;
use std::ops::Neg;

pub trait Field: Clone + Debug + PartialOrd + Num + Neg<Output = Self> {
    fn from_ratio(n: i64, d: i64) -> Self;
    fn as_f64(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Field for f64 {
    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn from_ratio(n: i64, d: i64) -> Self {
        (n as f64 / d as f64) as f32
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Field for Rational64 {
    fn from_ratio(n: i64, d: i64) -> Self {
        Rational64::new(n, d)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Field for BigRational {
    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Floating point scalars used by geometry, assembly and the solver.
pub trait Real: Field + Float + FromPrimitive + Copy + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).unwrap()
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Binomial coefficient as f64 (small arguments only).
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Binomial coefficient in an arbitrary field.
pub fn binom_in<T: Field>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let mut num: i64 = 1;
    let mut den: i64 = 1;
    for i in 0..k as i64 {
        num *= n as i64 - i;
        den *= i + 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    T::from_ratio(num, den)
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..12 {
            for k in 0..=n {
                let b: Rational64 = binom_in(n, k);
                assert_eq!(Field::as_f64(&b), binom(n, k));
            }
        }
    }

    #[test]
    fn ratio_conversion() {
        assert_eq!(<f64 as Field>::from_ratio(1, 4), 0.25);
        assert_eq!(Rational64::from_ratio(2, 4), Rational64::new(1, 2));
        assert_eq!(Field::as_f64(&BigRational::from_ratio(3, 8)), 0.375);
    }
}
