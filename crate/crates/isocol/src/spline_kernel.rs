//! Univariate and tensor-product B-spline spaces with open uniform knots.
//!
//! Knots are kept as integer numerators over `k+1`, so every exact operation
//! (Greville abscissae, blossoms, embeddings, truncation) can run in any
//! [`Field`], including exact rationals. Evaluation is done in floating point.

use crate::scalar::{Field, Real};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("invalid spline parameters p={p}, r={r}, k={k}: need 0 <= r < p")]
    Parameters { p: usize, r: usize, k: usize },
    #[error("point {0} outside [0,1]")]
    Domain(f64),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("derivative order {0} exceeds degree {1}")]
    Derivative(usize, usize),
    #[error("space S^({0},{1}) is not contained in S^({2},{3}) on the same mesh")]
    NotNested(usize, usize, usize, usize),
}

/// The space S_h^{p,r}([0,1]) on the uniform open knot vector with `k` inner knots.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSpace {
    p: usize,
    r: usize,
    k: usize,
    knots: Vec<f64>,
}

impl UnivariateSpace {
    pub fn new(p: usize, r: usize, k: usize) -> Result<Self, SplineError> {
        if r >= p {
            return Err(SplineError::Parameters { p, r, k });
        }
        let mut sp = UnivariateSpace { p, r, k, knots: Vec::new() };
        let m = k as f64 + 1.0;
        sp.knots = (0..sp.knot_count()).map(|i| sp.knot_numer(i) as f64 / m).collect();
        Ok(sp)
    }

    pub fn degree(&self) -> usize {
        self.p
    }
    pub fn regularity(&self) -> usize {
        self.r
    }
    pub fn inner_knots(&self) -> usize {
        self.k
    }
    pub fn elements(&self) -> usize {
        self.k + 1
    }
    pub fn mesh_size<T: Field>(&self) -> T {
        T::from_ratio(1, self.k as i64 + 1)
    }

    /// n_p = p + 1 + k (p - r)
    pub fn dim(&self) -> usize {
        self.p + 1 + self.k * (self.p - self.r)
    }

    pub fn knot_count(&self) -> usize {
        self.dim() + self.p + 1
    }

    /// Knot `i` as an integer multiple of h.
    pub fn knot_numer(&self, i: usize) -> i64 {
        let n = self.dim();
        if i <= self.p {
            0
        } else if i >= n {
            self.k as i64 + 1
        } else {
            1 + ((i - self.p - 1) / (self.p - self.r)) as i64
        }
    }

    pub fn knot<T: Field>(&self, i: usize) -> T {
        T::from_ratio(self.knot_numer(i), self.k as i64 + 1)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Greville abscissa (t_{j+1} + ... + t_{j+p}) / p, exact.
    pub fn greville<T: Field>(&self, j: usize) -> Result<T, SplineError> {
        if j >= self.dim() {
            return Err(SplineError::Index { index: j, dim: self.dim() });
        }
        let s: i64 = (j + 1..=j + self.p).map(|i| self.knot_numer(i)).sum();
        Ok(T::from_ratio(s, (self.p * (self.k + 1)) as i64))
    }

    /// Knot span index of element `e`.
    pub fn span_of_element(&self, e: usize) -> usize {
        self.p + e * (self.p - self.r)
    }

    /// Element containing `x`; points on inner knots belong to the element on their right.
    pub fn element_of(&self, x: f64) -> usize {
        let t = x * (self.k as f64 + 1.0);
        let rt = t.round();
        let e = if (t - rt).abs() < 1e-11 { rt } else { t.floor() };
        (e.max(0.0) as usize).min(self.k)
    }

    /// Index range [first, last] of basis functions supported on element `e`.
    pub fn active_range(&self, e: usize) -> (usize, usize) {
        let mu = self.span_of_element(e);
        (mu - self.p, mu)
    }

    /// Element range [first, last] covering the support of basis function `j`.
    pub fn support_elements(&self, j: usize) -> (usize, usize) {
        let a = self.knot_numer(j) as usize;
        let b = self.knot_numer(j + self.p + 1) as usize;
        (a, b.max(a + 1) - 1)
    }

    /// Derivatives 0..=nd of the p+1 basis functions active at `x`.
    /// Returns the first active index; `out[d * (p+1) + i]` holds N_{first+i}^{(d)}(x).
    pub fn eval_local<T: Real>(&self, x: T, nd: usize, out: &mut [T]) -> usize {
        let p = self.p;
        let e = self.element_of(x.as_f64());
        let mu = self.span_of_element(e);
        let kn = |i: usize| T::of(self.knots[i]);
        let nd_eff = nd.min(p);
        // NURBS book A2.3
        let mut ndu = vec![T::zero(); (p + 1) * (p + 1)];
        let mut left = vec![T::zero(); p + 1];
        let mut right = vec![T::zero(); p + 1];
        ndu[0] = T::one();
        for j in 1..=p {
            left[j] = x - kn(mu + 1 - j);
            right[j] = kn(mu + j) - x;
            let mut saved = T::zero();
            for r in 0..j {
                ndu[j * (p + 1) + r] = right[r + 1] + left[j - r];
                let temp = ndu[r * (p + 1) + j - 1] / ndu[j * (p + 1) + r];
                ndu[r * (p + 1) + j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j * (p + 1) + j] = saved;
        }
        for v in out.iter_mut().take((nd + 1) * (p + 1)) {
            *v = T::zero();
        }
        for j in 0..=p {
            out[j] = ndu[j * (p + 1) + p];
        }
        let mut a = vec![T::zero(); 2 * (p + 1)];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0] = T::one();
            for kk in 1..=nd_eff {
                let mut d = T::zero();
                let rk = r as isize - kk as isize;
                let pk = p - kk;
                if r >= kk {
                    let v = a[s1 * (p + 1)] / ndu[(pk + 1) * (p + 1) + rk as usize];
                    a[s2 * (p + 1)] = v;
                    d = v * ndu[rk as usize * (p + 1) + pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize { kk - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    let v = (a[s1 * (p + 1) + j] - a[s1 * (p + 1) + j - 1])
                        / ndu[(pk + 1) * (p + 1) + idx];
                    a[s2 * (p + 1) + j] = v;
                    d = d + v * ndu[idx * (p + 1) + pk];
                }
                if r <= pk {
                    let v = -a[s1 * (p + 1) + kk - 1] / ndu[(pk + 1) * (p + 1) + r];
                    a[s2 * (p + 1) + kk] = v;
                    d = d + v * ndu[r * (p + 1) + pk];
                }
                out[kk * (p + 1) + r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut fac = T::of(p as f64);
        for kk in 1..=nd_eff {
            for j in 0..=p {
                out[kk * (p + 1) + j] = out[kk * (p + 1) + j] * fac;
            }
            fac = fac * T::of((p - kk) as f64);
        }
        mu - p
    }

    /// Dense table `[d][j]` of N_j^{(d)}(x) for all j.
    pub fn eval_basis<T: Real>(&self, x: T, max_deriv: usize) -> Result<Vec<Vec<T>>, SplineError> {
        let xf = x.as_f64();
        if !(0.0..=1.0).contains(&xf) {
            return Err(SplineError::Domain(xf));
        }
        if max_deriv > self.p {
            return Err(SplineError::Derivative(max_deriv, self.p));
        }
        let p = self.p;
        let mut loc = vec![T::zero(); (max_deriv + 1) * (p + 1)];
        let first = self.eval_local(x, max_deriv, &mut loc);
        let mut rows = vec![vec![T::zero(); self.dim()]; max_deriv + 1];
        for (d, row) in rows.iter_mut().enumerate() {
            for i in 0..=p {
                row[first + i] = loc[d * (p + 1) + i];
            }
        }
        Ok(rows)
    }

    /// Value and derivatives of the spline with coefficients `c` at `x`.
    pub fn eval_spline(&self, c: &[f64], x: f64, nd: usize) -> Vec<f64> {
        let p = self.p;
        let mut loc = vec![0.0; (nd + 1) * (p + 1)];
        let first = self.eval_local(x, nd, &mut loc);
        (0..=nd)
            .map(|d| (0..=p).map(|i| c[first + i] * loc[d * (p + 1) + i]).sum())
            .collect()
    }

    fn nested_in(&self, other: &UnivariateSpace) -> bool {
        self.k == other.k && self.p <= other.p && self.r >= other.r
    }

    /// Blossom of the polynomial piece on knot span `mu` of the spline with
    /// coefficients `c` (only c[mu-p..=mu] are read), at arguments `u`.
    pub fn blossom_span<T: Field>(&self, c: &[T], mu: usize, u: &[T]) -> T {
        let p = self.p;
        let mut d: Vec<T> = (0..=p).map(|i| c[mu - p + i].clone()).collect();
        for (r, ur) in u.iter().enumerate().take(p) {
            let r = r + 1;
            for l in (r..=p).rev() {
                let gl = mu - p + l;
                let tl: T = self.knot(gl);
                let tr: T = self.knot(gl + p + 1 - r);
                let w = (ur.clone() - tl.clone()) / (tr - tl);
                d[l] = (T::one() - w.clone()) * d[l - 1].clone() + w * d[l].clone();
            }
        }
        d[p].clone()
    }

    /// Bernstein coefficients (degree p) of basis function `j` on element `e`.
    pub fn bezier_piece<T: Field>(&self, j: usize, e: usize) -> Vec<T> {
        let p = self.p;
        let mu = self.span_of_element(e);
        if j + p < mu || j > mu {
            return vec![T::zero(); p + 1];
        }
        let mut c = vec![T::zero(); self.dim()];
        c[j] = T::one();
        self.piece_of(&c, e)
    }

    /// Bernstein coefficients of the spline with coefficients `c` on element `e`.
    pub fn piece_of<T: Field>(&self, c: &[T], e: usize) -> Vec<T> {
        let p = self.p;
        let mu = self.span_of_element(e);
        let a: T = T::from_ratio(e as i64, self.k as i64 + 1);
        let b: T = T::from_ratio(e as i64 + 1, self.k as i64 + 1);
        (0..=p)
            .map(|i| {
                let mut u = vec![a.clone(); p - i];
                u.extend(std::iter::repeat(b.clone()).take(i));
                self.blossom_span(c, mu, &u)
            })
            .collect()
    }

    /// Spline coefficients of the piecewise polynomial given by Bernstein
    /// pieces of degree p (one per element). The pieces must already have
    /// the smoothness of this space at the inner knots.
    pub fn from_pieces<T: Field>(&self, pieces: &[Vec<T>]) -> Vec<T> {
        let p = self.p;
        (0..self.dim())
            .map(|j| {
                let (e0, e1) = self.support_elements(j);
                let e = (e0 + e1) / 2;
                // knots in the local coordinate of element e
                let u: Vec<T> = (j + 1..=j + p)
                    .map(|i| T::from_int(self.knot_numer(i) - e as i64))
                    .collect();
                bernstein::blossom_local(&pieces[e], &u)
            })
            .collect()
    }

    /// Like [`Self::from_pieces`] for a spline vanishing outside the elements
    /// `e0 .. e0 + pieces.len()`; `pieces[i]` lives on element `e0 + i`.
    pub fn from_local_pieces<T: Field>(&self, e0: usize, pieces: &[Vec<T>]) -> SplineCoeffs1D<T> {
        let p = self.p;
        let e1 = e0 + pieces.len();
        let mut dense = vec![T::zero(); self.dim()];
        let (j0, _) = self.active_range(e0);
        let (_, j1) = self.active_range(e1 - 1);
        for (j, d) in dense.iter_mut().enumerate().take(j1 + 1).skip(j0) {
            let (a, b) = self.support_elements(j);
            let e = (a + b) / 2;
            if e < e0 || e >= e1 {
                continue;
            }
            let u: Vec<T> = (j + 1..=j + p).map(|i| T::from_int(self.knot_numer(i) - e as i64)).collect();
            *d = bernstein::blossom_local(&pieces[e - e0], &u);
        }
        SplineCoeffs1D::from_dense(&dense)
    }

    /// Exact coefficients in `to` of the spline `c` of this space.
    pub fn embed<T: Field>(&self, to: &UnivariateSpace, c: &[T]) -> Result<Vec<T>, SplineError> {
        if !self.nested_in(to) {
            return Err(SplineError::NotNested(self.p, self.r, to.p, to.r));
        }
        if c.len() != self.dim() {
            return Err(SplineError::Index { index: c.len(), dim: self.dim() });
        }
        if self == to {
            return Ok(c.to_vec());
        }
        let pieces: Vec<Vec<T>> = (0..self.elements())
            .map(|e| bernstein::elevate(&self.piece_of(c, e), to.p))
            .collect();
        Ok(to.from_pieces(&pieces))
    }

    /// Coefficients in `to` of the truncated basis function N_i of this space.
    pub fn truncate<T: Field>(
        &self,
        i: usize,
        to: &UnivariateSpace,
        left: bool,
        right: bool,
    ) -> Result<Vec<T>, SplineError> {
        if i >= self.dim() {
            return Err(SplineError::Index { index: i, dim: self.dim() });
        }
        let mut unit = vec![T::zero(); self.dim()];
        unit[i] = T::one();
        let mut mu = self.embed(to, &unit)?;
        let s = to.r;
        let n = mu.len();
        if left {
            for m in mu.iter_mut().take(s + 1) {
                *m = T::zero();
            }
        }
        if right {
            for m in mu.iter_mut().skip(n - s - 1) {
                *m = T::zero();
            }
        }
        Ok(mu)
    }
}

/// Sparse coefficient vector on a contiguous index window.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoeffs1D<T> {
    pub first: usize,
    pub vals: Vec<T>,
}

impl<T: Field> SplineCoeffs1D<T> {
    /// Trims leading and trailing exact zeros of a dense vector.
    pub fn from_dense(c: &[T]) -> Self {
        let nz = |v: &T| !v.is_zero();
        match c.iter().position(nz) {
            None => SplineCoeffs1D { first: 0, vals: Vec::new() },
            Some(a) => {
                let b = c.iter().rposition(nz).unwrap();
                SplineCoeffs1D { first: a, vals: c[a..=b].to_vec() }
            }
        }
    }

    pub fn get(&self, j: usize) -> T {
        if j < self.first || j >= self.first + self.vals.len() {
            T::zero()
        } else {
            self.vals[j - self.first].clone()
        }
    }

    pub fn last(&self) -> usize {
        self.first + self.vals.len().saturating_sub(1)
    }

    pub fn to_dense(&self, n: usize) -> Vec<T> {
        (0..n).map(|j| self.get(j)).collect()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> SplineCoeffs1D<U> {
        SplineCoeffs1D { first: self.first, vals: self.vals.iter().map(f).collect() }
    }
}

/// Tensor-product space S^{p,r} ⊗ S^{p,r}.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace {
    pub space_u: UnivariateSpace,
    pub space_v: UnivariateSpace,
}

impl TensorSpace {
    pub fn new(p: usize, r: usize, k: usize) -> Result<Self, SplineError> {
        let s = UnivariateSpace::new(p, r, k)?;
        Ok(TensorSpace { space_u: s.clone(), space_v: s })
    }

    pub fn dim(&self) -> usize {
        self.space_u.dim() * self.space_v.dim()
    }

    /// Row-major index of N_{j1,j2}.
    pub fn index(&self, j1: usize, j2: usize) -> usize {
        j1 * self.space_v.dim() + j2
    }

    /// Derivatives `[(d1,d2)] -> value` up to order `nd` in each direction
    /// of the tensor spline with row-major coefficients `c` (c[j1][j2]).
    pub fn eval_spline(&self, c: &[f64], x: (f64, f64), nd: usize) -> Vec<Vec<f64>> {
        let (pu, pv) = (self.space_u.degree(), self.space_v.degree());
        let mut bu = vec![0.0; (nd + 1) * (pu + 1)];
        let mut bv = vec![0.0; (nd + 1) * (pv + 1)];
        let fu = self.space_u.eval_local(x.0, nd, &mut bu);
        let fv = self.space_v.eval_local(x.1, nd, &mut bv);
        let nv = self.space_v.dim();
        let mut out = vec![vec![0.0; nd + 1]; nd + 1];
        for (d1, row) in out.iter_mut().enumerate() {
            for (d2, o) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for a in 0..=pu {
                    let wa = bu[d1 * (pu + 1) + a];
                    if wa == 0.0 {
                        continue;
                    }
                    for b in 0..=pv {
                        acc += wa * bv[d2 * (pv + 1) + b] * c[(fu + a) * nv + fv + b];
                    }
                }
                *o = acc;
            }
        }
        out
    }
}

/// Row-major sparse coefficients in a tensor space, as `((j1, j2), value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoeffs2D {
    pub entries: Vec<((usize, usize), f64)>,
}

/// Bernstein-form utilities on a single element.
pub mod bernstein {
    use crate::scalar::{binom_in, Field};

    /// Blossom of a Bernstein polynomial on [0,1] at local arguments `u`.
    pub fn blossom_local<T: Field>(b: &[T], u: &[T]) -> T {
        let p = b.len() - 1;
        let mut d = b.to_vec();
        for (r, ur) in u.iter().enumerate().take(p) {
            for i in 0..p - r {
                d[i] = (T::one() - ur.clone()) * d[i].clone() + ur.clone() * d[i + 1].clone();
            }
        }
        d[0].clone()
    }

    pub fn eval<T: Field>(b: &[T], x: T) -> T {
        let u = vec![x; b.len() - 1];
        blossom_local(b, &u)
    }

    /// Degree elevation to degree `q`.
    pub fn elevate<T: Field>(b: &[T], q: usize) -> Vec<T> {
        let p = b.len() - 1;
        assert!(q >= p);
        if q == p {
            return b.to_vec();
        }
        let m = q - p;
        (0..=q)
            .map(|i| {
                let lo = i.saturating_sub(m);
                let hi = i.min(p);
                let mut acc = T::zero();
                for j in lo..=hi {
                    acc = acc + binom_in::<T>(p, j) * binom_in::<T>(m, i - j) * b[j].clone();
                }
                acc / binom_in::<T>(q, i)
            })
            .collect()
    }

    pub fn multiply<T: Field>(a: &[T], b: &[T]) -> Vec<T> {
        let (p, q) = (a.len() - 1, b.len() - 1);
        let mut out = vec![T::zero(); p + q + 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = out[i + j].clone()
                    + binom_in::<T>(p, i) * binom_in::<T>(q, j) * ai.clone() * bj.clone();
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.clone() / binom_in::<T>(p + q, i);
        }
        out
    }

    /// Derivative with respect to the global variable on an element of width `width`.
    pub fn derivative<T: Field>(b: &[T], width: T) -> Vec<T> {
        let p = b.len() - 1;
        if p == 0 {
            return vec![T::zero()];
        }
        let f = T::from_int(p as i64) / width;
        (0..p).map(|i| f.clone() * (b[i + 1].clone() - b[i].clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn cox_de_boor(t: &[f64], j: usize, p: usize, x: f64) -> f64 {
        if p == 0 {
            let last = t[t.len() - 1];
            return if (t[j] <= x && x < t[j + 1]) || (x == last && t[j] < x && t[j + 1] == last) {
                1.0
            } else {
                0.0
            };
        }
        let mut v = 0.0;
        if t[j + p] > t[j] {
            v += (x - t[j]) / (t[j + p] - t[j]) * cox_de_boor(t, j, p - 1, x);
        }
        if t[j + p + 1] > t[j + 1] {
            v += (t[j + p + 1] - x) / (t[j + p + 1] - t[j + 1]) * cox_de_boor(t, j + 1, p - 1, x);
        }
        v
    }

    #[test]
    fn make_space_examples() {
        let s = UnivariateSpace::new(3, 2, 8).unwrap();
        assert_eq!(s.dim(), 12);
        let kn: Vec<i64> = (0..s.knot_count()).map(|i| s.knot_numer(i)).collect();
        assert_eq!(kn, vec![0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 9]);
        assert_eq!(UnivariateSpace::new(5, 2, 8).unwrap().dim(), 30);
        assert_eq!(UnivariateSpace::new(4, 3, 0).unwrap().dim(), 5);
        assert!(UnivariateSpace::new(3, 3, 2).is_err());
    }

    #[test]
    fn greville_examples() {
        let s = UnivariateSpace::new(3, 2, 8).unwrap();
        assert_eq!(s.greville::<Rational64>(0).unwrap(), Rational64::new(0, 1));
        assert_eq!(s.greville::<Rational64>(11).unwrap(), Rational64::new(1, 1));
        assert_eq!(s.greville::<Rational64>(1).unwrap(), Rational64::new(1, 27));
        let s5 = UnivariateSpace::new(5, 2, 8).unwrap();
        assert_eq!(s5.greville::<Rational64>(3).unwrap(), Rational64::new(3, 45));
        assert!(s.greville::<f64>(12).is_err());
    }

    #[test]
    fn endpoint_values() {
        let s = UnivariateSpace::new(5, 2, 6).unwrap();
        let t = s.eval_basis(0.0f64, 0).unwrap();
        assert_eq!(t[0][0], 1.0);
        assert!(t[0][1..].iter().all(|v| *v == 0.0));
        let t = s.eval_basis(1.0f64, 0).unwrap();
        assert!((t[0][s.dim() - 1] - 1.0).abs() < 1e-15);
        assert!(s.eval_basis(1.5f64, 0).is_err());
    }

    #[test]
    fn de_boor_oracle() {
        let s = UnivariateSpace::new(3, 2, 8).unwrap();
        let t = s.eval_basis(0.25f64, 0).unwrap();
        for j in 0..s.dim() {
            assert!((t[0][j] - cox_de_boor(s.knots(), j, 3, 0.25)).abs() < 1e-14);
        }
    }

    #[test]
    fn embed_matches_evaluation() {
        let a = UnivariateSpace::new(3, 2, 8).unwrap();
        let b = UnivariateSpace::new(5, 2, 8).unwrap();
        let mut c = vec![0.0; a.dim()];
        c[4] = 1.0;
        let mu = a.embed(&b, &c).unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let va = a.eval_spline(&c, x, 0)[0];
            let vb = b.eval_spline(&mu, x, 0)[0];
            assert!((va - vb).abs() < 1e-12);
        }
        let ones = vec![Rational64::new(1, 1); a.dim()];
        let e = a.embed(&b, &ones).unwrap();
        assert!(e.iter().all(|v| *v == Rational64::new(1, 1)));
        assert_eq!(a.embed(&a, &ones).unwrap(), ones);
        assert!(b.embed(&a, &vec![0.0; b.dim()]).is_err());
    }

    #[test]
    fn truncation_examples() {
        let a = UnivariateSpace::new(3, 2, 8).unwrap();
        let b = UnivariateSpace::new(5, 2, 8).unwrap();
        let t: Vec<Rational64> = a.truncate(1, &b, true, false).unwrap();
        assert!(t[..3].iter().all(|v| *v == Rational64::new(0, 1)));
        assert!(t.iter().all(|v| *v >= Rational64::new(0, 1)));
        // knot insertion oracle: N_1 in S^{5,2} before masking reproduces the function
        let full: Vec<Rational64> = a.truncate(1, &b, false, false).unwrap();
        assert!(full[3] > Rational64::new(0, 1));
        let t0: Vec<f64> = a.truncate(0, &b, true, false).unwrap();
        let d = b.eval_spline(&t0, 0.0, 2);
        assert!(d.iter().all(|v| v.abs() < 1e-12));
        let mid: Vec<f64> = a.truncate(4, &b, true, true).unwrap();
        let mut unit = vec![0.0; a.dim()];
        unit[4] = 1.0;
        assert_eq!(mid, a.embed(&b, &unit).unwrap());
    }

    #[test]
    fn bernstein_algebra() {
        let a = vec![1.0, 2.0, 0.5];
        let b = vec![0.0, 1.0];
        let m = bernstein::multiply(&a, &b);
        let e = bernstein::elevate(&a, 4);
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let va = bernstein::eval(&a, x);
            assert!((bernstein::eval(&m, x) - va * x).abs() < 1e-14);
            assert!((bernstein::eval(&e, x) - va).abs() < 1e-14);
        }
        let d = bernstein::derivative(&a, 0.5);
        // derivative of a on [0,1] mapped from width 0.5: 2*p*(b_{i+1}-b_i)
        assert_eq!(d, vec![4.0, -6.0]);
    }
}
