//! Truncated bivariate Taylor series ("jets") and the two ways of getting
//! physical derivatives from parametric ones: pulled-back operators built by
//! jet algebra, and the inverse-function chain rule.

use crate::geometry::GeomJet;
use std::ops::{Add, Mul, Neg, Sub};

fn tri(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Truncated Taylor series of order `m` in two variables at a point.
/// Coefficient (a, b) multiplies δ1^a δ2^b / 1 (not a derivative).
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    m: usize,
    c: Vec<f64>,
}

impl Jet2 {
    pub fn len_for(m: usize) -> usize {
        (m + 1) * (m + 2) / 2
    }

    pub fn zeros(m: usize) -> Jet2 {
        Jet2 { m, c: vec![0.0; Self::len_for(m)] }
    }

    pub fn constant(m: usize, v: f64) -> Jet2 {
        let mut j = Self::zeros(m);
        j.c[0] = v;
        j
    }

    /// The coordinate function ξ_i (i = 0, 1) with value `v0` at the point.
    pub fn var(m: usize, i: usize, v0: f64) -> Jet2 {
        let mut j = Self::constant(m, v0);
        if m > 0 {
            j.c[if i == 0 { tri(1, 0) } else { tri(0, 1) }] = 1.0;
        }
        j
    }

    /// From partial derivatives ∂^{(d1,d2)}, d1 + d2 <= m.
    pub fn from_derivs(m: usize, f: impl Fn(usize, usize) -> f64) -> Jet2 {
        let mut j = Self::zeros(m);
        for d in 0..=m {
            for b in 0..=d {
                let a = d - b;
                j.c[tri(a, b)] = f(a, b) / (fact(a) * fact(b));
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn taylor(&self, a: usize, b: usize) -> f64 {
        if a + b > self.m {
            0.0
        } else {
            self.c[tri(a, b)]
        }
    }

    pub fn deriv(&self, d1: usize, d2: usize) -> f64 {
        self.taylor(d1, d2) * fact(d1) * fact(d2)
    }

    pub fn truncate(&self, m: usize) -> Jet2 {
        let m = m.min(self.m);
        Jet2 { m, c: self.c[..Self::len_for(m)].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 { m: self.m, c: self.c.iter().map(|x| x * s).collect() }
    }

    /// ∂/∂ξ_i; the result has order m − 1.
    pub fn diff(&self, i: usize) -> Jet2 {
        assert!(self.m > 0, "cannot differentiate an order-0 jet");
        let m = self.m - 1;
        let mut j = Self::zeros(m);
        for d in 0..=m {
            for b in 0..=d {
                let a = d - b;
                j.c[tri(a, b)] =
                    if i == 0 { (a + 1) as f64 * self.c[tri(a + 1, b)] } else { (b + 1) as f64 * self.c[tri(a, b + 1)] };
            }
        }
        j
    }

    pub fn mul(&self, o: &Jet2) -> Jet2 {
        let m = self.m.min(o.m);
        let mut j = Self::zeros(m);
        for d1 in 0..=m {
            for b1 in 0..=d1 {
                let x = self.c[tri(d1 - b1, b1)];
                if x == 0.0 {
                    continue;
                }
                for d2 in 0..=m - d1 {
                    for b2 in 0..=d2 {
                        j.c[tri(d1 - b1 + d2 - b2, b1 + b2)] += x * o.c[tri(d2 - b2, b2)];
                    }
                }
            }
        }
        j
    }

    /// 1 / self, requires a nonzero value.
    pub fn recip(&self) -> Jet2 {
        let v = self.c[0];
        assert!(v != 0.0, "reciprocal of a jet with zero value");
        // 1/(v + r) = (1/v) Σ (−r/v)^n
        let mut r = self.scale(-1.0 / v);
        r.c[0] = 0.0;
        let mut acc = Self::constant(self.m, 1.0);
        let mut pw = Self::constant(self.m, 1.0);
        for _ in 0..self.m {
            pw = pw.mul(&r);
            acc = &acc + &pw;
        }
        acc.scale(1.0 / v)
    }

    pub fn div(&self, o: &Jet2) -> Jet2 {
        self.mul(&o.recip())
    }

    /// self(g1, g2) where g1, g2 have zero value (series in new variables).
    pub fn compose(&self, g: &[Jet2; 2]) -> Jet2 {
        let m = g[0].m.min(g[1].m);
        let mut p1 = vec![Self::constant(m, 1.0)];
        let mut p2 = vec![Self::constant(m, 1.0)];
        for i in 1..=self.m.min(m) {
            p1.push(p1[i - 1].mul(&g[0]));
            p2.push(p2[i - 1].mul(&g[1]));
        }
        let mut out = Self::zeros(m);
        for d in 0..=self.m.min(m) {
            for b in 0..=d {
                let x = self.c[tri(d - b, b)];
                if x != 0.0 {
                    out = &out + &p1[d - b].mul(&p2[b]).scale(x);
                }
            }
        }
        out
    }
}

impl<'a> Add for &'a Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        let m = self.m.min(o.m);
        Jet2 { m, c: (0..Jet2::len_for(m)).map(|i| self.c[i] + o.c[i]).collect() }
    }
}

impl<'a> Sub for &'a Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        let m = self.m.min(o.m);
        Jet2 { m, c: (0..Jet2::len_for(m)).map(|i| self.c[i] - o.c[i]).collect() }
    }
}

impl<'a> Mul for &'a Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        Jet2::mul(self, o)
    }
}

impl<'a> Neg for &'a Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Geometry jets split into components x and y.
pub fn geometry_jets(g: &GeomJet, m: usize) -> [Jet2; 2] {
    assert!(m <= g.order);
    [Jet2::from_derivs(m, |a, b| g.get(a, b)[0]), Jet2::from_derivs(m, |a, b| g.get(a, b)[1])]
}

/// Linear map from parametric to physical Taylor coefficients at one point,
/// obtained by composing with the inverse of the geometry map.
#[derive(Debug, Clone)]
pub struct InverseChain {
    m: usize,
    /// columns: image of each parametric Taylor monomial
    cols: Vec<Jet2>,
}

impl InverseChain {
    /// `g` must hold geometry derivatives up to order m.
    pub fn new(g: &GeomJet, m: usize) -> InverseChain {
        let [fx, fy] = geometry_jets(g, m);
        let j = [[fx.taylor(1, 0), fx.taylor(0, 1)], [fy.taylor(1, 0), fy.taylor(0, 1)]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        // P(η) = F(ξ0 + η) − F(ξ0)
        let mut p = [fx.clone(), fy.clone()];
        p[0].c[0] = 0.0;
        p[1].c[0] = 0.0;
        let d = [Jet2::var(m, 0, 0.0), Jet2::var(m, 1, 0.0)];
        let lin = |r: &[Jet2; 2]| -> [Jet2; 2] {
            [&r[0].scale(inv[0][0]) + &r[1].scale(inv[0][1]), &r[0].scale(inv[1][0]) + &r[1].scale(inv[1][1])]
        };
        let mut gi = lin(&d);
        for _ in 1..m {
            let pg = [p[0].compose(&gi), p[1].compose(&gi)];
            // residual δ − (P(G) − J G)
            let jg = [
                &gi[0].scale(j[0][0]) + &gi[1].scale(j[0][1]),
                &gi[0].scale(j[1][0]) + &gi[1].scale(j[1][1]),
            ];
            let r = [&d[0] - &(&pg[0] - &jg[0]), &d[1] - &(&pg[1] - &jg[1])];
            gi = lin(&r);
        }
        let mut cols = Vec::with_capacity(Jet2::len_for(m));
        for dd in 0..=m {
            for b in 0..=dd {
                let mut e = Jet2::zeros(m);
                e.c[tri(dd - b, b)] = 1.0;
                cols.push(e.compose(&gi));
            }
        }
        InverseChain { m, cols }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Physical jet of a function given its parametric jet.
    pub fn apply(&self, param: &Jet2) -> Jet2 {
        let mut out = Jet2::zeros(self.m);
        for (i, col) in self.cols.iter().enumerate() {
            let x = param.c[i];
            if x != 0.0 {
                for (o, c) in out.c.iter_mut().zip(&col.c) {
                    *o += x * c;
                }
            }
        }
        out
    }
}

/// Pulled-back diffusion data: N = |det J| J^{-1} J^{-T} and |det J|, as jets
/// of order m.
#[derive(Debug, Clone)]
pub struct Diffusion {
    pub n: [[Jet2; 2]; 2],
    pub absdet: Jet2,
}

impl Diffusion {
    /// `g` must hold geometry derivatives up to order m + 1.
    pub fn new(g: &GeomJet, m: usize) -> Diffusion {
        let [fx, fy] = geometry_jets(g, m + 1);
        let (x1, x2, y1, y2) = (fx.diff(0), fx.diff(1), fy.diff(0), fy.diff(1));
        let det = &(&x1 * &y2) - &(&x2 * &y1);
        let sign = if det.value() < 0.0 { -1.0 } else { 1.0 };
        let absdet = det.scale(sign);
        // adj(J) = [[y2, −x2], [−y1, x1]], N = adj adjᵀ / |det|
        let inv = absdet.recip();
        let n00 = &(&(&y2 * &y2) + &(&x2 * &x2)) * &inv;
        let n01 = &(-&(&(&y2 * &y1) + &(&x2 * &x1))) * &inv;
        let n11 = &(&(&y1 * &y1) + &(&x1 * &x1)) * &inv;
        Diffusion { n: [[n00, n01.clone()], [n01, n11]], absdet }
    }

    /// (1/|det|) ∇·(N ∇v) as a jet of order min(m, ord(v) − 2).
    pub fn laplace(&self, v: &Jet2) -> Jet2 {
        let grad = [v.diff(0), v.diff(1)];
        let mut div: Option<Jet2> = None;
        for a in 0..2 {
            let flux = &(&self.n[a][0] * &grad[0]) + &(&self.n[a][1] * &grad[1]);
            let d = flux.diff(a);
            div = Some(match div {
                None => d,
                Some(x) => &x + &d,
            });
        }
        let div = div.unwrap();
        div.div(&self.absdet.truncate(div.order()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_arithmetic() {
        let x = Jet2::var(4, 0, 0.5);
        let y = Jet2::var(4, 1, 2.0);
        let f = &(&x * &x) * &y; // x² y
        assert!((f.deriv(2, 1) - 2.0).abs() < 1e-14);
        assert!((f.deriv(1, 0) - 2.0 * 0.5 * 2.0).abs() < 1e-14);
        let r = f.recip().mul(&f);
        assert!((r.value() - 1.0).abs() < 1e-14);
        for d in 1..=4 {
            for b in 0..=d {
                assert!(r.taylor(d - b, b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_geometry_laplacians() {
        let mut g = GeomJet::zeros(5);
        g.vals[0] = [0.3, 0.4];
        g.vals[6] = [1.0, 0.0];
        g.vals[1] = [0.0, 1.0];
        let dif = Diffusion::new(&g, 3);
        // φ = ξ1⁴ at ξ1 = 0.3: Δ²φ = 24
        let v = Jet2::from_derivs(4, |a, b| match (a, b) {
            (0, 0) => 0.3f64.powi(4),
            (1, 0) => 4.0 * 0.3f64.powi(3),
            (2, 0) => 12.0 * 0.09,
            (3, 0) => 24.0 * 0.3,
            (4, 0) => 24.0,
            _ => 0.0,
        });
        let w = dif.laplace(&v);
        assert!((w.value() - 12.0 * 0.09).abs() < 1e-13);
        let bi = dif.laplace(&w);
        assert!((bi.value() - 24.0).abs() < 1e-12);
    }
}
