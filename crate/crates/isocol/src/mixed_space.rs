//! The mixed-degree underlying space S_h^{(p1,p2),s}([0,1]^2): degree
//! p1 = s+1 away from inner edges, degree p2 = 2s+1 in a one-element strip
//! along them, glued by truncated B-splines.

use crate::spline_kernel::{SplineCoeffs1D, SplineError, UnivariateSpace};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixedError {
    #[error("regularity s={0} unsupported (use 2 or 4)")]
    Regularity(usize),
    #[error("k={k} too small for s={s} (need k >= {need})")]
    TooCoarse { s: usize, k: usize, need: usize },
    #[error("a patch without inner edges has no mixed-degree variant")]
    NoInnerEdge,
    #[error("valency-one corner {0:?} touches an inner edge")]
    BadCorner(Corner),
    #[error("point ({0}, {1}) outside the unit square")]
    Domain(f64, f64),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// xi1 = 0, parameterized by xi2
    Left,
    /// xi1 = 1
    Right,
    /// xi2 = 0, parameterized by xi1
    Bottom,
    /// xi2 = 1
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Point of the side at parameter t.
    pub fn point(self, t: f64) -> (f64, f64) {
        match self {
            Side::Left => (0.0, t),
            Side::Right => (1.0, t),
            Side::Bottom => (t, 0.0),
            Side::Top => (t, 1.0),
        }
    }

    /// Corners at parameter 0 and 1.
    pub fn corners(self) -> (Corner, Corner) {
        match self {
            Side::Left => (Corner::BL, Corner::TL),
            Side::Right => (Corner::BR, Corner::TR),
            Side::Bottom => (Corner::BL, Corner::BR),
            Side::Top => (Corner::TL, Corner::TR),
        }
    }

    pub fn from_name(s: &str) -> Option<Side> {
        match s {
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            "bottom" => Some(Side::Bottom),
            "top" => Some(Side::Top),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    /// Classifies an end point of a side, `None` for points in the interior.
    pub fn of_point(x: (f64, f64), tol: f64) -> Vec<Side> {
        let mut v = Vec::new();
        if x.0.abs() <= tol {
            v.push(Side::Left);
        }
        if (x.0 - 1.0).abs() <= tol {
            v.push(Side::Right);
        }
        if x.1.abs() <= tol {
            v.push(Side::Bottom);
        }
        if (x.1 - 1.0).abs() <= tol {
            v.push(Side::Top);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    BL,
    BR,
    TL,
    TR,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::BL, Corner::BR, Corner::TL, Corner::TR];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn point(self) -> (f64, f64) {
        match self {
            Corner::BL => (0.0, 0.0),
            Corner::BR => (1.0, 0.0),
            Corner::TL => (0.0, 1.0),
            Corner::TR => (1.0, 1.0),
        }
    }

    pub fn from_point(x: (f64, f64)) -> Corner {
        match (x.0 > 0.5, x.1 > 0.5) {
            (false, false) => Corner::BL,
            (true, false) => Corner::BR,
            (false, true) => Corner::TL,
            (true, true) => Corner::TR,
        }
    }

    pub fn sides(self) -> [Side; 2] {
        match self {
            Corner::BL => [Side::Left, Side::Bottom],
            Corner::BR => [Side::Right, Side::Bottom],
            Corner::TL => [Side::Left, Side::Top],
            Corner::TR => [Side::Right, Side::Top],
        }
    }
}

/// One of the eight symmetries of the unit square, mapping frame
/// coordinates (u, v) to patch coordinates (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dihedral {
    pub swap: bool,
    pub flip_u: bool,
    pub flip_v: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral { swap: false, flip_u: false, flip_v: false };

    pub fn all() -> [Dihedral; 8] {
        let mut out = [Dihedral::IDENTITY; 8];
        for (i, o) in out.iter_mut().enumerate() {
            *o = Dihedral { swap: i & 4 != 0, flip_u: i & 1 != 0, flip_v: i & 2 != 0 };
        }
        out
    }

    pub fn apply(&self, u: f64, v: f64) -> (f64, f64) {
        let u = if self.flip_u { 1.0 - u } else { u };
        let v = if self.flip_v { 1.0 - v } else { v };
        if self.swap {
            (v, u)
        } else {
            (u, v)
        }
    }

    pub fn inverse(&self) -> Dihedral {
        if self.swap {
            Dihedral { swap: true, flip_u: self.flip_v, flip_v: self.flip_u }
        } else {
            *self
        }
    }

    /// self ∘ other
    pub fn compose(&self, other: &Dihedral) -> Dihedral {
        let probe = [(0.1, 0.2), (0.3, 0.7)];
        *Dihedral::all()
            .iter()
            .find(|d| {
                probe.iter().all(|&(u, v)| {
                    let (a, b) = other.apply(u, v);
                    let lhs = self.apply(a, b);
                    let rhs = d.apply(u, v);
                    (lhs.0 - rhs.0).abs() < 1e-14 && (lhs.1 - rhs.1).abs() < 1e-14
                })
            })
            .unwrap()
    }

    pub fn apply_side(&self, s: Side) -> Side {
        let (a, b) = match s {
            Side::Left => self.apply(0.0, 0.5),
            Side::Right => self.apply(1.0, 0.5),
            Side::Bottom => self.apply(0.5, 0.0),
            Side::Top => self.apply(0.5, 1.0),
        };
        Side::of_point((a, b), 1e-12)[0]
    }

    pub fn apply_corner(&self, c: Corner) -> Corner {
        let (u, v) = c.point();
        Corner::from_point(self.apply(u, v))
    }

    /// Patch tensor index of the frame tensor index (a, b) in an n × n basis.
    pub fn apply_index(&self, a: usize, b: usize, n: usize) -> (usize, usize) {
        let a = if self.flip_u { n - 1 - a } else { a };
        let b = if self.flip_v { n - 1 - b } else { b };
        if self.swap {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Jacobian d(x,y)/d(u,v) as rows.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        let su = if self.flip_u { -1.0 } else { 1.0 };
        let sv = if self.flip_v { -1.0 } else { 1.0 };
        if self.swap {
            [[0.0, sv], [su, 0.0]]
        } else {
            [[su, 0.0], [0.0, sv]]
        }
    }

    /// The map sending the frame's u = 0 side onto `side` with v running along
    /// the side's own parameter (reversed if `reversed`).
    pub fn for_side(side: Side, reversed: bool) -> Dihedral {
        let (swap, flip_u) = match side {
            Side::Left => (false, false),
            Side::Right => (false, true),
            Side::Bottom => (true, false),
            Side::Top => (true, true),
        };
        Dihedral { swap, flip_u, flip_v: reversed }
    }

    /// A map sending the frame origin to corner `c` and the frame's u = 0 side
    /// onto `side` (which must contain `c`).
    pub fn for_corner(c: Corner, side: Side) -> Dihedral {
        *Dihedral::all()
            .iter()
            .find(|d| d.apply_corner(Corner::BL) == c && d.apply_side(Side::Left) == side)
            .expect("side does not contain corner")
    }
}

/// Which sides of a patch are inner edges, and which corners are boundary
/// vertices of patch valency one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EdgeFlags {
    pub inner: [bool; 4],
    pub valency1: [bool; 4],
}

impl EdgeFlags {
    pub fn from_sides(inner: &[Side]) -> EdgeFlags {
        let mut f = EdgeFlags::default();
        for s in inner {
            f.inner[s.index()] = true;
        }
        for c in Corner::ALL {
            f.valency1[c.index()] = c.sides().iter().all(|s| !f.inner[s.index()]);
        }
        f
    }

    pub fn is_inner(&self, s: Side) -> bool {
        self.inner[s.index()]
    }

    pub fn inner_count(&self) -> usize {
        self.inner.iter().filter(|b| **b).count()
    }

    pub fn valency1_count(&self) -> usize {
        self.valency1.iter().filter(|b| **b).count()
    }

    pub fn mapped(&self, d: &Dihedral) -> EdgeFlags {
        let mut f = EdgeFlags::default();
        for s in Side::ALL {
            f.inner[d.apply_side(s).index()] = self.inner[s.index()];
        }
        for c in Corner::ALL {
            f.valency1[d.apply_corner(c).index()] = self.valency1[c.index()];
        }
        f
    }

    pub fn validate(&self) -> Result<(), MixedError> {
        if self.inner_count() == 0 {
            return Err(MixedError::NoInnerEdge);
        }
        for c in Corner::ALL {
            if self.valency1[c.index()] && c.sides().iter().any(|s| self.inner[s.index()]) {
                return Err(MixedError::BadCorner(c));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Four,
    Three,
    TwoAdjacent,
    TwoOpposite,
    One,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Four, Variant::Three, Variant::TwoAdjacent, Variant::TwoOpposite, Variant::One];

    /// Inner sides of the canonical configuration.
    pub fn canonical_sides(self) -> &'static [Side] {
        match self {
            Variant::Four => &[Side::Left, Side::Right, Side::Bottom, Side::Top],
            Variant::Three => &[Side::Left, Side::Bottom, Side::Top],
            Variant::TwoAdjacent => &[Side::Left, Side::Bottom],
            Variant::TwoOpposite => &[Side::Bottom, Side::Top],
            Variant::One => &[Side::Bottom],
        }
    }

    pub fn canonical_flags(self) -> EdgeFlags {
        EdgeFlags::from_sides(self.canonical_sides())
    }

    /// Variant and frame map (canonical -> patch) for a set of inner sides.
    pub fn classify(flags: &EdgeFlags) -> Result<(Variant, Dihedral), MixedError> {
        for v in Variant::ALL {
            let c = v.canonical_flags();
            for d in Dihedral::all() {
                if c.mapped(&d).inner == flags.inner {
                    return Ok((v, d));
                }
            }
        }
        Err(MixedError::NoInnerEdge)
    }
}

/// Univariate factor of a mixed basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// N_j^{p1,s}
    Low(usize),
    /// N_j^{p2,s}
    High(usize),
    /// truncated N_j^{p1,s}, both ends
    Trunc(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisClass {
    S1,
    S1bar,
    S2,
}

/// The two univariate spaces of regularity s and the exact representation
/// of every degree-p1 factor in the degree-p2 space.
#[derive(Debug, Clone)]
pub struct Factors {
    pub s: usize,
    pub k: usize,
    pub low: UnivariateSpace,
    pub high: UnivariateSpace,
    low_in_high: Vec<SplineCoeffs1D<f64>>,
    trunc_in_high: Vec<SplineCoeffs1D<f64>>,
}

impl Factors {
    pub fn new(s: usize, k: usize) -> Result<Factors, MixedError> {
        let low = UnivariateSpace::new(s + 1, s, k)?;
        let high = UnivariateSpace::new(2 * s + 1, s, k)?;
        let n1 = low.dim();
        let mut low_in_high = Vec::with_capacity(n1);
        let mut trunc_in_high = Vec::with_capacity(n1);
        for j in 0..n1 {
            let mut unit = vec![0.0; n1];
            unit[j] = 1.0;
            low_in_high.push(SplineCoeffs1D::from_dense(&low.embed(&high, &unit)?));
            trunc_in_high.push(SplineCoeffs1D::from_dense(&low.truncate::<f64>(j, &high, true, true)?));
        }
        Ok(Factors { s, k, low, high, low_in_high, trunc_in_high })
    }

    pub fn n1(&self) -> usize {
        self.low.dim()
    }
    pub fn n2(&self) -> usize {
        self.high.dim()
    }
    pub fn p1(&self) -> usize {
        self.s + 1
    }
    pub fn p2(&self) -> usize {
        2 * self.s + 1
    }

    /// Truncation is only effective near the ends; elsewhere a truncated
    /// factor is the plain B-spline.
    pub fn normalize(&self, f: Factor) -> Factor {
        match f {
            Factor::Trunc(j) if j > self.s && j + self.s + 2 <= self.n1() => Factor::Low(j),
            other => other,
        }
    }

    /// Same factor composed with x -> 1 - x.
    pub fn reversed(&self, f: Factor) -> Factor {
        match f {
            Factor::Low(j) => Factor::Low(self.n1() - 1 - j),
            Factor::Trunc(j) => Factor::Trunc(self.n1() - 1 - j),
            Factor::High(j) => Factor::High(self.n2() - 1 - j),
        }
    }

    /// Coefficients of the factor in S^{p2,s}.
    pub fn high_coeffs(&self, f: Factor) -> SplineCoeffs1D<f64> {
        match f {
            Factor::Low(j) => self.low_in_high[j].clone(),
            Factor::Trunc(j) => self.trunc_in_high[j].clone(),
            Factor::High(j) => SplineCoeffs1D { first: j, vals: vec![1.0] },
        }
    }

    pub fn high_coeffs_ref(&self, f: Factor) -> Option<&SplineCoeffs1D<f64>> {
        match f {
            Factor::Low(j) => Some(&self.low_in_high[j]),
            Factor::Trunc(j) => Some(&self.trunc_in_high[j]),
            Factor::High(_) => None,
        }
    }

    /// Elements [first, last] in the support of the factor.
    pub fn support(&self, f: Factor) -> (usize, usize) {
        match f {
            Factor::Low(j) => self.low.support_elements(j),
            Factor::High(j) => self.high.support_elements(j),
            Factor::Trunc(j) => {
                let c = &self.trunc_in_high[j];
                let a = self.high.support_elements(c.first).0;
                let b = self.high.support_elements(c.last()).1;
                (a, b)
            }
        }
    }

    /// Derivatives 0..=nd of a single factor at x (convenience path).
    pub fn eval(&self, f: Factor, x: f64, nd: usize) -> Vec<f64> {
        let rows = UniRows::new(self, x, nd);
        (0..=nd).map(|d| rows.get(self, f, d)).collect()
    }
}

/// Local basis rows of both univariate spaces at one coordinate.
#[derive(Debug, Clone)]
pub struct UniRows {
    pub nd: usize,
    pub low_first: usize,
    pub low: Vec<f64>,
    pub high_first: usize,
    pub high: Vec<f64>,
    p1: usize,
    p2: usize,
}

impl UniRows {
    pub fn new(f: &Factors, x: f64, nd: usize) -> UniRows {
        let (p1, p2) = (f.p1(), f.p2());
        let mut low = vec![0.0; (nd + 1) * (p1 + 1)];
        let mut high = vec![0.0; (nd + 1) * (p2 + 1)];
        let low_first = f.low.eval_local(x, nd, &mut low);
        let high_first = f.high.eval_local(x, nd, &mut high);
        UniRows { nd, low_first, low, high_first, high, p1, p2 }
    }

    pub fn low_value(&self, j: usize, d: usize) -> f64 {
        if j < self.low_first || j > self.low_first + self.p1 {
            0.0
        } else {
            self.low[d * (self.p1 + 1) + j - self.low_first]
        }
    }

    pub fn high_value(&self, j: usize, d: usize) -> f64 {
        if j < self.high_first || j > self.high_first + self.p2 {
            0.0
        } else {
            self.high[d * (self.p2 + 1) + j - self.high_first]
        }
    }

    /// d-th derivative of a spline given by sparse S^{p2,s} coefficients.
    pub fn high_dot(&self, c: &SplineCoeffs1D<f64>, d: usize) -> f64 {
        let lo = c.first.max(self.high_first);
        let hi = (c.first + c.vals.len()).min(self.high_first + self.p2 + 1);
        let mut acc = 0.0;
        for j in lo..hi {
            acc += c.vals[j - c.first] * self.high[d * (self.p2 + 1) + j - self.high_first];
        }
        acc
    }

    pub fn get(&self, f: &Factors, fac: Factor, d: usize) -> f64 {
        match fac {
            Factor::Low(j) => self.low_value(j, d),
            Factor::High(j) => self.high_value(j, d),
            Factor::Trunc(j) => self.high_dot(&f.trunc_in_high[j], d),
        }
    }
}

/// A basis function of the mixed space, factor_x(ξ1) · factor_y(ξ2) in patch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedBasisFunction {
    pub class: BasisClass,
    /// factors in the canonical frame (u, v)
    pub canon_u: Factor,
    pub canon_v: Factor,
    /// factors in patch coordinates (ξ1, ξ2)
    pub factor_x: Factor,
    pub factor_y: Factor,
}

/// Multi-indices (d1, d2) with d1 + d2 <= m, ordered by total degree.
pub fn multi_indices(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for t in 0..=m {
        for d2 in 0..=t {
            v.push((t - d2, d2));
        }
    }
    v
}

#[derive(Debug, Clone)]
pub struct MixedDegreeSpace2D {
    pub s: usize,
    pub k: usize,
    pub flags: EdgeFlags,
    pub variant: Variant,
    /// canonical frame -> patch coordinates
    pub frame: Dihedral,
    pub factors: Factors,
    pub basis: Vec<MixedBasisFunction>,
}

/// Closed-form dimension (k+2)^2 + ((2+2E)k + 12 - E - 2V) s + (Ek + 5 - V) s^2.
pub fn dimension(s: usize, k: usize, e: usize, v: usize) -> usize {
    let (s, k, e, v) = (s as i64, k as i64, e as i64, v as i64);
    ((k + 2) * (k + 2) + ((2 + 2 * e) * k + 12 - e - 2 * v) * s + (e * k + 5 - v) * s * s) as usize
}

/// The V entering [`dimension`] for each variant.
pub fn variant_v(v: Variant) -> usize {
    match v {
        Variant::Four | Variant::Three | Variant::TwoOpposite => 0,
        Variant::TwoAdjacent => 1,
        Variant::One => 2,
    }
}

/// Basis of a canonical variant, in the canonical frame, in block order.
pub fn canonical_basis(variant: Variant, f: &Factors) -> Vec<(BasisClass, Factor, Factor)> {
    let s = f.s;
    let n1 = f.n1();
    let n2 = f.n2();
    let mid1: Vec<usize> = (s + 1..n1 - s - 1).collect();
    let ends1: Vec<usize> = (1..=s).chain(n1 - s - 1..n1 - 1).collect();
    let all_inner1: Vec<usize> = (1..n1 - 1).collect();
    let full1: Vec<usize> = (0..n1).collect();
    let mid2: Vec<usize> = (s + 1..n2 - s - 1).collect();
    let ends2: Vec<usize> = (0..=s).chain(n2 - s - 1..n2).collect();
    let full2: Vec<usize> = (0..n2).collect();
    let lo_end1: Vec<usize> = (1..=s).collect();
    let from_s1: Vec<usize> = (s + 1..n1).collect();
    let lo_end2: Vec<usize> = (0..=s).collect();
    let from_s2: Vec<usize> = (s + 1..n2).collect();

    let mut s1 = Vec::new();
    let mut s1bar = Vec::new();
    let mut s2 = Vec::new();
    let low = |j| Factor::Low(j);
    let tr = |j| f.normalize(Factor::Trunc(j));
    let hi = |j| Factor::High(j);
    let block = |out: &mut Vec<(BasisClass, Factor, Factor)>,
                     c: BasisClass,
                     a: &[usize],
                     b: &[usize],
                     fa: &dyn Fn(usize) -> Factor,
                     fb: &dyn Fn(usize) -> Factor| {
        for &i in a {
            for &j in b {
                out.push((c, fa(i), fb(j)));
            }
        }
    };
    use BasisClass::*;
    match variant {
        Variant::Four => {
            block(&mut s1, S1, &mid1, &mid1, &low, &low);
            block(&mut s1bar, S1bar, &ends1, &all_inner1, &tr, &tr);
            block(&mut s1bar, S1bar, &mid1, &ends1, &tr, &tr);
            block(&mut s2, S2, &ends2, &full2, &hi, &hi);
            block(&mut s2, S2, &mid2, &ends2, &hi, &hi);
        }
        Variant::Three => {
            block(&mut s1, S1, &from_s1, &mid1, &low, &low);
            block(&mut s1bar, S1bar, &lo_end1, &all_inner1, &tr, &tr);
            block(&mut s1bar, S1bar, &from_s1, &ends1, &low, &tr);
            block(&mut s2, S2, &lo_end2, &full2, &hi, &hi);
            block(&mut s2, S2, &from_s2, &ends2, &hi, &hi);
        }
        Variant::TwoAdjacent => {
            block(&mut s1, S1, &from_s1, &from_s1, &low, &low);
            block(&mut s1bar, S1bar, &lo_end1, &lo_end1, &tr, &tr);
            block(&mut s1bar, S1bar, &lo_end1, &from_s1, &tr, &low);
            block(&mut s1bar, S1bar, &from_s1, &lo_end1, &low, &tr);
            block(&mut s2, S2, &lo_end2, &full2, &hi, &hi);
            block(&mut s2, S2, &from_s2, &lo_end2, &hi, &hi);
        }
        Variant::TwoOpposite => {
            block(&mut s1, S1, &full1, &mid1, &low, &low);
            block(&mut s1bar, S1bar, &full1, &ends1, &low, &tr);
            block(&mut s2, S2, &full2, &ends2, &hi, &hi);
        }
        Variant::One => {
            block(&mut s1, S1, &full1, &from_s1, &low, &low);
            block(&mut s1bar, S1bar, &full1, &lo_end1, &low, &tr);
            block(&mut s2, S2, &full2, &lo_end2, &hi, &hi);
        }
    }
    s1.sort_by_key(|&(_, a, b)| (a, b));
    s1.extend(s1bar);
    s1.extend(s2);
    s1
}

impl MixedDegreeSpace2D {
    pub fn build(s: usize, k: usize, flags: EdgeFlags) -> Result<MixedDegreeSpace2D, MixedError> {
        if s != 2 && s != 4 {
            return Err(MixedError::Regularity(s));
        }
        if k < s {
            return Err(MixedError::TooCoarse { s, k, need: s });
        }
        flags.validate()?;
        let factors = Factors::new(s, k)?;
        Self::build_with(factors, flags)
    }

    pub fn build_with(factors: Factors, flags: EdgeFlags) -> Result<MixedDegreeSpace2D, MixedError> {
        flags.validate()?;
        let (variant, frame) = Variant::classify(&flags)?;
        let basis = canonical_basis(variant, &factors)
            .into_iter()
            .map(|(class, cu, cv)| {
                let (fx, fy) = map_factors(&factors, &frame, cu, cv);
                MixedBasisFunction { class, canon_u: cu, canon_v: cv, factor_x: fx, factor_y: fy }
            })
            .collect();
        Ok(MixedDegreeSpace2D { s: factors.s, k: factors.k, flags, variant, frame, factors, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rows by basis function, columns by [`multi_indices`]`(max_deriv)`.
    pub fn eval(&self, point: (f64, f64), max_deriv: usize) -> Result<Vec<Vec<f64>>, MixedError> {
        let (x, y) = point;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(MixedError::Domain(x, y));
        }
        let rx = UniRows::new(&self.factors, x, max_deriv);
        let ry = UniRows::new(&self.factors, y, max_deriv);
        let mi = multi_indices(max_deriv);
        Ok(self
            .basis
            .iter()
            .map(|b| {
                mi.iter()
                    .map(|&(d1, d2)| {
                        rx.get(&self.factors, b.factor_x, d1) * ry.get(&self.factors, b.factor_y, d2)
                    })
                    .collect()
            })
            .collect())
    }
}

/// Patch-coordinate factors of the canonical function U(u) V(v) under `frame`.
pub fn map_factors(f: &Factors, frame: &Dihedral, u: Factor, v: Factor) -> (Factor, Factor) {
    let u = if frame.flip_u { f.reversed(u) } else { u };
    let v = if frame.flip_v { f.reversed(v) } else { v };
    if frame.swap {
        (v, u)
    } else {
        (u, v)
    }
}
