//! Collocation points: mixed-degree Greville and clustered superconvergent
//! layouts per patch, the two-patch edge variants, global deduplication and
//! the interior / Dirichlet / Neumann separation.

use crate::geometry::{EdgeRef, MultiPatchDomain};
use crate::mixed_space::{canonical_basis, BasisClass, Factor, Factors, MixedError, Side, Variant};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CollocationError {
    #[error("k={k} too small for the clustered selection with s={s}")]
    TooCoarse { s: usize, k: usize },
    #[error("scheme {0:?} needs a two-patch domain with one inner edge")]
    Topology(SchemeKind),
    #[error(transparent)]
    Mixed(#[from] MixedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Greville,
    Superconvergent,
    Set2,
    Set3,
}

impl SchemeKind {
    pub fn from_name(s: &str) -> Option<SchemeKind> {
        match s {
            "greville" => Some(SchemeKind::Greville),
            "superconvergent" | "set1" => Some(SchemeKind::Superconvergent),
            "set2" => Some(SchemeKind::Set2),
            "set3" => Some(SchemeKind::Set3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Greville => "greville",
            SchemeKind::Superconvergent => "superconvergent",
            SchemeKind::Set2 => "set2",
            SchemeKind::Set3 => "set3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Poisson,
    Biharmonic,
}

impl Problem {
    pub fn from_name(s: &str) -> Option<Problem> {
        match s {
            "poisson" => Some(Problem::Poisson),
            "biharmonic" => Some(Problem::Biharmonic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Poisson => "poisson",
            Problem::Biharmonic => "biharmonic",
        }
    }

    /// Regularity used for this problem.
    pub fn regularity(self) -> usize {
        match self {
            Problem::Poisson => 2,
            Problem::Biharmonic => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointScheme {
    pub kind: SchemeKind,
    pub s: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    Interior,
    Dirichlet,
    /// boundary edge id
    Neumann(usize),
}

impl Tag {
    pub fn name(&self) -> &'static str {
        match self {
            Tag::Interior => "interior",
            Tag::Dirichlet => "dirichlet",
            Tag::Neumann(_) => "neumann",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CollocationPoint {
    pub x: [f64; 2],
    /// owner patch
    pub patch: usize,
    pub zeta: (f64, f64),
    pub tag: Tag,
    /// parametric projection onto the boundary side, for Neumann rows
    pub boundary: Option<(f64, f64)>,
    /// patch side of the Neumann condition
    pub side: Option<Side>,
}

// ---------------------------------------------------------------------------
// univariate sequences

/// Per-span superconvergent roots on [-1, 1] for S^{p1,s}.
pub fn low_roots(_s: usize) -> Vec<f64> {
    let r = 1.0 / 3f64.sqrt();
    vec![-r, r]
}

/// Per-span superconvergent roots on [-1, 1] for S^{p2,s}.
pub fn high_roots(s: usize) -> Vec<f64> {
    let pos: Vec<f64> = match s {
        2 => {
            let q = 21f64.sqrt();
            vec![((6.0 - q) / 15.0).sqrt(), ((6.0 + q) / 15.0).sqrt()]
        }
        _ => [0.2072795685478027, 0.5963052503103114, 0.9098737952346008]
            .iter()
            .map(|&x0| sextic_root(x0))
            .collect(),
    };
    symmetric(&pos)
}

/// Newton polish of a root of 4823 x^6 − 5915 x^4 + 1665 x^2 − 61.
fn sextic_root(mut x: f64) -> f64 {
    for _ in 0..4 {
        let x2 = x * x;
        let p = ((4823.0 * x2 - 5915.0) * x2 + 1665.0) * x2 - 61.0;
        let dp = ((6.0 * 4823.0 * x2 - 4.0 * 5915.0) * x2 + 2.0 * 1665.0) * x;
        x -= p / dp;
    }
    x
}

fn symmetric(pos: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = pos.iter().map(|&x| -x).chain(pos.iter().copied()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Per-span points of the maximal-regularity space S^{2s+1-l, 2s-l}; `None`
/// stands for the knot/midpoint pattern {-1, 0, 1}.
pub fn max_regularity_roots(s: usize, l: usize) -> Option<Vec<f64>> {
    let r7 = (225.0 - 30.0 * 30f64.sqrt()).sqrt() / 15.0;
    let table: &[Option<f64>] = match s {
        2 => &[Some(r7), None, Some(1.0 / 3f64.sqrt())],
        _ => &[Some(0.504918567512653), None, Some(r7), None, Some(1.0 / 3f64.sqrt())],
    };
    table[l].map(|r| vec![-r, r])
}

fn on_span(span: usize, h: f64, r: f64) -> f64 {
    (span as f64 + 0.5 * (r + 1.0)) * h
}

/// Clustered selection of `need` points from the roots of spans `lo..=hi`.
/// With two roots per span whole spans are kept and skipped alternately,
/// starting with `lo`. With more roots every span drops its rightmost one;
/// alternating the dropped side makes the fourth-order collocation matrix
/// grow faster than h^-4. The count is then fixed from the `hi` end.
fn clustered(lo: usize, hi: usize, h: f64, roots: &[f64], need: usize) -> Result<Vec<f64>, ()> {
    let m = hi + 1 - lo;
    let r = roots.len();
    if need > r * m {
        return Err(());
    }
    let mut keep: Vec<bool> = (0..r * m)
        .map(|i| {
            let (t, j) = (i / r, i % r);
            if r == 2 {
                t % 2 == 0
            } else {
                j != r - 1
            }
        })
        .collect();
    let mut count = keep.iter().filter(|&&b| b).count();
    // fixing the count away from the end makes the 1-D collocation matrix
    // ill-conditioned, geometrically in the distance
    for i in (0..r * m).rev() {
        if count < need && !keep[i] {
            keep[i] = true;
            count += 1;
        }
        if count > need && keep[i] {
            keep[i] = false;
            count -= 1;
        }
    }
    Ok((0..r * m).filter(|&i| keep[i]).map(|i| on_span(lo + i / r, h, roots[i % r])).collect())
}

/// Univariate point tracks for one patch direction.
#[derive(Debug, Clone)]
pub struct Tracks {
    pub s: usize,
    pub k: usize,
    /// one point per N_j^{p2,s}
    pub high: Vec<f64>,
    /// one point per N_j^{p1,s} when neither end is truncated
    pub low: Vec<f64>,
}

impl Tracks {
    pub fn greville(f: &Factors) -> Tracks {
        Tracks {
            s: f.s,
            k: f.k,
            high: (0..f.n2()).map(|j| f.high.greville::<f64>(j).unwrap()).collect(),
            low: (0..f.n1()).map(|j| f.low.greville::<f64>(j).unwrap()).collect(),
        }
    }

    pub fn superconvergent(f: &Factors) -> Result<Tracks, CollocationError> {
        let (s, k) = (f.s, f.k);
        if k < 2 * s + 2 {
            return Err(CollocationError::TooCoarse { s, k });
        }
        let h = 1.0 / (k + 1) as f64;
        let err = |_| CollocationError::TooCoarse { s, k };
        // S^{p2,s}: strips of s + s/2 roots next to h plus the end point
        let hr = high_roots(s);
        let strip: Vec<f64> = hr[hr.len() - (s + s / 2)..].iter().map(|&r| on_span(0, h, r)).collect();
        let n2 = f.n2();
        let inner2 = clustered(1, k - 1, h, &hr, n2 - 2 * (strip.len() + 1)).map_err(err)?;
        let mut high = vec![0.0];
        high.extend(&strip);
        high.extend(&inner2);
        high.extend(strip.iter().rev().map(|x| 1.0 - x));
        high.push(1.0);
        // S^{p1,s}: interior k points plus s/2 roots and the end point per side
        let lr = low_roots(s);
        let inner1 = clustered(1, k - 1, h, &lr, k).map_err(err)?;
        let ends: Vec<f64> = lr[lr.len() - s / 2..].iter().map(|&r| on_span(0, h, r)).collect();
        let mut low = vec![0.0];
        low.extend(&ends);
        low.extend(&inner1);
        low.extend(ends.iter().rev().map(|x| 1.0 - x));
        low.push(1.0);
        debug_assert_eq!(high.len(), n2);
        debug_assert_eq!(low.len(), f.n1());
        Ok(Tracks { s, k, high, low })
    }

    /// Coordinate for a factor; `hybrid` marks truncated (inner) ends, where the
    /// first s/2 degree-p1 indices borrow degree-p2 points.
    pub fn coord(&self, f: Factor, hybrid: (bool, bool)) -> f64 {
        let n1 = self.low.len();
        let n2 = self.high.len();
        let half = self.s / 2;
        match f {
            Factor::High(j) => self.high[j],
            Factor::Low(j) | Factor::Trunc(j) => {
                if hybrid.0 && (1..=half).contains(&j) {
                    self.high[self.s + j]
                } else if hybrid.1 && (1..=half).contains(&(n1 - 1 - j)) {
                    self.high[n2 - 1 - self.s - (n1 - 1 - j)]
                } else {
                    self.low[j]
                }
            }
        }
    }

    /// Position of the factor counted from the low and the high end, when its
    /// point belongs to the outermost two layers of that end.
    fn layers(&self, f: Factor, hybrid: (bool, bool)) -> (Option<usize>, Option<usize>) {
        let n1 = self.low.len();
        let n2 = self.high.len();
        match f {
            Factor::High(j) => (Some(j).filter(|&j| j < 2), Some(n2 - 1 - j).filter(|&j| j < 2)),
            Factor::Low(j) | Factor::Trunc(j) => (
                Some(j).filter(|&j| j < 2 && !hybrid.0),
                Some(n1 - 1 - j).filter(|&j| j < 2 && !hybrid.1),
            ),
        }
    }
}

/// Clustered superconvergent sequence of S^{2s+1-l, 2s-l} on [0, 1] with
/// k + 2s + 2 - l points including both end points.
pub fn max_regularity_sequence(s: usize, k: usize, l: usize) -> Result<Vec<f64>, CollocationError> {
    let q = 2 * s + 1 - l;
    let d = k + q + 1;
    let h = 1.0 / (k + 1) as f64;
    match max_regularity_roots(s, l) {
        None => {
            // end points, every midpoint, and (q-2)/2 knots next to each end
            let mut v: Vec<f64> = (0..=k).map(|i| (i as f64 + 0.5) * h).collect();
            for i in 1..=(q - 2) / 2 {
                v.push(i as f64 * h);
                v.push(1.0 - i as f64 * h);
            }
            v.push(0.0);
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            debug_assert_eq!(v.len(), d);
            Ok(v)
        }
        Some(r) => {
            let strip: Vec<f64> = r.iter().map(|&x| on_span(0, h, x)).collect();
            let inner =
                clustered(1, k - 1, h, &r, d - 2 - 2 * strip.len()).map_err(|_| CollocationError::TooCoarse { s, k })?;
            let mut v = vec![0.0];
            v.extend(&strip);
            v.extend(&inner);
            v.extend(strip.iter().rev().map(|x| 1.0 - x));
            v.push(1.0);
            Ok(v)
        }
    }
}

// ---------------------------------------------------------------------------
// per-patch points

/// A point in patch coordinates with the boundary information needed for tagging.
#[derive(Debug, Clone)]
pub struct LocalPoint {
    pub patch: usize,
    pub zeta: (f64, f64),
    /// patch sides the point lies on
    pub on: Vec<Side>,
    /// patch sides whose first interior layer holds the point
    pub next_to: Vec<Side>,
    /// merge with coincident points of lower patches
    pub merge: bool,
}

fn canonical_hybrid(variant: Variant) -> [(bool, bool); 2] {
    let inner = variant.canonical_sides();
    [
        (inner.contains(&Side::Left), inner.contains(&Side::Right)),
        (inner.contains(&Side::Bottom), inner.contains(&Side::Top)),
    ]
}

fn push_layers(on: &mut Vec<Side>, next: &mut Vec<Side>, l: (Option<usize>, Option<usize>), sides: (Side, Side)) {
    for (lay, side) in [(l.0, sides.0), (l.1, sides.1)] {
        match lay {
            Some(0) => on.push(side),
            Some(1) => next.push(side),
            _ => {}
        }
    }
}

/// One point per basis function of the patch's mixed-degree space.
pub fn patch_points(dom: &MultiPatchDomain, patch: usize, tracks: &Tracks, f: &Factors) -> Result<Vec<LocalPoint>, CollocationError> {
    let (variant, frame) = Variant::classify(&dom.patch_flags(patch))?;
    let hyb = canonical_hybrid(variant);
    Ok(canonical_basis(variant, f)
        .into_iter()
        .map(|(_, fu, fv)| local_point(patch, &frame, tracks, hyb, fu, fv))
        .collect())
}

fn local_point(
    patch: usize,
    frame: &crate::mixed_space::Dihedral,
    tracks: &Tracks,
    hyb: [(bool, bool); 2],
    fu: Factor,
    fv: Factor,
) -> LocalPoint {
    let u = tracks.coord(fu, hyb[0]);
    let v = tracks.coord(fv, hyb[1]);
    let mut on = Vec::new();
    let mut next = Vec::new();
    push_layers(&mut on, &mut next, tracks.layers(fu, hyb[0]), (Side::Left, Side::Right));
    push_layers(&mut on, &mut next, tracks.layers(fv, hyb[1]), (Side::Bottom, Side::Top));
    LocalPoint {
        patch,
        zeta: frame.apply(u, v),
        on: on.into_iter().map(|s| frame.apply_side(s)).collect(),
        next_to: next.into_iter().map(|s| frame.apply_side(s)).collect(),
        merge: true,
    }
}

/// Replace the edge-adjacent degree-p2 rows of a two-patch domain by
/// maximal-regularity columns (Set 2), or their alternating thinning (Set 3).
/// Set 3 keeps 2s rows more than the dimension: every fully square thinning
/// tried was singular for the biharmonic problem.
fn edge_columns(
    dom: &MultiPatchDomain,
    tracks: &Tracks,
    f: &Factors,
    thin: bool,
) -> Result<Vec<LocalPoint>, CollocationError> {
    let s = f.s;
    let cols: Vec<Vec<f64>> = (0..=s).map(|l| max_regularity_sequence(s, f.k, l)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for p in 0..dom.patch_count() {
        let (variant, frame) = Variant::classify(&dom.patch_flags(p))?;
        if variant != Variant::One {
            return Err(CollocationError::Topology(if thin { SchemeKind::Set3 } else { SchemeKind::Set2 }));
        }
        let hyb = canonical_hybrid(variant);
        for (class, fu, fv) in canonical_basis(variant, f) {
            if class == BasisClass::S2 {
                continue;
            }
            out.push(local_point(p, &frame, tracks, hyb, fu, fv));
        }
        for (l, col) in cols.iter().enumerate() {
            let v = tracks.high[l];
            let n = col.len();
            for (i, &u) in col.iter().enumerate() {
                // interior points alternate between the two sides; the
                // boundary ends stay on both
                let end = i == 0 || i == n - 1;
                if thin && l > 0 && !end && (i + p) % 2 == 0 {
                    continue;
                }
                let mut on = Vec::new();
                let mut next = Vec::new();
                let lay = (Some(i).filter(|&i| i < 2), Some(n - 1 - i).filter(|&i| i < 2));
                push_layers(&mut on, &mut next, lay, (Side::Left, Side::Right));
                if l == 0 {
                    on.push(Side::Bottom);
                }
                out.push(LocalPoint {
                    patch: p,
                    zeta: frame.apply(u, v),
                    on: on.into_iter().map(|s| frame.apply_side(s)).collect(),
                    next_to: next.into_iter().map(|s| frame.apply_side(s)).collect(),
                    // Set 2 keeps both sides' copies of the edge column
                    merge: thin || l > 0 || p == 0,
                });
            }
        }
    }
    Ok(out)
}

/// All local points of a scheme, patch by patch.
pub fn local_points(dom: &MultiPatchDomain, scheme: PointScheme) -> Result<Vec<LocalPoint>, CollocationError> {
    let f = Factors::new(scheme.s, scheme.k)?;
    let tracks = match scheme.kind {
        SchemeKind::Greville => Tracks::greville(&f),
        _ => Tracks::superconvergent(&f)?,
    };
    match scheme.kind {
        SchemeKind::Greville | SchemeKind::Superconvergent => {
            let mut out = Vec::new();
            for p in 0..dom.patch_count() {
                out.extend(patch_points(dom, p, &tracks, &f)?);
            }
            Ok(out)
        }
        SchemeKind::Set2 | SchemeKind::Set3 => {
            if dom.patch_count() != 2 || dom.inner_edges.len() != 1 {
                return Err(CollocationError::Topology(scheme.kind));
            }
            edge_columns(dom, &tracks, &f, scheme.kind == SchemeKind::Set3)
        }
    }
}

fn diameter(dom: &MultiPatchDomain) -> f64 {
    let b = dom.bounding_box();
    ((b[2] - b[0]).powi(2) + (b[3] - b[1]).powi(2)).sqrt()
}

/// Global point list: mapped, deduplicated by minimal patch index, tagged and
/// ordered by (tag, point index).
pub fn assemble_global(
    dom: &MultiPatchDomain,
    scheme: PointScheme,
    problem: Problem,
) -> Result<Vec<CollocationPoint>, CollocationError> {
    let local = local_points(dom, scheme)?;
    let tol = 1e-10 * diameter(dom);
    let cell = tol * 4.0;
    let key = |x: [f64; 2]| ((x[0] / cell).floor() as i64, (x[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut kept: Vec<(LocalPoint, [f64; 2])> = Vec::new();
    for lp in local {
        let x = dom.patches[lp.patch].point(lp.zeta);
        let (kx, ky) = key(x);
        let mut dup = false;
        if lp.merge {
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &i in list {
                            let y = kept[i].1;
                            if kept[i].0.merge && ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() <= tol {
                                dup = true;
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        if !dup {
            grid.entry((kx, ky)).or_default().push(kept.len());
            kept.push((lp, x));
        }
    }
    let boundary = |p: usize, s: Side| matches!(dom.side_edge[p][s.index()], EdgeRef::Boundary(_));
    let mut out: Vec<CollocationPoint> = kept
        .into_iter()
        .map(|(lp, x)| {
            let p = lp.patch;
            let mut pt = CollocationPoint { x, patch: p, zeta: lp.zeta, tag: Tag::Interior, boundary: None, side: None };
            if lp.on.iter().any(|&s| boundary(p, s)) {
                pt.tag = Tag::Dirichlet;
            } else if problem == Problem::Biharmonic {
                let mut cand: Vec<Side> = lp.next_to.iter().copied().filter(|&s| boundary(p, s)).collect();
                cand.sort();
                if let Some(&s) = cand.first() {
                    let t = match s {
                        Side::Left | Side::Right => lp.zeta.1,
                        Side::Bottom | Side::Top => lp.zeta.0,
                    };
                    let id = match dom.side_edge[p][s.index()] {
                        EdgeRef::Boundary(id) => id,
                        EdgeRef::Inner(_) => unreachable!(),
                    };
                    pt.tag = Tag::Neumann(id);
                    pt.boundary = Some(s.point(t));
                    pt.side = Some(s);
                }
            }
            pt
        })
        .collect();
    out.sort_by_key(|p| match p.tag {
        Tag::Interior => 0,
        Tag::Dirichlet => 1,
        Tag::Neumann(_) => 2,
    });
    Ok(out)
}

/// CSV dump: x, y, patch, zeta1, zeta2, tag.
pub fn points_csv(points: &[CollocationPoint]) -> String {
    let mut s = String::from("x,y,patch,zeta1,zeta2,tag\n");
    for p in points {
        s.push_str(&format!(
            "{:.5e},{:.5e},{},{:.5e},{:.5e},{}\n",
            p.x[0],
            p.x[1],
            p.patch,
            p.zeta.0,
            p.zeta.1,
            p.tag.name()
        ));
    }
    s
}
