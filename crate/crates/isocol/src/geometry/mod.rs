//! Multi-patch domains: patch mappings with derivative jets, topology with
//! per-edge and per-vertex reorientation maps, gluing data and the built-in
//! benchmark domains.

mod domain_f;
mod io;

pub use io::{export_geometry, load_geometry, parse_geometry};

use crate::mixed_space::{Corner, Dihedral, EdgeFlags, Side};
use crate::spline_kernel::{SplineError, TensorSpace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("patch {patch}: mapping is not regular (det JF changes sign or vanishes)")]
    Regularity { patch: usize },
    #[error("inner edge {edge}: traces differ by {deviation:e}")]
    EdgeMismatch { edge: usize, deviation: f64 },
    #[error("inner edge {edge}: not bilinear-like G^s ({what} residual {residual:e})")]
    NotBilinearLike { edge: usize, what: &'static str, residual: f64 },
    #[error("inner edge {edge}: inconsistent patch orientations (lambda = {lambda})")]
    Orientation { edge: usize, lambda: f64 },
    #[error("topology: {0}")]
    Topology(String),
    #[error("domain {0}: external control net required; use load_geometry")]
    External(String),
    #[error("unknown domain {0}")]
    Unknown(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A coordinate, exact when the input was rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(BigRational),
    Float(f64),
}

impl Number {
    pub fn ratio(n: i64, d: i64) -> Number {
        Number::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Accepts "n/d", "n" (exact) or decimal notation (floating point).
    pub fn parse(s: &str) -> Result<Number, GeometryError> {
        let s = s.trim();
        let bad = || GeometryError::Schema(format!("bad number {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Number::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Number::Exact(BigRational::from_integer(n)));
        }
        s.parse::<f64>().map(Number::Float).map_err(|_| bad())
    }

    pub fn value(&self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => *x,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Number::Exact(r) if r.denom() == &BigInt::from(1) => r.numer().to_string(),
            Number::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            Number::Float(x) => format!("{x:e}"),
        }
    }
}

pub type Point2 = [Number; 2];

fn pt(x: (i64, i64), y: (i64, i64)) -> Point2 {
    [Number::ratio(x.0, x.1), Number::ratio(y.0, y.1)]
}

fn values(p: &Point2) -> [f64; 2] {
    [p[0].value(), p[1].value()]
}

/// All partial derivatives ∂^{(d1,d2)}F with d1, d2 <= order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeomJet {
    pub order: usize,
    pub vals: Vec<[f64; 2]>,
}

impl GeomJet {
    pub fn zeros(order: usize) -> GeomJet {
        GeomJet { order, vals: vec![[0.0; 2]; (order + 1) * (order + 1)] }
    }

    pub fn get(&self, d1: usize, d2: usize) -> [f64; 2] {
        if d1 > self.order || d2 > self.order {
            return [0.0; 2];
        }
        self.vals[d1 * (self.order + 1) + d2]
    }

    fn set(&mut self, d1: usize, d2: usize, v: [f64; 2]) {
        self.vals[d1 * (self.order + 1) + d2] = v;
    }

    pub fn det(&self) -> f64 {
        let a = self.get(1, 0);
        let b = self.get(0, 1);
        a[0] * b[1] - a[1] * b[0]
    }

    /// Jet of F∘D at (u,v), given the jet of F at D(u,v).
    pub fn in_frame(&self, d: &Dihedral) -> GeomJet {
        let mut out = GeomJet::zeros(self.order);
        let su: f64 = if d.flip_u { -1.0 } else { 1.0 };
        let sv: f64 = if d.flip_v { -1.0 } else { 1.0 };
        for a in 0..=self.order {
            for b in 0..=self.order {
                let sign = su.powi(a as i32) * sv.powi(b as i32);
                let src = if d.swap { self.get(b, a) } else { self.get(a, b) };
                out.set(a, b, [sign * src[0], sign * src[1]]);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum Mapping {
    /// Corners F(0,0), F(1,0), F(1,1), F(0,1).
    Bilinear { corners: [Point2; 4] },
    /// Tensor spline with row-major net, entry j1 * n + j2 = c_{j1,j2}.
    Spline { degree: usize, regularity: usize, k: usize, net: Vec<Point2> },
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub index: usize,
    pub mapping: Mapping,
    eval: PatchEval,
}

#[derive(Debug, Clone)]
enum PatchEval {
    Bilinear([[f64; 2]; 4]),
    Spline { space: TensorSpace, xs: Vec<f64>, ys: Vec<f64> },
}

impl Patch {
    pub fn new(index: usize, mapping: Mapping) -> Result<Patch, GeometryError> {
        let eval = match &mapping {
            Mapping::Bilinear { corners } => PatchEval::Bilinear([
                values(&corners[0]),
                values(&corners[1]),
                values(&corners[2]),
                values(&corners[3]),
            ]),
            Mapping::Spline { degree, regularity, k, net } => {
                let space = TensorSpace::new(*degree, *regularity, *k)?;
                if net.len() != space.dim() {
                    return Err(GeometryError::Schema(format!(
                        "patch {index}: control net has {} points, expected {}",
                        net.len(),
                        space.dim()
                    )));
                }
                PatchEval::Spline {
                    space,
                    xs: net.iter().map(|p| p[0].value()).collect(),
                    ys: net.iter().map(|p| p[1].value()).collect(),
                }
            }
        };
        Ok(Patch { index, mapping, eval })
    }

    pub fn bilinear(index: usize, c00: Point2, c10: Point2, c11: Point2, c01: Point2) -> Patch {
        Patch::new(index, Mapping::Bilinear { corners: [c00, c10, c11, c01] }).unwrap()
    }

    pub fn is_bilinear(&self) -> bool {
        matches!(self.mapping, Mapping::Bilinear { .. })
    }

    pub fn point(&self, x: (f64, f64)) -> [f64; 2] {
        self.jet(x, 0).get(0, 0)
    }

    pub fn jet(&self, x: (f64, f64), order: usize) -> GeomJet {
        let mut j = GeomJet::zeros(order);
        match &self.eval {
            PatchEval::Bilinear([c00, c10, c11, c01]) => {
                let (u, v) = x;
                for i in 0..2 {
                    let f = c00[i] * (1.0 - u) * (1.0 - v)
                        + c10[i] * u * (1.0 - v)
                        + c11[i] * u * v
                        + c01[i] * (1.0 - u) * v;
                    let fu = (c10[i] - c00[i]) * (1.0 - v) + (c11[i] - c01[i]) * v;
                    let fv = (c01[i] - c00[i]) * (1.0 - u) + (c11[i] - c10[i]) * u;
                    let fuv = c00[i] - c10[i] + c11[i] - c01[i];
                    j.vals[0][i] = f;
                    if order >= 1 {
                        j.vals[order + 1][i] = fu;
                        j.vals[1][i] = fv;
                        j.vals[order + 2][i] = fuv;
                    }
                }
            }
            PatchEval::Spline { space, xs, ys } => {
                let ex = space.eval_spline(xs, x, order);
                let ey = space.eval_spline(ys, x, order);
                for a in 0..=order {
                    for b in 0..=order {
                        j.set(a, b, [ex[a][b], ey[a][b]]);
                    }
                }
            }
        }
        j
    }

    /// Sign of det JF if constant on a 30 × 30 grid, else a regularity error.
    pub fn orientation(&self) -> Result<f64, GeometryError> {
        let n = 30;
        let mut sign = 0.0;
        for a in 0..n {
            for b in 0..n {
                let x = (a as f64 / (n - 1) as f64, b as f64 / (n - 1) as f64);
                let d = self.jet(x, 1).det();
                if d == 0.0 || (sign != 0.0 && d.signum() != sign) {
                    return Err(GeometryError::Regularity { patch: self.index });
                }
                sign = d.signum();
            }
        }
        Ok(sign)
    }
}

/// A linear polynomial on [0,1] given by its end values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub at0: f64,
    pub at1: f64,
}

impl Linear {
    pub fn eval(&self, t: f64) -> f64 {
        self.at0 + (self.at1 - self.at0) * t
    }
    pub fn slope(&self) -> f64 {
        self.at1 - self.at0
    }
    pub fn scaled(&self, c: f64) -> Linear {
        Linear { at0: c * self.at0, at1: c * self.at1 }
    }
    /// Same function in the reversed parameter.
    pub fn reversed(&self) -> Linear {
        Linear { at0: self.at1, at1: self.at0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingData {
    pub lambda: f64,
    /// index 0 is patch i0, index 1 is patch i1
    pub alpha: [Linear; 2],
    pub beta: [Linear; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeRef {
    Inner(usize),
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct InnerEdge {
    pub id: usize,
    /// [i0, i1]
    pub patches: [usize; 2],
    pub sides: [Side; 2],
    /// Edge frame -> patch coordinates. The edge is u = 0, v runs along it.
    pub frames: [Dihedral; 2],
    /// vertices at v = 0 and v = 1
    pub vertices: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct BoundaryEdge {
    pub id: usize,
    pub patch: usize,
    pub side: Side,
    pub frame: Dihedral,
    pub vertices: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct FanEntry {
    pub patch: usize,
    pub corner: Corner,
    /// Vertex frame: origin at the vertex, u = 0 side is `next`, v = 0 side is `prev`.
    pub frame: Dihedral,
    pub next: EdgeRef,
    pub prev: EdgeRef,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    pub point: [f64; 2],
    pub boundary: bool,
    /// Consecutive entries share `next`/`prev` edges; cyclic for inner vertices.
    pub fan: Vec<FanEntry>,
}

impl Vertex {
    pub fn valency(&self) -> usize {
        self.fan.len()
    }
}

/// Description of an inner edge as (patch_a, side_a) glued to (patch_b, side_b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeSpec {
    pub patch_a: usize,
    pub side_a: Side,
    pub patch_b: usize,
    pub side_b: Side,
    /// side_b runs opposite to side_a
    pub reversed: bool,
}

#[derive(Debug, Clone)]
pub struct MultiPatchDomain {
    pub name: String,
    pub patches: Vec<Patch>,
    pub specs: Vec<EdgeSpec>,
    pub inner_edges: Vec<InnerEdge>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub vertices: Vec<Vertex>,
    pub gluing: Vec<GluingData>,
    /// per patch, per side
    pub side_edge: Vec<[EdgeRef; 4]>,
    /// per patch, per corner
    pub corner_vertex: Vec<[usize; 4]>,
}

const LINEAR_TOL: f64 = 1e-9;

impl MultiPatchDomain {
    pub fn new(name: &str, patches: Vec<Patch>, specs: Vec<EdgeSpec>) -> Result<MultiPatchDomain, GeometryError> {
        let np = patches.len();
        if np == 0 {
            return Err(GeometryError::Topology("no patches".into()));
        }
        let mut orient = Vec::with_capacity(np);
        for p in &patches {
            orient.push(p.orientation()?);
        }
        // sides
        let mut link: Vec<[Option<(usize, Side, bool)>; 4]> = vec![[None; 4]; np];
        for (e, sp) in specs.iter().enumerate() {
            if sp.patch_a >= np || sp.patch_b >= np || sp.patch_a == sp.patch_b {
                return Err(GeometryError::Topology(format!("inner edge {e}: bad patch pair")));
            }
            for (p, s) in [(sp.patch_a, sp.side_a), (sp.patch_b, sp.side_b)] {
                if link[p][s.index()].is_some() {
                    return Err(GeometryError::Topology(format!("patch {p} side {} used twice", s.name())));
                }
            }
            link[sp.patch_a][sp.side_a.index()] = Some((sp.patch_b, sp.side_b, sp.reversed));
            link[sp.patch_b][sp.side_b.index()] = Some((sp.patch_a, sp.side_a, sp.reversed));
        }

        // inner edges with matched frames
        let mut inner_edges = Vec::new();
        let mut gluing = Vec::new();
        for (e, sp) in specs.iter().enumerate() {
            let fa = Dihedral::for_side(sp.side_a, false);
            let fb = Dihedral::for_side(sp.side_b, sp.reversed);
            let mut dev: f64 = 0.0;
            for t in 0..50 {
                let v = t as f64 / 49.0;
                let pa = patches[sp.patch_a].point(fa.apply(0.0, v));
                let pb = patches[sp.patch_b].point(fb.apply(0.0, v));
                let scale = 1.0 + pa[0].abs().max(pa[1].abs());
                dev = dev.max(((pa[0] - pb[0]).abs().max((pa[1] - pb[1]).abs())) / scale);
            }
            if dev > 1e-12 {
                return Err(GeometryError::EdgeMismatch { edge: e, deviation: dev });
            }
            let da = frame_det(&patches[sp.patch_a], &fa, 0.5);
            let (patches_, sides, frames) = if da < 0.0 {
                ([sp.patch_a, sp.patch_b], [sp.side_a, sp.side_b], [fa, fb])
            } else {
                ([sp.patch_b, sp.patch_a], [sp.side_b, sp.side_a], [fb, fa])
            };
            let edge = InnerEdge { id: e, patches: patches_, sides, frames, vertices: [0, 0] };
            gluing.push(compute_gluing(&patches, &edge)?);
            inner_edges.push(edge);
        }

        let mut side_edge = vec![[EdgeRef::Boundary(usize::MAX); 4]; np];
        for e in &inner_edges {
            for t in 0..2 {
                side_edge[e.patches[t]][e.sides[t].index()] = EdgeRef::Inner(e.id);
            }
        }
        let mut boundary_edges = Vec::new();
        for p in 0..np {
            for s in Side::ALL {
                if link[p][s.index()].is_none() {
                    let id = boundary_edges.len();
                    side_edge[p][s.index()] = EdgeRef::Boundary(id);
                    boundary_edges.push(BoundaryEdge {
                        id,
                        patch: p,
                        side: s,
                        frame: Dihedral::for_side(s, false),
                        vertices: [0, 0],
                    });
                }
            }
        }

        // vertices: union-find over patch corners
        let node = |p: usize, c: Corner| 4 * p + c.index();
        let mut parent: Vec<usize> = (0..4 * np).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let n = parent[y];
                parent[y] = r;
                y = n;
            }
            r
        }
        for sp in &specs {
            let (a0, a1) = sp.side_a.corners();
            let (b0, b1) = sp.side_b.corners();
            let (b0, b1) = if sp.reversed { (b1, b0) } else { (b0, b1) };
            for (ca, cb) in [(a0, b0), (a1, b1)] {
                let ra = find(&mut parent, node(sp.patch_a, ca));
                let rb = find(&mut parent, node(sp.patch_b, cb));
                parent[ra] = rb;
            }
        }
        let mut root_id = std::collections::BTreeMap::new();
        let mut corner_vertex = vec![[0usize; 4]; np];
        for p in 0..np {
            for c in Corner::ALL {
                let r = find(&mut parent, node(p, c));
                let next = root_id.len();
                let id = *root_id.entry(r).or_insert(next);
                corner_vertex[p][c.index()] = id;
            }
        }
        let nv = root_id.len();
        let mut members: Vec<Vec<(usize, Corner)>> = vec![Vec::new(); nv];
        for p in 0..np {
            for c in Corner::ALL {
                members[corner_vertex[p][c.index()]].push((p, c));
            }
        }
        let mut vertices = Vec::with_capacity(nv);
        for (id, mem) in members.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            for (p, _) in mem {
                if !seen.insert(*p) {
                    return Err(GeometryError::Topology(format!("patch {p} meets vertex {id} twice")));
                }
            }
            let fan = order_fan(mem, &link, &side_edge)?;
            let boundary = matches!(fan[0].prev, EdgeRef::Boundary(_));
            let (p0, c0) = (fan[0].patch, fan[0].corner);
            let cp = c0.point();
            vertices.push(Vertex { id, point: patches[p0].point(cp), boundary, fan });
        }
        for e in inner_edges.iter_mut() {
            let (p, f) = (e.patches[0], e.frames[0]);
            e.vertices = [
                corner_vertex[p][Corner::from_point(f.apply(0.0, 0.0)).index()],
                corner_vertex[p][Corner::from_point(f.apply(0.0, 1.0)).index()],
            ];
        }
        for e in boundary_edges.iter_mut() {
            let (c0, c1) = e.side.corners();
            e.vertices = [corner_vertex[e.patch][c0.index()], corner_vertex[e.patch][c1.index()]];
        }
        Ok(MultiPatchDomain {
            name: name.to_string(),
            patches,
            specs,
            inner_edges,
            boundary_edges,
            vertices,
            gluing,
            side_edge,
            corner_vertex,
        })
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    /// Inner-edge configuration of a patch. A single patch treats all four
    /// sides as inner so that the mixed-degree space is used throughout.
    pub fn patch_flags(&self, p: usize) -> EdgeFlags {
        if self.patches.len() == 1 {
            return EdgeFlags::from_sides(&Side::ALL);
        }
        let sides: Vec<Side> =
            Side::ALL.into_iter().filter(|s| matches!(self.side_edge[p][s.index()], EdgeRef::Inner(_))).collect();
        EdgeFlags::from_sides(&sides)
    }

    pub fn vertex_of(&self, p: usize, c: Corner) -> &Vertex {
        &self.vertices[self.corner_vertex[p][c.index()]]
    }

    pub fn jet(&self, patch: usize, x: (f64, f64), order: usize) -> GeomJet {
        self.patches[patch].jet(x, order)
    }

    pub fn gluing(&self, edge: usize) -> &GluingData {
        &self.gluing[edge]
    }

    /// Bounding box [xmin, ymin, xmax, ymax] of sampled patch boundaries.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &self.patches {
            for s in Side::ALL {
                for t in 0..=20 {
                    let q = p.point(s.point(t as f64 / 20.0));
                    b[0] = b[0].min(q[0]);
                    b[1] = b[1].min(q[1]);
                    b[2] = b[2].max(q[0]);
                    b[3] = b[3].max(q[1]);
                }
            }
        }
        b
    }
}

fn frame_det(p: &Patch, f: &Dihedral, v: f64) -> f64 {
    p.jet(f.apply(0.0, v), 1).in_frame(f).det()
}

fn compute_gluing(patches: &[Patch], e: &InnerEdge) -> Result<GluingData, GeometryError> {
    let d = |t: usize, v: f64| frame_det(&patches[e.patches[t]], &e.frames[t], v);
    let beta = |t: usize, v: f64| {
        let j = patches[e.patches[t]].jet(e.frames[t].apply(0.0, v), 1).in_frame(&e.frames[t]);
        let (a, b) = (j.get(1, 0), j.get(0, 1));
        (a[0] * b[0] + a[1] * b[1]) / (b[0] * b[0] + b[1] * b[1])
    };
    let mut lin_d = [Linear { at0: 0.0, at1: 0.0 }; 2];
    let mut lin_b = lin_d;
    for t in 0..2 {
        lin_d[t] = Linear { at0: d(t, 0.0), at1: d(t, 1.0) };
        lin_b[t] = Linear { at0: beta(t, 0.0), at1: beta(t, 1.0) };
        for i in 0..=20 {
            let v = i as f64 / 20.0;
            let rd = (d(t, v) - lin_d[t].eval(v)).abs();
            if rd > LINEAR_TOL {
                return Err(GeometryError::NotBilinearLike { edge: e.id, what: "det JF", residual: rd });
            }
            let rb = (beta(t, v) - lin_b[t].eval(v)).abs();
            if rb > LINEAR_TOL {
                return Err(GeometryError::NotBilinearLike { edge: e.id, what: "beta", residual: rb });
            }
        }
    }
    let int = |l: &Linear| 0.5 * (l.at0 + l.at1);
    let int_sq = |l: &Linear| (l.at0 * l.at0 + l.at0 * l.at1 + l.at1 * l.at1) / 3.0;
    let lambda = (int(&lin_d[1]) - int(&lin_d[0])) / (int_sq(&lin_d[0]) + int_sq(&lin_d[1]));
    let alpha = [lin_d[0].scaled(lambda), lin_d[1].scaled(lambda)];
    let ok = lambda > 0.0
        && [0.0, 0.5, 1.0].iter().all(|&v| alpha[0].eval(v) < 0.0 && alpha[1].eval(v) > 0.0);
    if !ok {
        return Err(GeometryError::Orientation { edge: e.id, lambda });
    }
    Ok(GluingData { lambda, alpha, beta: lin_b })
}

fn order_fan(
    mem: &[(usize, Corner)],
    link: &[[Option<(usize, Side, bool)>; 4]],
    side_edge: &[[EdgeRef; 4]],
) -> Result<Vec<FanEntry>, GeometryError> {
    // move across side `s` of patch p at corner c
    let cross = |p: usize, c: Corner, s: Side| -> Option<(usize, Corner, Side)> {
        let (q, t, rev) = link[p][s.index()]?;
        let (s0, _) = s.corners();
        let at_start = c == s0;
        let (t0, t1) = t.corners();
        let c2 = if at_start != rev { t0 } else { t1 };
        Some((q, c2, t))
    };
    let other = |c: Corner, s: Side| if c.sides()[0] == s { c.sides()[1] } else { c.sides()[0] };
    let start = mem
        .iter()
        .copied()
        .filter(|&(p, c)| c.sides().iter().any(|s| link[p][s.index()].is_none()))
        .min()
        .or_else(|| mem.iter().copied().min())
        .unwrap();
    let (p0, c0) = start;
    let boundary_side = c0.sides().into_iter().find(|s| link[p0][s.index()].is_none());
    let mut prev_side = boundary_side.unwrap_or(c0.sides()[1]);
    let (mut p, mut c) = (p0, c0);
    let mut fan = Vec::new();
    loop {
        let next_side = other(c, prev_side);
        fan.push(FanEntry {
            patch: p,
            corner: c,
            frame: Dihedral::for_corner(c, next_side),
            next: side_edge[p][next_side.index()],
            prev: side_edge[p][prev_side.index()],
        });
        match cross(p, c, next_side) {
            None => break,
            Some((q, c2, t)) => {
                if (q, c2) == (p0, c0) {
                    break;
                }
                if fan.len() > mem.len() {
                    return Err(GeometryError::Topology("vertex fan does not close".into()));
                }
                p = q;
                c = c2;
                prev_side = t;
            }
        }
    }
    if fan.len() != mem.len() {
        return Err(GeometryError::Topology(format!(
            "vertex fan visits {} of {} patch corners",
            fan.len(),
            mem.len()
        )));
    }
    Ok(fan)
}

/// Names of the built-in domains.
pub const BUILTIN_NAMES: [&str; 6] = ["A", "B", "C", "D", "F", "G"];

fn star_domain(name: &str, xi: &[Point2]) -> Result<MultiPatchDomain, GeometryError> {
    // F^(i) = Ξ0(1−ξ1)(1−ξ2) + Ξ_{2i+1}(1−ξ1)ξ2 + Ξ_{2i+2}ξ1ξ2 + Ξ_{2i+3}ξ1(1−ξ2), Ξ_{2n+1} = Ξ1
    let n = (xi.len() - 1) / 2;
    let at = |j: usize| xi[if j == 2 * n + 1 { 1 } else { j }].clone();
    let patches = (0..n)
        .map(|i| Patch::bilinear(i, at(0), at(2 * i + 3), at(2 * i + 2), at(2 * i + 1)))
        .collect();
    let specs = (0..n)
        .map(|i| EdgeSpec {
            patch_a: i,
            side_a: Side::Bottom,
            patch_b: (i + 1) % n,
            side_b: Side::Left,
            reversed: false,
        })
        .collect();
    MultiPatchDomain::new(name, patches, specs)
}

pub fn builtin(name: &str) -> Result<MultiPatchDomain, GeometryError> {
    match name {
        "A" => {
            let p = Patch::bilinear(
                0,
                pt((3, 4), (3, 4)),
                pt((15, 4), (9, 4)),
                pt((3, 1), (3, 1)),
                pt((21, 20), (27, 10)),
            );
            MultiPatchDomain::new("A", vec![p], vec![])
        }
        "B" => star_domain(
            "B",
            &[
                pt((12, 1), (8, 1)),
                pt((14, 1), (44, 5)),
                pt((61, 5), (109, 10)),
                pt((10, 1), (91, 10)),
                pt((87, 10), (36, 5)),
                pt((111, 10), (6, 1)),
                pt((71, 5), (13, 2)),
            ],
        ),
        "C" => star_domain(
            "C",
            &[
                pt((14, 5), (3, 1)),
                pt((31, 10), (4, 1)),
                pt((14, 5), (26, 5)),
                pt((5, 2), (4, 1)),
                pt((1, 1), (7, 5)),
                pt((1, 1), (1, 1)),
                pt((17, 10), (9, 10)),
                pt((14, 5), (11, 10)),
                pt((39, 10), (9, 10)),
                pt((23, 5), (1, 1)),
                pt((23, 5), (7, 5)),
            ],
        ),
        "D" => {
            let net = vec![
                pt((18, 5), (36, 5)),
                pt((6, 1), (39, 5)),
                pt((42, 5), (36, 5)),
                pt((21, 5), (6, 1)),
                pt((6, 1), (6, 1)),
                pt((39, 5), (6, 1)),
                pt((18, 5), (24, 5)),
                pt((6, 1), (21, 5)),
                pt((42, 5), (24, 5)),
            ];
            let p = Patch::new(0, Mapping::Spline { degree: 2, regularity: 1, k: 0, net })?;
            MultiPatchDomain::new("D", vec![p], vec![])
        }
        "E" => Err(GeometryError::External("E".into())),
        "F" => {
            let mut patches = Vec::new();
            for (i, net) in domain_f::NETS.iter().enumerate() {
                let net = net
                    .iter()
                    .map(|[x, y]| Ok([Number::parse(x)?, Number::parse(y)?]))
                    .collect::<Result<Vec<_>, GeometryError>>()?;
                patches.push(Patch::new(i, Mapping::Spline { degree: 5, regularity: 4, k: 3, net })?);
            }
            let specs = (0..5)
                .map(|i| EdgeSpec {
                    patch_a: i,
                    side_a: Side::Left,
                    patch_b: (i + 1) % 5,
                    side_b: Side::Bottom,
                    reversed: false,
                })
                .collect();
            MultiPatchDomain::new("F", patches, specs)
        }
        "G" => {
            let xi = [
                pt((3, 1), (3, 1)),
                pt((3, 1), (6, 1)),
                pt((1, 1), (6, 1)),
                pt((1, 1), (1, 1)),
                pt((7, 1), (1, 1)),
                pt((7, 1), (3, 1)),
            ];
            let at = |j: usize| xi[j].clone();
            let patches = (0..2)
                .map(|i| Patch::bilinear(i, at(0), at(2 * i + 3), at(2 * i + 2), at(2 * i + 1)))
                .collect();
            let specs =
                vec![EdgeSpec { patch_a: 0, side_a: Side::Bottom, patch_b: 1, side_b: Side::Left, reversed: false }];
            MultiPatchDomain::new("G", patches, specs)
        }
        other => Err(GeometryError::Unknown(other.to_string())),
    }
}

/// The identity map on the unit square as a one-patch domain.
pub fn unit_square() -> MultiPatchDomain {
    let p = Patch::bilinear(0, pt((0, 1), (0, 1)), pt((1, 1), (0, 1)), pt((1, 1), (1, 1)), pt((0, 1), (1, 1)));
    MultiPatchDomain::new("unit", vec![p], vec![]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_a_corner() {
        let d = builtin("A").unwrap();
        assert_eq!(d.patches[0].point((0.0, 0.0)), [0.75, 0.75]);
        let j = d.jet(0, (0.3, 0.8), 3);
        assert_eq!(j.get(2, 0), [0.0, 0.0]);
        assert_eq!(j.get(0, 3), [0.0, 0.0]);
    }

    #[test]
    fn star_topology() {
        let b = builtin("B").unwrap();
        assert_eq!(b.patch_count(), 3);
        assert_eq!(b.inner_edges.len(), 3);
        let mut val: Vec<(bool, usize)> = b.vertices.iter().map(|v| (v.boundary, v.valency())).collect();
        val.sort();
        assert_eq!(val, vec![(false, 3), (true, 1), (true, 1), (true, 1), (true, 2), (true, 2), (true, 2)]);
        let g = builtin("G").unwrap();
        assert_eq!(g.inner_edges.len(), 1);
        assert_eq!(g.boundary_edges.len(), 6);
        let mut v: Vec<usize> = g.vertices.iter().map(|v| v.valency()).collect();
        v.sort();
        assert_eq!(v, vec![1, 1, 1, 1, 2, 2]);
        let c = builtin("C").unwrap();
        assert!(c.vertices.iter().any(|v| !v.boundary && v.valency() == 5));
    }

    #[test]
    fn domain_f_loads() {
        let f = builtin("F").unwrap();
        assert_eq!(f.inner_edges.len(), 5);
        assert_eq!(f.patches[0].point((0.0, 0.0)), [0.0, 0.0]);
        assert!(f.vertices.iter().any(|v| !v.boundary && v.valency() == 5));
    }

    #[test]
    fn domain_e_is_external() {
        assert!(matches!(builtin("E"), Err(GeometryError::External(_))));
    }

    #[test]
    fn number_parsing() {
        assert_eq!(Number::parse("3/4").unwrap(), Number::ratio(3, 4));
        assert_eq!(Number::parse("-7").unwrap().value(), -7.0);
        assert_eq!(Number::parse("0.25").unwrap(), Number::Float(0.25));
        assert!(Number::parse("1/0").is_err());
        assert_eq!(Number::ratio(6, 4).to_text(), "3/2");
    }
}
