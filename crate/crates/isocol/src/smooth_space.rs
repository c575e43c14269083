//! The C^s-smooth mixed-degree space W^s on a multi-patch domain, built as
//! the direct sum of patch, edge and vertex subspaces.
//!
//! Every basis function is stored per patch, either as a product of two
//! univariate mixed-space factors or as a dense block of coefficients in the
//! S^{p2,s} ⊗ S^{p2,s} tensor basis. Both live in patch coordinates.

use crate::geometry::{EdgeRef, GeometryError, Linear, MultiPatchDomain};
use crate::mixed_space::{
    canonical_basis, map_factors, Corner, Dihedral, Factor, Factors, MixedError, UniRows, Variant,
};
use crate::scalar::binom;
use crate::spline_kernel::{bernstein, SplineCoeffs1D, UnivariateSpace};
use faer::Mat;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothError {
    #[error("k={k} too small for s={s} on this domain (need k >= {need})")]
    TooCoarse { s: usize, k: usize, need: usize },
    #[error("vertex {vertex}: ambiguous numerical rank (singular values near {sigma:e})")]
    RankAmbiguous { vertex: usize, sigma: f64 },
    #[error("vertex {vertex}: {msg}")]
    Vertex { vertex: usize, msg: String },
    #[error("edge index ({j1}, {j2}) out of range")]
    Index { j1: usize, j2: usize },
    #[error(transparent)]
    Mixed(#[from] MixedError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Dense coefficients c[(i - i0) * nj + (j - j0)] of N^{p2}_i(ξ1) N^{p2}_j(ξ2).
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub i0: usize,
    pub j0: usize,
    pub ni: usize,
    pub nj: usize,
    pub c: Vec<f64>,
}

impl Block {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.i0 || j < self.j0 || i >= self.i0 + self.ni || j >= self.j0 + self.nj {
            0.0
        } else {
            self.c[(i - self.i0) * self.nj + j - self.j0]
        }
    }

    fn from_map(m: &BTreeMap<(usize, usize), f64>) -> Option<Block> {
        let nz: Vec<_> = m.iter().filter(|(_, v)| **v != 0.0).collect();
        if nz.is_empty() {
            return None;
        }
        let i0 = nz.iter().map(|((i, _), _)| *i).min().unwrap();
        let i1 = nz.iter().map(|((i, _), _)| *i).max().unwrap();
        let j0 = nz.iter().map(|((_, j), _)| *j).min().unwrap();
        let j1 = nz.iter().map(|((_, j), _)| *j).max().unwrap();
        let (ni, nj) = (i1 - i0 + 1, j1 - j0 + 1);
        let mut c = vec![0.0; ni * nj];
        for ((i, j), v) in nz {
            c[(i - i0) * nj + j - j0] = *v;
        }
        Some(Block { i0, j0, ni, nj, c })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Tensor { coef: f64, x: Factor, y: Factor },
    Block(Block),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub patch: usize,
    pub piece: Piece,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Patch(usize),
    InnerEdge(usize),
    BoundaryEdge(usize),
    Vertex(usize),
}

impl Origin {
    pub fn kind(&self) -> &'static str {
        match self {
            Origin::Patch(_) => "patch",
            Origin::InnerEdge(_) => "inner_edge",
            Origin::BoundaryEdge(_) => "boundary_edge",
            Origin::Vertex(_) => "vertex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBasisFunction {
    pub id: usize,
    pub origin: Origin,
    pub terms: Vec<Term>,
}

impl SmoothBasisFunction {
    pub fn patches(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().map(|t| t.patch).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Function values and derivatives at one point of one patch:
/// `vals[(f * (m+1) + d1) * (m+1) + d2]` is ∂^{(d1,d2)} of `fns[f]`.
#[derive(Debug, Clone, Default)]
pub struct LocalEval {
    pub m: usize,
    pub fns: Vec<usize>,
    pub vals: Vec<f64>,
}

impl LocalEval {
    pub fn get(&self, f: usize, d1: usize, d2: usize) -> f64 {
        self.vals[(f * (self.m + 1) + d1) * (self.m + 1) + d2]
    }
}

/// A spline on one patch as a sum of a degree-p1 and a degree-p2 tensor spline.
#[derive(Debug, Clone)]
pub struct PatchTensor {
    pub n1: usize,
    pub n2: usize,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl PatchTensor {
    /// ∂^{(d1,d2)} at the point of the rows, as a (m+1) × (m+1) table.
    pub fn eval(&self, rx: &UniRows, ry: &UniRows) -> Vec<f64> {
        let m = rx.nd;
        let w = m + 1;
        let mut out = vec![0.0; w * w];
        let p1 = rx.low.len() / w;
        let p2 = rx.high.len() / w;
        for (first, vals, n, p, a, b) in [
            (rx.low_first, &self.low, self.n1, p1, &rx.low, (&ry.low, ry.low_first)),
            (rx.high_first, &self.high, self.n2, p2, &rx.high, (&ry.high, ry.high_first)),
        ] {
            let (bv, bf) = b;
            for d2 in 0..=m {
                // contract the second index first
                let mut t = vec![0.0; p];
                for (ii, ti) in t.iter_mut().enumerate() {
                    let row = &vals[(first + ii) * n + bf..(first + ii) * n + bf + p];
                    *ti = row.iter().zip(&bv[d2 * p..(d2 + 1) * p]).map(|(x, y)| x * y).sum();
                }
                for d1 in 0..=m {
                    out[d1 * w + d2] += t.iter().zip(&a[d1 * p..(d1 + 1) * p]).map(|(x, y)| x * y).sum::<f64>();
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SmoothSpace {
    pub s: usize,
    pub k: usize,
    pub factors: Factors,
    pub basis: Vec<SmoothBasisFunction>,
    /// counts per origin kind: patch, inner edge, boundary edge, vertex
    pub counts: [usize; 4],
    /// per patch, per element (ex * (k+1) + ey): (function, term) pairs
    index: Vec<Vec<Vec<(u32, u32)>>>,
}

/// One side of an inner edge in a frame where the edge is u = 0.
#[derive(Debug, Clone, Copy)]
pub struct EdgeSide {
    pub patch: usize,
    pub frame: Dihedral,
    pub alpha: Linear,
    pub beta: Linear,
}

/// Both sides of inner edge `e`, with v reversed if `reversed`.
pub fn edge_sides(dom: &MultiPatchDomain, e: usize, reversed: bool) -> [EdgeSide; 2] {
    let edge = &dom.inner_edges[e];
    let g = dom.gluing(e);
    let side = |t: usize| {
        let mut frame = edge.frames[t];
        let (mut alpha, mut beta) = (g.alpha[t], g.beta[t]);
        if reversed {
            frame.flip_v = !frame.flip_v;
            alpha = alpha.reversed().scaled(-1.0);
            beta = beta.reversed().scaled(-1.0);
        }
        EdgeSide { patch: edge.patches[t], frame, alpha, beta }
    };
    [side(0), side(1)]
}

/// Sides of inner edge `e` oriented so that v = 0 lies at `vertex`.
fn edge_sides_from(dom: &MultiPatchDomain, e: usize, vertex: usize) -> [EdgeSide; 2] {
    let rev = dom.inner_edges[e].vertices[0] != vertex;
    edge_sides(dom, e, rev)
}

/// Builder of the edge functions in the frame of one edge side.
#[derive(Debug, Clone)]
pub struct EdgeFunctions {
    s: usize,
    h: f64,
    high: UnivariateSpace,
    trace: Vec<UnivariateSpace>,
    /// M_ℓ coefficients on indices 0..=s
    m: Vec<Vec<f64>>,
}

/// Coefficients in a frame: rows u-index 0..=s, columns v-index from `j0`.
#[derive(Debug, Clone)]
pub struct FrameBlock {
    pub j0: usize,
    pub nj: usize,
    pub c: Vec<f64>,
}

impl FrameBlock {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        if b < self.j0 || b >= self.j0 + self.nj {
            0.0
        } else {
            self.c[a * self.nj + b - self.j0]
        }
    }
}

impl EdgeFunctions {
    pub fn new(fac: &Factors) -> Result<EdgeFunctions, SmoothError> {
        let (s, k) = (fac.s, fac.k);
        let p2 = fac.p2();
        let h = 1.0 / (k as f64 + 1.0);
        let trace = (0..=s)
            .map(|j1| UnivariateSpace::new(p2 - j1, 2 * s - j1, k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(MixedError::from)?;
        let m = (0..=s)
            .map(|l| {
                let fall: f64 = (0..l).map(|r| (p2 - r) as f64).product();
                (0..=s).map(|j| if j < l { 0.0 } else { binom(j, l) * h.powi(l as i32) / fall }).collect()
            })
            .collect();
        Ok(EdgeFunctions { s, h, high: fac.high.clone(), trace, m })
    }

    pub fn trace_dim(&self, j1: usize) -> usize {
        self.trace[j1].dim()
    }

    /// β^{ℓ−j1} α^{j1} ∂^{ℓ−j1} N_{j2}^{p2−j1,2s−j1} in S^{p2,s}.
    fn g(&self, side: &EdgeSide, j1: usize, j2: usize, l: usize) -> SplineCoeffs1D<f64> {
        let t = &self.trace[j1];
        let (ea, eb) = t.support_elements(j2);
        let pieces: Vec<Vec<f64>> = (ea..=eb)
            .map(|e| {
                let mut b: Vec<f64> = t.bezier_piece(j2, e);
                for _ in j1..l {
                    b = bernstein::derivative(&b, self.h);
                }
                let x0 = e as f64 * self.h;
                let x1 = x0 + self.h;
                let al = [side.alpha.eval(x0), side.alpha.eval(x1)];
                let be = [side.beta.eval(x0), side.beta.eval(x1)];
                for _ in 0..j1 {
                    b = bernstein::multiply(&b, &al);
                }
                for _ in j1..l {
                    b = bernstein::multiply(&b, &be);
                }
                b
            })
            .collect();
        self.high.from_local_pieces(ea, &pieces)
    }

    /// f_{Γ;j1,j2} for one side, in that side's edge frame.
    pub fn frame_block(&self, side: &EdgeSide, j1: usize, j2: usize) -> Result<FrameBlock, SmoothError> {
        if j1 > self.s || j2 >= self.trace_dim(j1) {
            return Err(SmoothError::Index { j1, j2 });
        }
        let p2 = self.high.degree();
        let gamma: f64 = (0..j1).map(|r| (p2 - r) as f64).product::<f64>() / self.h.powi(j1 as i32);
        let gs: Vec<(usize, SplineCoeffs1D<f64>)> = (j1..=self.s).map(|l| (l, self.g(side, j1, j2, l))).collect();
        let j0 = gs.iter().filter(|(_, g)| !g.vals.is_empty()).map(|(_, g)| g.first).min().unwrap_or(0);
        let jl = gs.iter().filter(|(_, g)| !g.vals.is_empty()).map(|(_, g)| g.last()).max().unwrap_or(0);
        let nj = jl + 1 - j0;
        let mut c = vec![0.0; (self.s + 1) * nj];
        for (l, g) in &gs {
            let w = gamma * binom(*l, j1);
            for a in 0..=self.s {
                let ma = self.m[*l][a];
                if ma == 0.0 {
                    continue;
                }
                for (q, gv) in g.vals.iter().enumerate() {
                    c[a * nj + g.first + q - j0] += w * ma * gv;
                }
            }
        }
        Ok(FrameBlock { j0, nj, c })
    }
}

fn frame_to_patch(fb: &FrameBlock, frame: &Dihedral, n2: usize, scale: f64, acc: &mut BTreeMap<(usize, usize), f64>) {
    for a in 0..fb.c.len() / fb.nj.max(1) {
        for q in 0..fb.nj {
            let v = fb.c[a * fb.nj + q];
            if v != 0.0 {
                *acc.entry(frame.apply_index(a, fb.j0 + q, n2)).or_insert(0.0) += scale * v;
            }
        }
    }
}

/// Per-patch accumulation of block coefficients and tensor terms.
#[derive(Default)]
struct TermAccum {
    blocks: BTreeMap<usize, BTreeMap<(usize, usize), f64>>,
    tensors: Vec<Term>,
}

impl TermAccum {
    fn frame_block(&mut self, patch: usize, fb: &FrameBlock, frame: &Dihedral, n2: usize, scale: f64) {
        frame_to_patch(fb, frame, n2, scale, self.blocks.entry(patch).or_default());
    }

    fn tensor(&mut self, fac: &Factors, patch: usize, frame: &Dihedral, u: Factor, v: Factor, coef: f64) {
        let (x, y) = map_factors(fac, frame, u, v);
        match (x, y) {
            (Factor::High(i), Factor::High(j)) => {
                *self.blocks.entry(patch).or_default().entry((i, j)).or_insert(0.0) += coef;
            }
            _ => self.tensors.push(Term { patch, piece: Piece::Tensor { coef, x, y } }),
        }
    }

    fn finish(self) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .blocks
            .iter()
            .filter_map(|(p, m)| Block::from_map(m).map(|b| Term { patch: *p, piece: Piece::Block(b) }))
            .collect();
        out.extend(self.tensors);
        out
    }
}

struct Builder<'a> {
    dom: &'a MultiPatchDomain,
    fac: Factors,
    edge: EdgeFunctions,
    s: usize,
    n1: usize,
    n2: usize,
    out: Vec<(Origin, Vec<Term>)>,
}

fn tensor_term(fac: &Factors, patch: usize, frame: &Dihedral, u: Factor, v: Factor) -> Term {
    let (x, y) = map_factors(fac, frame, u, v);
    Term { patch, piece: Piece::Tensor { coef: 1.0, x, y } }
}

impl<'a> Builder<'a> {
    fn tr(&self, j: usize) -> Factor {
        self.fac.normalize(Factor::Trunc(j))
    }

    fn push_tensor(&mut self, origin: Origin, patch: usize, frame: &Dihedral, u: Factor, v: Factor) {
        let t = tensor_term(&self.fac, patch, frame, u, v);
        self.out.push((origin, vec![t]));
    }

    fn patch_subspace(&mut self, p: usize) -> Result<(), SmoothError> {
        let flags = self.dom.patch_flags(p);
        let (variant, frame) = Variant::classify(&flags)?;
        let origin = Origin::Patch(p);
        if self.dom.patch_count() == 1 {
            for (_, u, v) in canonical_basis(variant, &self.fac) {
                self.push_tensor(origin, p, &frame, u, v);
            }
            return Ok(());
        }
        let (s, n1) = (self.s, self.n1);
        let mid: Vec<usize> = (s + 1..n1 - s - 1).collect();
        let ends: Vec<usize> = (1..=s).chain(n1 - s - 1..n1 - 1).collect();
        let inner_all: Vec<usize> = (1..n1 - 1).collect();
        let lo: Vec<usize> = (1..=s).collect();
        let lo_wide: Vec<usize> = (1..n1 - s - 1).collect();
        let mut sets: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        match variant {
            Variant::Four => {
                sets.push((ends.clone(), inner_all));
                sets.push((mid.clone(), ends));
            }
            Variant::Three => {
                sets.push((lo, inner_all));
                sets.push((mid.clone(), ends));
            }
            Variant::TwoAdjacent => {
                sets.push((lo.clone(), lo_wide));
                sets.push((mid.clone(), lo));
            }
            Variant::TwoOpposite => sets.push((mid.clone(), ends)),
            Variant::One => sets.push((mid.clone(), lo)),
        }
        for &a in &mid {
            for &b in &mid {
                self.push_tensor(origin, p, &frame, Factor::Low(a), Factor::Low(b));
            }
        }
        for (aa, bb) in sets {
            for &a in &aa {
                for &b in &bb {
                    let (u, v) = (self.tr(a), self.tr(b));
                    self.push_tensor(origin, p, &frame, u, v);
                }
            }
        }
        Ok(())
    }

    fn inner_edge_subspace(&mut self, e: usize) -> Result<(), SmoothError> {
        let sides = edge_sides(self.dom, e, false);
        let k = self.fac.k;
        for j1 in 0..=self.s {
            for j2 in 2 * self.s + 1 - j1..=k {
                let terms = self.edge_pair(&sides, j1, j2, 1.0)?;
                self.out.push((Origin::InnerEdge(e), terms));
            }
        }
        Ok(())
    }

    fn edge_pair(&self, sides: &[EdgeSide; 2], j1: usize, j2: usize, scale: f64) -> Result<Vec<Term>, SmoothError> {
        let mut acc = TermAccum::default();
        for sd in sides {
            let fb = self.edge.frame_block(sd, j1, j2)?;
            acc.frame_block(sd.patch, &fb, &sd.frame, self.n2, scale);
        }
        Ok(acc.finish())
    }

    fn valency(&self, v: usize) -> usize {
        self.dom.vertices[v].valency()
    }

    fn boundary_edge_subspace(&mut self, b: usize) {
        let dom = self.dom;
        let be = &dom.boundary_edges[b];
        let (s, n1) = (self.s, self.n1);
        let v1 = [self.valency(be.vertices[0]) == 1, self.valency(be.vertices[1]) == 1];
        let origin = Origin::BoundaryEdge(b);
        let p = be.patch;
        let mut frame = be.frame;
        let mut list: Vec<(Factor, Factor)> = Vec::new();
        let low = Factor::Low;
        match v1 {
            [true, true] => {
                for j1 in 0..=s {
                    for j2 in 2 * s + 1 - j1..=n1 + j1 - (2 * s + 2) {
                        list.push((low(j1), low(j2)));
                    }
                }
            }
            [true, false] | [false, true] => {
                if v1[1] {
                    frame.flip_v = !frame.flip_v;
                }
                for j1 in 0..=s {
                    for j2 in 2 * s + 1 - j1..=n1 - s - 2 {
                        list.push((low(j1), low(j2)));
                    }
                }
                for j1 in 1..=s {
                    for j2 in n1 - s - 1..=n1 + j1 - s - 2 {
                        list.push((low(j1), self.tr(j2)));
                    }
                }
            }
            [false, false] => {
                for j1 in 0..=s {
                    for j2 in s + 1..=n1 - s - 2 {
                        list.push((low(j1), low(j2)));
                    }
                }
                for j1 in 1..=s {
                    for j2 in (s + 1 - j1..=s).chain(n1 - s - 1..=n1 + j1 - s - 2) {
                        list.push((low(j1), self.tr(j2)));
                    }
                }
            }
        }
        for (u, v) in list {
            self.push_tensor(origin, p, &frame, u, v);
        }
    }

    fn vertex_subspace(&mut self, v: usize) -> Result<(), SmoothError> {
        let dom = self.dom;
        let vert = &dom.vertices[v];
        let s = self.s;
        let origin = Origin::Vertex(v);
        match vert.valency() {
            1 => {
                let f = &vert.fan[0];
                for j1 in 0..=2 * s {
                    for j2 in 0..=2 * s - j1 {
                        self.push_tensor(origin, f.patch, &f.frame, Factor::Low(j1), Factor::Low(j2));
                    }
                }
                Ok(())
            }
            2 if vert.boundary => {
                let e = match (vert.fan[0].next, vert.fan[1].prev) {
                    (EdgeRef::Inner(e), EdgeRef::Inner(e2)) if e == e2 => e,
                    _ => return Err(SmoothError::Vertex { vertex: v, msg: "valency-2 fan without inner edge".into() }),
                };
                let sides = edge_sides_from(self.dom, e, v);
                for j1 in 0..=s {
                    for j2 in 0..=2 * s - j1 {
                        let terms = self.edge_pair(&sides, j1, j2, 1.0)?;
                        self.out.push((origin, terms));
                    }
                }
                for sd in sides {
                    for j1 in 1..=s {
                        for j2 in 0..=s - j1 {
                            let u = self.tr(j1);
                            self.push_tensor(origin, sd.patch, &sd.frame, u, Factor::Low(j2));
                        }
                    }
                }
                Ok(())
            }
            n if n >= 3 => self.vertex_kernel(v),
            n => Err(SmoothError::Vertex { vertex: v, msg: format!("unsupported inner vertex of valency {n}") }),
        }
    }

    /// Vertex functions of valency >= 3 as a kernel basis of the corner
    /// matching conditions.
    fn vertex_kernel(&mut self, v: usize) -> Result<(), SmoothError> {
        let sys = VertexSystem::assemble(self, v)?;
        let kernel = sys.kernel(v)?;
        for row in kernel {
            let mut acc = TermAccum::default();
            for (ci, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                for (patch, frame, what) in &sys.unknowns[ci].parts {
                    match what {
                        Part::Frame(fb) => acc.frame_block(*patch, fb, frame, self.n2, c),
                        Part::Tensor(u, w, sign) => acc.tensor(&self.fac, *patch, frame, *u, *w, *sign * c),
                    }
                }
            }
            self.out.push((Origin::Vertex(v), acc.finish()));
        }
        Ok(())
    }
}

enum Part {
    Frame(FrameBlock),
    Tensor(Factor, Factor, f64),
}

struct Unknown {
    parts: Vec<(usize, Dihedral, Part)>,
}

impl Unknown {
    /// Largest coefficient of the function over all its parts.
    fn size(&self) -> f64 {
        self.parts
            .iter()
            .map(|(_, _, p)| match p {
                Part::Frame(fb) => fb.c.iter().fold(0.0f64, |a, x| a.max(x.abs())),
                Part::Tensor(_, _, c) => c.abs(),
            })
            .fold(0.0, f64::max)
    }
}

/// Linear system of a vertex of valency >= 3: unknowns are edge-function
/// coefficients per incident edge (or the spline families replacing them on
/// boundary edges) and corner coefficients per patch; equations match the
/// (s+1) × (s+1) corner coefficients of all contributions on each patch.
struct VertexSystem {
    unknowns: Vec<Unknown>,
    rows: Vec<Vec<f64>>,
    sizes: Vec<f64>,
}

impl VertexSystem {
    fn assemble(b: &Builder, v: usize) -> Result<VertexSystem, SmoothError> {
        let vert = &b.dom.vertices[v];
        let s = b.s;
        let nu = vert.valency();
        let nc = (s + 1) * (s + 1);
        // per unknown: per fan slot, corner contribution to 'next' (1), 'prev' (0) or patch (2) family
        let mut unknowns = Vec::new();
        let mut corner: Vec<Vec<(usize, usize, Vec<f64>)>> = Vec::new();
        let swap = |c: &[f64]| {
            let mut t = vec![0.0; c.len()];
            for a in 0..=s {
                for bb in 0..=s {
                    t[a * (s + 1) + bb] = c[bb * (s + 1) + a];
                }
            }
            t
        };
        let corner_of = |fb: &FrameBlock| {
            let mut c = vec![0.0; nc];
            for a in 0..=s {
                for bb in 0..=s {
                    c[a * (s + 1) + bb] = fb.get(a, bb);
                }
            }
            c
        };
        for rho in 0..nu {
            let f = &vert.fan[rho];
            let nxt = (rho + 1) % nu;
            match f.next {
                EdgeRef::Inner(e) if vert.boundary && rho == nu - 1 => {
                    return Err(SmoothError::Vertex { vertex: v, msg: format!("fan ends at inner edge {e}") })
                }
                EdgeRef::Inner(e) => {
                    let sides = edge_sides_from(b.dom, e, v);
                    let g = &vert.fan[nxt];
                    // side for patch rho uses its vertex frame, the other its swapped frame
                    let (sa, sb) = if sides[0].patch == f.patch { (sides[0], sides[1]) } else { (sides[1], sides[0]) };
                    if sa.frame != f.frame || sb.patch != g.patch {
                        return Err(SmoothError::Vertex { vertex: v, msg: format!("edge {e} frames do not match fan") });
                    }
                    for j1 in 0..=s {
                        for j2 in 0..=2 * s - j1 {
                            let fa = b.edge.frame_block(&sa, j1, j2)?;
                            let fb = b.edge.frame_block(&sb, j1, j2)?;
                            corner.push(vec![(rho, 1, corner_of(&fa)), (nxt, 0, swap(&corner_of(&fb)))]);
                            unknowns.push(Unknown {
                                parts: vec![(sa.patch, sa.frame, Part::Frame(fa)), (sb.patch, sb.frame, Part::Frame(fb))],
                            });
                        }
                    }
                }
                EdgeRef::Boundary(_) => {
                    if !(vert.boundary && rho == nu - 1) {
                        return Err(SmoothError::Vertex { vertex: v, msg: "boundary edge inside fan".into() });
                    }
                    Self::boundary_family(b, rho, f.patch, f.frame, 1, &mut unknowns, &mut corner, &corner_of);
                }
            }
        }
        if vert.boundary {
            let f = &vert.fan[0];
            let sw = f.frame.compose(&Dihedral { swap: true, flip_u: false, flip_v: false });
            debug_assert!(sw.apply_corner(Corner::BL) == f.corner);
            Self::boundary_family(b, 0, f.patch, sw, 0, &mut unknowns, &mut corner, &|fb: &FrameBlock| swap(&corner_of(fb)));
        }
        for (rho, f) in vert.fan.iter().enumerate() {
            for a in 0..=s {
                for bb in 0..=s {
                    let mut c = vec![0.0; nc];
                    c[a * (s + 1) + bb] = 1.0;
                    corner.push(vec![(rho, 2, c)]);
                    unknowns.push(Unknown {
                        parts: vec![(f.patch, f.frame, Part::Tensor(Factor::High(a), Factor::High(bb), -1.0))],
                    });
                }
            }
        }
        // equations: next − prev = 0 and next − patch = 0 per corner coefficient
        let n = unknowns.len();
        let sizes: Vec<f64> = unknowns.iter().map(Unknown::size).collect();
        let mut rows = Vec::new();
        for rho in 0..nu {
            for q in 0..nc {
                for other in [0usize, 2] {
                    let mut r = vec![0.0; n];
                    for (ci, contrib) in corner.iter().enumerate() {
                        for (rr, fam, c) in contrib {
                            if *rr != rho {
                                continue;
                            }
                            if *fam == 1 {
                                r[ci] += c[q];
                            } else if *fam == other {
                                r[ci] -= c[q];
                            }
                        }
                    }
                    // corner entries that vanish in exact arithmetic come out as rounding noise
                    for (x, sz) in r.iter_mut().zip(&sizes) {
                        if x.abs() < 1e-12 * sz {
                            *x = 0.0;
                        }
                    }
                    rows.push(r);
                }
            }
        }
        Ok(VertexSystem { unknowns, rows, sizes })
    }

    /// Plain spline family replacing edge functions on a boundary edge at a
    /// boundary vertex. `frame` is the edge frame (u transversal, v = 0 at
    /// the vertex); `fam` is 1 for the patch's next side, 0 for prev.
    #[allow(clippy::too_many_arguments)]
    fn boundary_family(
        b: &Builder,
        rho: usize,
        patch: usize,
        frame: Dihedral,
        fam: usize,
        unknowns: &mut Vec<Unknown>,
        corner: &mut Vec<Vec<(usize, usize, Vec<f64>)>>,
        corner_of: &dyn Fn(&FrameBlock) -> Vec<f64>,
    ) {
        let s = b.s;
        for j1 in 0..=s {
            for j2 in 0..=s {
                let mut c = vec![0.0; s + 1];
                c[j2] = 1.0;
                let mut fbc = vec![0.0; (s + 1) * (s + 1)];
                fbc[j1 * (s + 1) + j2] = 1.0;
                let fb = FrameBlock { j0: 0, nj: s + 1, c: fbc };
                corner.push(vec![(rho, fam, corner_of(&fb))]);
                unknowns.push(Unknown { parts: vec![(patch, frame, Part::Frame(fb))] });
            }
        }
        for j1 in 0..s {
            for j2 in s + 1..=2 * s - j1 {
                let w = b.fac.normalize(Factor::Trunc(j2 - s));
                corner.push(vec![]);
                unknowns.push(Unknown { parts: vec![(patch, frame, Part::Tensor(Factor::Low(j1), w, 1.0))] });
            }
        }
    }

    /// Kernel basis in reduced row echelon form (one row per basis vector).
    /// Rows and columns are equilibrated first; the basis is returned in the
    /// original unknowns.
    fn kernel(&self, v: usize) -> Result<Vec<Vec<f64>>, SmoothError> {
        let n = self.unknowns.len();
        let m = self.rows.len();
        let amax = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |a, x| a.max(x.abs()));
        let cs: Vec<f64> = self.sizes.iter().map(|&c| if c > 0.0 { 1.0 / c } else { 1.0 }).collect();
        let rs: Vec<f64> = self
            .rows
            .iter()
            .map(|r| {
                let c = amax(&mut r.iter().zip(&cs).map(|(x, s)| x * s));
                if c > 0.0 { 1.0 / c } else { 1.0 }
            })
            .collect();
        let a = Mat::<f64>::from_fn(m, n, |i, j| rs[i] * self.rows[i][j] * cs[j]);
        let svd = a.svd().map_err(|e| SmoothError::Vertex { vertex: v, msg: format!("svd failed: {e:?}") })?;
        let sv: Vec<f64> = (0..m.min(n)).map(|i| svd.S().column_vector()[i]).collect();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-11 * smax;
        let rank = sv.iter().filter(|&&x| x > tol).count();
        if let Some(&x) = sv.iter().find(|&&x| x > tol / 10.0 && x < tol * 10.0) {
            return Err(SmoothError::RankAmbiguous { vertex: v, sigma: x });
        }
        let vm = svd.V();
        let mut basis: Vec<Vec<f64>> = (rank..n).map(|c| (0..n).map(|r| vm[(r, c)]).collect()).collect();
        rref(&mut basis);
        for row in basis.iter_mut() {
            for (x, s) in row.iter_mut().zip(&cs) {
                *x *= s;
            }
        }
        Ok(basis)
    }
}

/// Reduced row echelon form with complete pivoting: each step pivots on the
/// largest remaining entry. Rows come back ordered by pivot column, with
/// unit pivots and zeros in the other rows' pivot columns.
pub fn rref(rows: &mut Vec<Vec<f64>>) {
    let d = rows.len();
    if d == 0 {
        return;
    }
    let n = rows[0].len();
    let mut pivots = Vec::with_capacity(d);
    for r in 0..d {
        let mut best = (r, 0, 0.0);
        for (i, row) in rows.iter().enumerate().skip(r) {
            for (j, x) in row.iter().enumerate() {
                if x.abs() > best.2 {
                    best = (i, j, x.abs());
                }
            }
        }
        let (pi, col, val) = best;
        if val == 0.0 {
            break;
        }
        rows.swap(r, pi);
        let p = rows[r][col];
        for x in rows[r].iter_mut() {
            *x /= p;
        }
        rows[r][col] = 1.0;
        let pr = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pr) {
                        *x -= f * y;
                    }
                    row[col] = 0.0;
                }
            }
        }
        pivots.push(col);
    }
    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let sorted: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
    let mut sorted = sorted;
    for row in sorted.iter_mut() {
        for x in row.iter_mut() {
            if x.abs() < 1e-14 {
                *x = 0.0;
            }
        }
    }
    debug_assert!(sorted.len() <= n);
    *rows = sorted;
}

impl SmoothSpace {
    pub fn build(dom: &MultiPatchDomain, s: usize, k: usize) -> Result<SmoothSpace, SmoothError> {
        let need = Self::min_k(dom, s);
        if k < need {
            return Err(SmoothError::TooCoarse { s, k, need });
        }
        if s != 2 && s != 4 {
            return Err(MixedError::Regularity(s).into());
        }
        let fac = Factors::new(s, k)?;
        let edge = EdgeFunctions::new(&fac)?;
        let (n1, n2) = (fac.n1(), fac.n2());
        let mut b = Builder { dom, fac, edge, s, n1, n2, out: Vec::new() };
        let mut counts = [0usize; 4];
        for p in 0..dom.patch_count() {
            b.patch_subspace(p)?;
        }
        counts[0] = b.out.len();
        if dom.patch_count() > 1 {
            for e in 0..dom.inner_edges.len() {
                b.inner_edge_subspace(e)?;
            }
            counts[1] = b.out.len() - counts[0];
            for e in 0..dom.boundary_edges.len() {
                b.boundary_edge_subspace(e);
            }
            counts[2] = b.out.len() - counts[0] - counts[1];
            for v in 0..dom.vertices.len() {
                b.vertex_subspace(v)?;
            }
            counts[3] = b.out.len() - counts[0] - counts[1] - counts[2];
        }
        let basis: Vec<SmoothBasisFunction> = b
            .out
            .into_iter()
            .enumerate()
            .map(|(id, (origin, terms))| SmoothBasisFunction { id, origin, terms })
            .collect();
        let mut sp = SmoothSpace { s, k, factors: b.fac, basis, counts, index: Vec::new() };
        sp.build_index(dom.patch_count());
        Ok(sp)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Smallest k with nonempty index windows. A boundary edge between two
    /// valency-1 vertices carries their triangular blocks j <= 2s from both
    /// ends of n_{p1} = k + s + 2 functions, which overlap unless k >= 3s.
    pub fn min_k(dom: &MultiPatchDomain, s: usize) -> usize {
        let lonely = dom.patch_count() > 1
            && dom.boundary_edges.iter().any(|b| b.vertices.iter().all(|&v| dom.vertices[v].valency() == 1));
        if lonely {
            3 * s
        } else {
            2 * s + 1
        }
    }

    /// Relative residual of the corner matching conditions for every vertex
    /// function of a vertex of valency >= 3, as (vertex, residual) pairs.
    /// The residual of x is max_i |(Ax)_i| / max_i sum_j |A_ij x_j|.
    pub fn vertex_residuals(dom: &MultiPatchDomain, s: usize, k: usize) -> Result<Vec<(usize, f64)>, SmoothError> {
        let fac = Factors::new(s, k)?;
        let edge = EdgeFunctions::new(&fac)?;
        let (n1, n2) = (fac.n1(), fac.n2());
        let b = Builder { dom, fac, edge, s, n1, n2, out: Vec::new() };
        let mut out = Vec::new();
        for v in 0..dom.vertices.len() {
            if dom.vertices[v].valency() < 3 {
                continue;
            }
            let sys = VertexSystem::assemble(&b, v)?;
            for x in sys.kernel(v)? {
                let (mut num, mut den) = (0.0f64, 0.0f64);
                for r in &sys.rows {
                    num = num.max(r.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().abs());
                    den = den.max(r.iter().zip(&x).map(|(a, b)| (a * b).abs()).sum());
                }
                out.push((v, if den > 0.0 { num / den } else { 0.0 }));
            }
        }
        Ok(out)
    }

    fn elements(&self) -> usize {
        self.k + 1
    }

    fn term_support(&self, piece: &Piece) -> ((usize, usize), (usize, usize)) {
        match piece {
            Piece::Tensor { x, y, .. } => (self.factors.support(*x), self.factors.support(*y)),
            Piece::Block(b) => {
                let hs = &self.factors.high;
                let sx = (hs.support_elements(b.i0).0, hs.support_elements(b.i0 + b.ni - 1).1);
                let sy = (hs.support_elements(b.j0).0, hs.support_elements(b.j0 + b.nj - 1).1);
                (sx, sy)
            }
        }
    }

    fn build_index(&mut self, np: usize) {
        let ne = self.elements();
        let mut index = vec![vec![Vec::new(); ne * ne]; np];
        for f in &self.basis {
            for (ti, t) in f.terms.iter().enumerate() {
                let ((xa, xb), (ya, yb)) = self.term_support(&t.piece);
                for ex in xa..=xb {
                    for ey in ya..=yb {
                        index[t.patch][ex * ne + ey].push((f.id as u32, ti as u32));
                    }
                }
            }
        }
        self.index = index;
    }

    /// Values and derivatives ∂^{(d1,d2)}, d1, d2 <= m, of all functions
    /// that do not vanish identically near `x` on `patch`.
    pub fn eval_local(&self, patch: usize, x: (f64, f64), m: usize) -> LocalEval {
        let fac = &self.factors;
        let rx = UniRows::new(fac, x.0, m);
        let ry = UniRows::new(fac, x.1, m);
        let ne = self.elements();
        let ex = fac.high.element_of(x.0);
        let ey = fac.high.element_of(x.1);
        let list = &self.index[patch][ex * ne + ey];
        let w = (m + 1) * (m + 1);
        let mut out = LocalEval { m, fns: Vec::new(), vals: Vec::new() };
        let mut slot: BTreeMap<u32, usize> = BTreeMap::new();
        let p2 = fac.p2();
        let mut tmp = vec![0.0; (p2 + 1) * (m + 1)];
        for &(f, ti) in list {
            let si = *slot.entry(f).or_insert_with(|| {
                out.fns.push(f as usize);
                out.vals.extend(std::iter::repeat(0.0).take(w));
                out.fns.len() - 1
            });
            let dst = &mut out.vals[si * w..(si + 1) * w];
            match &self.basis[f as usize].terms[ti as usize].piece {
                Piece::Tensor { coef, x, y } => {
                    let vx: Vec<f64> = (0..=m).map(|d| rx.get(fac, *x, d)).collect();
                    let vy: Vec<f64> = (0..=m).map(|d| ry.get(fac, *y, d)).collect();
                    for d1 in 0..=m {
                        for d2 in 0..=m {
                            dst[d1 * (m + 1) + d2] += coef * vx[d1] * vy[d2];
                        }
                    }
                }
                Piece::Block(b) => {
                    let ia = b.i0.max(rx.high_first);
                    let ib = (b.i0 + b.ni).min(rx.high_first + p2 + 1);
                    let ja = b.j0.max(ry.high_first);
                    let jb = (b.j0 + b.nj).min(ry.high_first + p2 + 1);
                    if ia >= ib || ja >= jb {
                        continue;
                    }
                    for i in ia..ib {
                        for d2 in 0..=m {
                            let mut acc = 0.0;
                            for j in ja..jb {
                                acc += b.c[(i - b.i0) * b.nj + j - b.j0] * ry.high[d2 * (p2 + 1) + j - ry.high_first];
                            }
                            tmp[(i - ia) * (m + 1) + d2] = acc;
                        }
                    }
                    for d1 in 0..=m {
                        for d2 in 0..=m {
                            let mut acc = 0.0;
                            for i in ia..ib {
                                acc += rx.high[d1 * (p2 + 1) + i - rx.high_first] * tmp[(i - ia) * (m + 1) + d2];
                            }
                            dst[d1 * (m + 1) + d2] += acc;
                        }
                    }
                }
            }
        }
        out
    }

    /// Sparse coefficients of basis function `f` in the S^{p2,s} tensor basis
    /// of each patch: (patch, j1, j2, value).
    pub fn coefficients(&self, f: usize) -> Vec<(usize, usize, usize, f64)> {
        let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for t in &self.basis[f].terms {
            match &t.piece {
                Piece::Tensor { coef, x, y } => {
                    let cx = self.factors.high_coeffs(*x);
                    let cy = self.factors.high_coeffs(*y);
                    for (a, va) in cx.vals.iter().enumerate() {
                        for (b, vb) in cy.vals.iter().enumerate() {
                            *acc.entry((t.patch, cx.first + a, cy.first + b)).or_insert(0.0) += coef * va * vb;
                        }
                    }
                }
                Piece::Block(b) => {
                    for i in 0..b.ni {
                        for j in 0..b.nj {
                            *acc.entry((t.patch, b.i0 + i, b.j0 + j)).or_insert(0.0) += b.c[i * b.nj + j];
                        }
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, v)| *v != 0.0).map(|((p, i, j), v)| (p, i, j, v)).collect()
    }

    /// Per-patch tensor representation of Σ c_i φ_i.
    pub fn combine(&self, c: &[f64]) -> Vec<PatchTensor> {
        let (n1, n2) = (self.factors.n1(), self.factors.n2());
        let np = self.index.len();
        let mut out = vec![PatchTensor { n1, n2, low: vec![0.0; n1 * n1], high: vec![0.0; n2 * n2] }; np];
        for (f, &cf) in self.basis.iter().zip(c) {
            if cf == 0.0 {
                continue;
            }
            for t in &f.terms {
                let pt = &mut out[t.patch];
                match &t.piece {
                    Piece::Tensor { coef, x: Factor::Low(i), y: Factor::Low(j) } => {
                        pt.low[i * n1 + j] += cf * coef;
                    }
                    Piece::Tensor { coef, x, y } => {
                        let cx = self.factors.high_coeffs(*x);
                        let cy = self.factors.high_coeffs(*y);
                        for (a, va) in cx.vals.iter().enumerate() {
                            for (b, vb) in cy.vals.iter().enumerate() {
                                pt.high[(cx.first + a) * n2 + cy.first + b] += cf * coef * va * vb;
                            }
                        }
                    }
                    Piece::Block(b) => {
                        for i in 0..b.ni {
                            for j in 0..b.nj {
                                pt.high[(b.i0 + i) * n2 + b.j0 + j] += cf * b.c[i * b.nj + j];
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Text dump: one line per coefficient, "function patch j1 j2 value".
    pub fn export_coefficients(&self) -> String {
        let mut out = String::new();
        for f in 0..self.dim() {
            for (p, i, j, v) in self.coefficients(f) {
                out.push_str(&format!("{f} {p} {i} {j} {v:.17e}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin;

    #[test]
    fn domain_g_dimension_s2() {
        let g = builtin("G").unwrap();
        let sp = SmoothSpace::build(&g, 2, 15).unwrap();
        assert_eq!(sp.counts[0], 2 * 195);
        assert_eq!(sp.counts[1], 36);
        assert_eq!(sp.dim(), 744);
    }

    #[test]
    fn trace_reproduction() {
        let g = builtin("G").unwrap();
        let fac = Factors::new(2, 15).unwrap();
        let ef = EdgeFunctions::new(&fac).unwrap();
        let sides = edge_sides(&g, 0, false);
        let fb = ef.frame_block(&sides[0], 0, 7).unwrap();
        let t = &ef.trace[0];
        for i in 0..=20 {
            let v = i as f64 / 20.0;
            let mut val = 0.0;
            for q in 0..fb.nj {
                val += fb.c[q] * fac.high.eval_spline(&unit(fac.n2(), fb.j0 + q), v, 0)[0];
            }
            let want = t.eval_spline(&unit(t.dim(), 7), v, 0)[0];
            assert!((val - want).abs() < 1e-12, "{v} {val} {want}");
        }
    }

    fn unit(n: usize, j: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        c
    }

    #[test]
    fn rref_is_canonical() {
        let mut a = vec![vec![2.0, 4.0, 0.0], vec![1.0, 2.0, 1.0]];
        rref(&mut a);
        // complete pivoting picks the 4 in column 1
        assert_eq!(a, vec![vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }
}
