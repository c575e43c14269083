//! Strong-form collocation: pulled-back operator rows, sparse assembly,
//! square or least-squares solves, and relative error norms.

use crate::collocation::{assemble_global, CollocationError, CollocationPoint, PointScheme, Problem, SchemeKind, Tag};
use crate::geometry::{GeomJet, MultiPatchDomain};
use crate::jet::{Diffusion, InverseChain, Jet2};
use crate::mixed_space::{Side, UniRows};
use crate::smooth_space::{SmoothError, SmoothSpace};
use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use gauss_quad::GaussLegendre;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::num::NonZeroUsize;
use std::time::Instant;
use thiserror::Error;

/// Relative error allowed when recovering a random vector y from A y.
pub const RANK_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Collocation(#[from] CollocationError),
    #[error(transparent)]
    Space(#[from] SmoothError),
    #[error("singular Jacobian on patch {patch} at {zeta:?}")]
    Singular { patch: usize, zeta: (f64, f64) },
    #[error("underdetermined system: {rows} rows for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error(
        "collocation matrix ({rows} x {cols}) is numerically rank deficient: \
         recovering a random coefficient vector gave relative error {recovery:.3e} (tolerance {tol:.0e})"
    )]
    RankDeficient { rows: usize, cols: usize, recovery: f64, tol: f64 },
}

/// Exact solution data at a physical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValues {
    pub u: f64,
    pub grad: [f64; 2],
    pub lap: f64,
    pub grad_lap: [f64; 2],
    pub bilap: f64,
}

type ExactFn = Box<dyn Fn([f64; 2]) -> ExactValues + Send + Sync>;

/// Problem kind together with the manufactured solution.
pub struct ProblemSpec {
    pub kind: Problem,
    exact: ExactFn,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec").field("kind", &self.kind).finish_non_exhaustive()
    }
}

/// u = cos(x1) sin(x2), with Δu = −2u and Δ²u = 4u.
pub fn cos_sin(x: [f64; 2]) -> ExactValues {
    let (c1, s1, c2, s2) = (x[0].cos(), x[0].sin(), x[1].cos(), x[1].sin());
    let u = c1 * s2;
    let grad = [-s1 * s2, c1 * c2];
    ExactValues { u, grad, lap: -2.0 * u, grad_lap: [-2.0 * grad[0], -2.0 * grad[1]], bilap: 4.0 * u }
}

impl ProblemSpec {
    pub fn new(kind: Problem) -> ProblemSpec {
        ProblemSpec { kind, exact: Box::new(cos_sin) }
    }

    pub fn with_exact(kind: Problem, exact: impl Fn([f64; 2]) -> ExactValues + Send + Sync + 'static) -> ProblemSpec {
        ProblemSpec { kind, exact: Box::new(exact) }
    }

    pub fn exact(&self, x: [f64; 2]) -> ExactValues {
        (self.exact)(x)
    }

    /// Interior right-hand side: Δu or Δ²u.
    pub fn g(&self, x: [f64; 2]) -> f64 {
        let e = self.exact(x);
        match self.kind {
            Problem::Poisson => e.lap,
            Problem::Biharmonic => e.bilap,
        }
    }

    /// Dirichlet data.
    pub fn g1(&self, x: [f64; 2]) -> f64 {
        self.exact(x).u
    }

    /// Neumann data for the outward unit normal n.
    pub fn g2(&self, x: [f64; 2], n: [f64; 2]) -> f64 {
        let e = self.exact(x);
        e.grad[0] * n[0] + e.grad[1] * n[1]
    }

    /// Highest parametric derivative order in an interior row.
    pub fn order(&self) -> usize {
        match self.kind {
            Problem::Poisson => 2,
            Problem::Biharmonic => 4,
        }
    }
}

// ---------------------------------------------------------------------------
// operators

fn check_jacobian(g: &GeomJet, patch: usize, zeta: (f64, f64)) -> Result<(), SolverError> {
    let a = g.get(1, 0);
    let b = g.get(0, 1);
    let scale = (a[0].hypot(a[1]) * b[0].hypot(b[1])).max(f64::MIN_POSITIVE);
    if !(g.det().abs() > 1e-12 * scale) {
        return Err(SolverError::Singular { patch, zeta });
    }
    Ok(())
}

/// Physical Laplacian of v∘F⁻¹, given the parametric jet v (order ≥ 2) and
/// geometry derivatives up to order 2.
pub fn laplace_pullback(g: &GeomJet, v: &Jet2) -> f64 {
    Diffusion::new(g, 1).laplace(&v.truncate(2)).value()
}

/// Physical bilaplacian of v∘F⁻¹ (v of order 4, geometry of order 4).
pub fn bilaplace_pullback(g: &GeomJet, v: &Jet2) -> f64 {
    let d = Diffusion::new(g, 3);
    d.laplace(&d.laplace(&v.truncate(4))).value()
}

/// Outward unit normal on a patch side, at a point of that side.
pub fn outward_normal(g: &GeomJet, side: Side) -> [f64; 2] {
    let (fu, fv) = (g.get(1, 0), g.get(0, 1));
    let (t, inward) = match side {
        Side::Left => (fv, fu),
        Side::Right => (fv, [-fu[0], -fu[1]]),
        Side::Bottom => (fu, fv),
        Side::Top => (fu, [-fv[0], -fv[1]]),
    };
    let len = t[0].hypot(t[1]);
    let mut n = [t[1] / len, -t[0] / len];
    if n[0] * inward[0] + n[1] * inward[1] > 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

/// Coefficients (w10, w01) with n·∇u = w10 ∂_1(u∘F) + w01 ∂_2(u∘F).
pub fn normal_derivative_weights(g: &GeomJet, n: [f64; 2]) -> [f64; 2] {
    let (fu, fv) = (g.get(1, 0), g.get(0, 1));
    let det = g.det();
    [(fv[1] * n[0] - fv[0] * n[1]) / det, (-fu[1] * n[0] + fu[0] * n[1]) / det]
}

/// A row as a linear functional on parametric derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFunctional {
    pub patch: usize,
    pub zeta: (f64, f64),
    pub order: usize,
    /// (d1, d2, weight)
    pub weights: Vec<(usize, usize, f64)>,
    pub rhs: f64,
}

fn operator_weights(order: usize, op: impl Fn(&Jet2) -> f64) -> Vec<(usize, usize, f64)> {
    let mut w = Vec::new();
    for d in 1..=order {
        for b in 0..=d {
            let a = d - b;
            let unit = Jet2::from_derivs(order, |i, j| if (i, j) == (a, b) { 1.0 } else { 0.0 });
            let v = op(&unit);
            if v != 0.0 {
                w.push((a, b, v));
            }
        }
    }
    w
}

pub fn row_functional(
    dom: &MultiPatchDomain,
    pt: &CollocationPoint,
    spec: &ProblemSpec,
) -> Result<RowFunctional, SolverError> {
    let patch = pt.patch;
    match pt.tag {
        Tag::Dirichlet => Ok(RowFunctional {
            patch,
            zeta: pt.zeta,
            order: 0,
            weights: vec![(0, 0, 1.0)],
            rhs: spec.g1(pt.x),
        }),
        Tag::Neumann(_) => {
            let zb = pt.boundary.unwrap_or(pt.zeta);
            let side = pt.side.expect("Neumann point without a side");
            let g = dom.jet(patch, zb, 1);
            check_jacobian(&g, patch, zb)?;
            let n = outward_normal(&g, side);
            let w = normal_derivative_weights(&g, n);
            let xb = g.get(0, 0);
            Ok(RowFunctional {
                patch,
                zeta: zb,
                order: 1,
                weights: vec![(1, 0, w[0]), (0, 1, w[1])],
                rhs: spec.g2(xb, n),
            })
        }
        Tag::Interior => {
            let m = spec.order();
            let g = dom.jet(patch, pt.zeta, m);
            check_jacobian(&g, patch, pt.zeta)?;
            let weights = match spec.kind {
                Problem::Poisson => {
                    let d = Diffusion::new(&g, 1);
                    operator_weights(2, |v| d.laplace(v).value())
                }
                Problem::Biharmonic => {
                    let d = Diffusion::new(&g, 3);
                    operator_weights(4, |v| d.laplace(&d.laplace(v)).value())
                }
            };
            Ok(RowFunctional { patch, zeta: pt.zeta, order: m, weights, rhs: spec.g(pt.x) })
        }
    }
}

/// Nonzero entries (basis index, value) of the row for one point.
pub fn row_entries(space: &SmoothSpace, row: &RowFunctional) -> Vec<(usize, f64)> {
    let ev = space.eval_local(row.patch, row.zeta, row.order);
    ev.fns
        .iter()
        .enumerate()
        .map(|(i, &f)| (f, row.weights.iter().map(|&(a, b, w)| w * ev.get(i, a, b)).sum::<f64>()))
        .filter(|&(_, v)| v != 0.0)
        .collect()
}

// ---------------------------------------------------------------------------
// system

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Square,
    LeastSquares,
}

#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub rows: usize,
    pub cols: usize,
    /// (row, col, value), one entry per position
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    pub tags: Vec<Tag>,
    pub mode: SolveMode,
}

impl CollocationSystem {
    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(r, j, v) in &self.entries {
            out[r] += v * c[j];
        }
        out
    }

    /// ‖A c − b‖₂.
    pub fn residual(&self, c: &[f64]) -> f64 {
        self.apply(c).iter().zip(&self.rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

pub fn assemble(
    dom: &MultiPatchDomain,
    space: &SmoothSpace,
    points: &[CollocationPoint],
    spec: &ProblemSpec,
) -> Result<CollocationSystem, SolverError> {
    let cols = space.dim();
    let mut entries = Vec::new();
    let mut rhs = Vec::with_capacity(points.len());
    for (r, pt) in points.iter().enumerate() {
        let row = row_functional(dom, pt, spec)?;
        entries.extend(row_entries(space, &row).into_iter().map(|(j, v)| (r, j, v)));
        rhs.push(row.rhs);
    }
    let rows = points.len();
    let mode = if rows == cols { SolveMode::Square } else { SolveMode::LeastSquares };
    Ok(CollocationSystem { rows, cols, entries, rhs, tags: points.iter().map(|p| p.tag).collect(), mode })
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    /// ‖A c − b‖ / ‖b‖
    pub relative_residual: f64,
    /// ‖x − y‖ / ‖y‖ for x solving A x = A y, y random
    pub recovery_error: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Square systems by sparse LU, overdetermined ones by sparse QR. Rows are
/// scaled to unit norm first, so the least-squares problem weighs every
/// equation alike regardless of its differential order; columns are then
/// scaled to unit norm.
pub fn solve(sys: &CollocationSystem, seed: u64) -> Result<Solution, SolverError> {
    let (m, n) = (sys.rows, sys.cols);
    if m < n {
        return Err(SolverError::Underdetermined { rows: m, cols: n });
    }
    let mut rs = vec![0.0; m];
    for &(r, _, v) in &sys.entries {
        rs[r] += v * v;
    }
    let rs: Vec<f64> = rs.iter().map(|x| if *x > 0.0 { 1.0 / x.sqrt() } else { 1.0 }).collect();
    let mut scale = vec![0.0; n];
    for &(r, j, v) in &sys.entries {
        scale[j] += v * v * rs[r] * rs[r];
    }
    for s in scale.iter_mut() {
        *s = if *s > 0.0 { 1.0 / s.sqrt() } else { 1.0 };
    }
    let trip: Vec<Triplet<usize, usize, f64>> =
        sys.entries.iter().map(|&(r, j, v)| Triplet::new(r, j, v * rs[r] * scale[j])).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(m, n, &trip)
        .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;

    let mut rng = StdRng::seed_from_u64(seed);
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut ay = vec![0.0; m];
    for t in &trip {
        ay[t.row] += t.val * y[t.col];
    }
    let mut b = Mat::<f64>::from_fn(m, 2, |i, j| if j == 0 { sys.rhs[i] * rs[i] } else { ay[i] });
    match sys.mode {
        SolveMode::Square => {
            let lu = a.sp_lu().map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
            let rhs: Vec<f64> = (0..m).map(|i| b[(i, 0)]).collect();
            lu.solve_in_place(b.as_mut());
            // two refinement steps with the residual in double-double
            for _ in 0..2 {
                let x: Vec<f64> = (0..n).map(|i| b[(i, 0)]).collect();
                let r = compensated_residual(&trip, &rhs, &x);
                let mut d = Mat::<f64>::from_fn(m, 1, |i, _| r[i]);
                lu.solve_in_place(d.as_mut());
                for i in 0..n {
                    b[(i, 0)] += d[(i, 0)];
                }
            }
        }
        SolveMode::LeastSquares => {
            let qr = a.sp_qr().map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
            qr.solve_lstsq_in_place(b.as_mut());
        }
    }
    let diff: Vec<f64> = (0..n).map(|i| b[(i, 1)] - y[i]).collect();
    let recovery = norm(&diff) / norm(&y);
    if !(recovery <= RANK_TOL) {
        return Err(SolverError::RankDeficient { rows: m, cols: n, recovery, tol: RANK_TOL });
    }
    let coefficients: Vec<f64> = (0..n).map(|i| b[(i, 0)] * scale[i]).collect();
    let bn = norm(&sys.rhs);
    let relative_residual = sys.residual(&coefficients) / if bn > 0.0 { bn } else { 1.0 };
    Ok(Solution { coefficients, relative_residual, recovery_error: recovery })
}

/// b - A x with every product and sum carried in double-double.
fn compensated_residual(a: &[Triplet<usize, usize, f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut hi = b.to_vec();
    let mut lo = vec![0.0; b.len()];
    for t in a {
        let p = -t.val * x[t.col];
        let pe = (-t.val).mul_add(x[t.col], -p);
        let s = hi[t.row] + p;
        let z = s - hi[t.row];
        let se = (hi[t.row] - (s - z)) + (p - z);
        hi[t.row] = s;
        lo[t.row] += se + pe;
    }
    hi.iter().zip(&lo).map(|(h, l)| h + l).collect()
}

// ---------------------------------------------------------------------------
// errors

/// Relative errors: L², H¹ seminorm, then ‖Δ·‖, ‖∇Δ·‖, ‖Δ²·‖ (the last two
/// only for s = 4).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h4: Option<f64>,
}

impl ErrorReport {
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.l2, self.h1, self.h2];
        v.extend(self.h3);
        v.extend(self.h4);
        v
    }

    pub fn names(&self) -> Vec<&'static str> {
        ["L2", "H1", "H2", "H3", "H4"][..self.values().len()].to_vec()
    }
}

/// Quadrature on [0, 1]: (node, weight) pairs.
pub fn gauss_legendre(q: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(q.max(1)).unwrap());
    let mut v: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Relative errors of u_h = Σ c_i φ_i, with `q` Gauss points per element and
/// direction (default p2 + 2).
pub fn error_norms(
    dom: &MultiPatchDomain,
    space: &SmoothSpace,
    c: &[f64],
    spec: &ProblemSpec,
    q: Option<usize>,
) -> ErrorReport {
    let fac = &space.factors;
    let m = if space.s >= 4 { 4 } else { 2 };
    let q = q.unwrap_or(fac.p2() + 2);
    let ne = space.k + 1;
    let h = 1.0 / ne as f64;
    let rule = gauss_legendre(q);
    // all quadrature coordinates along one direction
    let coords: Vec<(f64, f64)> = (0..ne)
        .flat_map(|e| rule.iter().map(move |&(x, w)| ((e as f64 + x) * h, w * h)))
        .collect();
    let rows: Vec<UniRows> = coords.iter().map(|&(x, _)| UniRows::new(fac, x, m)).collect();
    let tensors = space.combine(c);
    // [error², exact²] per norm
    let mut acc = [[0.0f64; 2]; 5];
    let w1 = m + 1;
    for (p, t) in tensors.iter().enumerate() {
        for (i, &(x, wx)) in coords.iter().enumerate() {
            for (j, &(y, wy)) in coords.iter().enumerate() {
                let tab = t.eval(&rows[i], &rows[j]);
                let g = dom.jet(p, (x, y), m);
                let det = g.det();
                let w = wx * wy * det.abs();
                let v = Jet2::from_derivs(m, |a, b| tab[a * w1 + b]);
                let ex = spec.exact(g.get(0, 0));
                let (fu, fv) = (g.get(1, 0), g.get(0, 1));
                // J^{-T} ∇_ξ
                let phys = |du: f64, dv: f64| [(fv[1] * du - fu[1] * dv) / det, (-fv[0] * du + fu[0] * dv) / det];
                let gr = phys(v.deriv(1, 0), v.deriv(0, 1));
                let d = Diffusion::new(&g, m - 1);
                let lap = d.laplace(&v);
                let mut add = |k: usize, uh: &[f64], u: &[f64]| {
                    acc[k][0] += w * uh.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                    acc[k][1] += w * u.iter().map(|b| b * b).sum::<f64>();
                };
                add(0, &[v.value()], &[ex.u]);
                add(1, &gr, &ex.grad);
                add(2, &[lap.value()], &[ex.lap]);
                if m == 4 {
                    add(3, &phys(lap.deriv(1, 0), lap.deriv(0, 1)), &ex.grad_lap);
                    add(4, &[d.laplace(&lap).value()], &[ex.bilap]);
                }
            }
        }
    }
    let rel = |k: usize| {
        let [e, u] = acc[k];
        if u > 0.0 {
            (e / u).sqrt()
        } else {
            e.sqrt()
        }
    };
    ErrorReport {
        l2: rel(0),
        h1: rel(1),
        h2: rel(2),
        h3: (m == 4).then(|| rel(3)),
        h4: (m == 4).then(|| rel(4)),
    }
}

// ---------------------------------------------------------------------------
// driver

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub scheme: SchemeKind,
    /// number of inner knots per direction, h = 1/(k+1)
    pub k: usize,
    pub seed: u64,
    pub quadrature_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub space: f64,
    pub points: f64,
    pub assemble: f64,
    pub solve: f64,
    pub errors: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub domain: String,
    pub problem: Problem,
    pub scheme: &'static str,
    pub s: usize,
    pub k: usize,
    pub h: f64,
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub square: bool,
    pub relative_residual: f64,
    pub recovery_error: f64,
    pub errors: ErrorReport,
    pub timings: Timings,
}

/// Solve on an already built space (its s must match the problem).
pub fn run_with_space(
    dom: &MultiPatchDomain,
    space: &SmoothSpace,
    cfg: &RunConfig,
    spec: &ProblemSpec,
) -> Result<(RunReport, Vec<f64>), SolverError> {
    let mut timings = Timings::default();
    let t = Instant::now();
    let scheme = PointScheme { kind: cfg.scheme, s: space.s, k: space.k };
    let points = assemble_global(dom, scheme, cfg.problem)?;
    timings.points = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let sys = assemble(dom, space, &points, spec)?;
    timings.assemble = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let sol = solve(&sys, cfg.seed)?;
    timings.solve = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let errors = error_norms(dom, space, &sol.coefficients, spec, cfg.quadrature_points);
    timings.errors = t.elapsed().as_secs_f64();
    let report = RunReport {
        domain: dom.name.clone(),
        problem: cfg.problem,
        scheme: cfg.scheme.name(),
        s: space.s,
        k: space.k,
        h: 1.0 / (space.k + 1) as f64,
        dim: space.dim(),
        rows: sys.rows,
        cols: sys.cols,
        square: sys.mode == SolveMode::Square,
        relative_residual: sol.relative_residual,
        recovery_error: sol.recovery_error,
        errors,
        timings,
    };
    Ok((report, sol.coefficients))
}

pub fn run(dom: &MultiPatchDomain, cfg: &RunConfig) -> Result<RunReport, SolverError> {
    let t = Instant::now();
    let space = SmoothSpace::build(dom, cfg.problem.regularity(), cfg.k)?;
    let elapsed = t.elapsed().as_secs_f64();
    let spec = ProblemSpec::new(cfg.problem);
    let (mut report, _) = run_with_space(dom, &space, cfg, &spec)?;
    report.timings.space = elapsed;
    Ok(report)
}

// ---------------------------------------------------------------------------
// convergence studies

/// Runs for several k on one domain; the space is rebuilt per k.
pub fn convergence(dom: &MultiPatchDomain, base: &RunConfig, ks: &[usize]) -> Result<Vec<RunReport>, SolverError> {
    ks.iter().map(|&k| run(dom, &RunConfig { k, ..*base })).collect()
}

/// log2(e_coarse / e_fine) for consecutive runs, per norm; meaningful when
/// h halves between runs.
pub fn pairwise_orders(reports: &[RunReport]) -> Vec<Vec<f64>> {
    reports
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].errors.values(), w[1].errors.values());
            a.iter().zip(&b).map(|(x, y)| (x / y).ln() / (w[0].h / w[1].h).ln()).collect()
        })
        .collect()
}

/// Slope between the coarsest and the finest run, per norm.
pub fn endpoint_orders(reports: &[RunReport]) -> Vec<f64> {
    let (a, b) = (&reports[0], &reports[reports.len() - 1]);
    let (ea, eb) = (a.errors.values(), b.errors.values());
    ea.iter().zip(&eb).map(|(x, y)| (x / y).ln() / (a.h / b.h).ln()).collect()
}

// ---------------------------------------------------------------------------
// operator oracle

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    /// largest relative deviation of the pulled-back Laplacian
    pub laplace: f64,
    /// same for the bi-Laplacian
    pub bilaplace: f64,
}

/// Compare the pulled-back operators with physical derivatives obtained from
/// the inverse-function chain rule, for random parametric jets at random
/// points of random patches.
pub fn oracle_check(dom: &MultiPatchDomain, samples: usize, seed: u64) -> OracleReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = OracleReport { samples, laplace: 0.0, bilaplace: 0.0 };
    for _ in 0..samples {
        let p = rng.gen_range(0..dom.patch_count());
        let z = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let g = dom.jet(p, z, 5);
        let t: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = Jet2::from_derivs(4, |a, b| t[a * 5 + b]);
        let phys = InverseChain::new(&g, 4).apply(&v);
        let lap = phys.deriv(2, 0) + phys.deriv(0, 2);
        let bilap = phys.deriv(4, 0) + 2.0 * phys.deriv(2, 2) + phys.deriv(0, 4);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        out.laplace = out.laplace.max(rel(laplace_pullback(&g, &v), lap));
        out.bilaplace = out.bilaplace.max(rel(bilaplace_pullback(&g, &v), bilap));
    }
    out
}
