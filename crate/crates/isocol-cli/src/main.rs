use clap::{Args, Parser, Subcommand, ValueEnum};
use isocol::collocation::{assemble_global, points_csv, PointScheme, Problem, SchemeKind};
use isocol::geometry::{builtin, load_geometry, MultiPatchDomain};
use isocol::smooth_space::SmoothSpace;
use isocol::solver::{convergence, oracle_check, pairwise_orders, run, OracleReport, RunConfig, RunReport};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Oracle deviation above which --check-oracles fails the run.
const ORACLE_TOL: f64 = 1e-8;
const ORACLE_SAMPLES: usize = 100;

#[derive(Parser)]
#[command(name = "isocol", version, about = "Isogeometric collocation on C^s-smooth mixed-degree multi-patch spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve once and report errors, sizes and timings
    Solve(RunArgs),
    /// Solve on a ladder of mesh sizes and estimate convergence orders
    Convergence(RunArgs),
    /// Dump the collocation points
    Points(RunArgs),
    /// Dimension of the smooth space, split by origin
    SpaceInfo(SpaceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Poisson,
    Biharmonic,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Poisson => Problem::Poisson,
            ProblemArg::Biharmonic => Problem::Biharmonic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Greville,
    Superconvergent,
    Set1,
    Set2,
    Set3,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> SchemeKind {
        match s {
            SchemeArg::Greville => SchemeKind::Greville,
            SchemeArg::Superconvergent | SchemeArg::Set1 => SchemeKind::Superconvergent,
            SchemeArg::Set2 => SchemeKind::Set2,
            SchemeArg::Set3 => SchemeKind::Set3,
        }
    }
}

#[derive(Args)]
struct DomainArgs {
    /// Built-in domain: A, B, C, D, F, G or "unit"
    #[arg(long, default_value = "G", conflicts_with = "geometry_file")]
    domain: String,
    /// Geometry file instead of a built-in domain
    #[arg(long)]
    geometry_file: Option<PathBuf>,
}

impl DomainArgs {
    fn load(&self) -> Result<MultiPatchDomain, String> {
        match &self.geometry_file {
            Some(p) => load_geometry(p).map_err(|e| e.to_string()),
            None if self.domain == "unit" => Ok(isocol::geometry::unit_square()),
            None => builtin(&self.domain).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Args)]
struct MeshArgs {
    /// Mesh size 1/2^i (repeatable)
    #[arg(long = "h", value_parser = parse_h)]
    h: Vec<usize>,
    /// Number of inner knots per direction, instead of --h (repeatable)
    #[arg(long, conflicts_with = "h")]
    k: Vec<usize>,
}

impl MeshArgs {
    /// Inner knot counts, or `default` mesh sizes when none were given.
    fn ks(&self, default: &[usize]) -> Vec<usize> {
        if !self.k.is_empty() {
            self.k.clone()
        } else if !self.h.is_empty() {
            self.h.clone()
        } else {
            default.to_vec()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_enum, default_value = "poisson")]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value = "superconvergent")]
    scheme: SchemeArg,
    #[command(flatten)]
    mesh: MeshArgs,
    /// CSV output path; a JSON sidecar with full precision goes next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the random rank probe and the oracle samples
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gauss points per element and direction for the error norms
    #[arg(long)]
    quadrature_points: Option<usize>,
    /// Compare the pulled-back operators with the chain-rule oracle
    #[arg(long)]
    check_oracles: bool,
}

#[derive(Args)]
struct SpaceArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Smoothness; defaults to the one used for --problem
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_enum, default_value = "poisson")]
    problem: ProblemArg,
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// "1/16" -> k = 15. Only powers of two are accepted.
fn parse_h(s: &str) -> Result<usize, String> {
    let d = s.strip_prefix("1/").ok_or_else(|| format!("mesh size must read 1/2^i, got {s}"))?;
    let n: usize = d.parse().map_err(|_| format!("bad mesh size {s}"))?;
    if n < 2 || !n.is_power_of_two() {
        return Err(format!("mesh size must be 1/2^i with i >= 1, got {s}"));
    }
    Ok(n - 1)
}

fn sig(x: f64) -> String {
    format!("{x:.5e}")
}

fn h_label(k: usize) -> String {
    format!("1/{}", k + 1)
}

fn emit(out: &Option<PathBuf>, csv: &str, sidecar: serde_json::Value) -> Result<(), String> {
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, csv).map_err(|e| format!("{}: {e}", p.display()))?;
            let side = sidecar_path(p);
            let text = serde_json::to_string_pretty(&sidecar).map_err(|e| e.to_string())?;
            std::fs::write(&side, text + "\n").map_err(|e| format!("{}: {e}", side.display()))
        }
    }
}

fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("json")
}

fn oracles(a: &RunArgs, dom: &MultiPatchDomain) -> Result<Option<OracleReport>, String> {
    if !a.check_oracles {
        return Ok(None);
    }
    let r = oracle_check(dom, ORACLE_SAMPLES, a.seed);
    eprintln!("oracle: laplace {:.3e}, bilaplace {:.3e} over {} samples", r.laplace, r.bilaplace, r.samples);
    if r.laplace > ORACLE_TOL || r.bilaplace > ORACLE_TOL {
        return Err(format!("operator oracle deviation above {ORACLE_TOL:e}"));
    }
    Ok(Some(r))
}

fn config(a: &RunArgs, k: usize) -> RunConfig {
    RunConfig {
        problem: a.problem.into(),
        scheme: a.scheme.into(),
        k,
        seed: a.seed,
        quadrature_points: a.quadrature_points,
    }
}

fn header(r: &RunReport) -> String {
    let mut cols = vec!["domain", "problem", "scheme", "s", "h", "k", "dim", "rows", "cols", "square"];
    cols.extend(r.errors.names());
    cols.join(",")
}

fn row(r: &RunReport) -> String {
    let mut v = vec![
        r.domain.clone(),
        r.problem.name().to_string(),
        r.scheme.to_string(),
        r.s.to_string(),
        h_label(r.k),
        r.k.to_string(),
        r.dim.to_string(),
        r.rows.to_string(),
        r.cols.to_string(),
        r.square.to_string(),
    ];
    v.extend(r.errors.values().into_iter().map(sig));
    v.join(",")
}

fn cmd_solve(a: &RunArgs) -> Result<(), String> {
    let dom = a.domain.load()?;
    let ks = a.mesh.ks(&[15]);
    if ks.len() != 1 {
        return Err("solve takes one mesh size; use convergence for several".into());
    }
    let oracle = oracles(a, &dom)?;
    let r = run(&dom, &config(a, ks[0])).map_err(|e| e.to_string())?;
    let csv = format!("{}\n{}\n", header(&r), row(&r));
    emit(&a.out, &csv, json!({ "report": r, "oracle": oracle }))
}

fn cmd_convergence(a: &RunArgs) -> Result<(), String> {
    let dom = a.domain.load()?;
    let problem: Problem = a.problem.into();
    // s = 4 needs k >= 9, so its default ladder starts at 1/16
    let default: &[usize] = match problem {
        Problem::Poisson => &[7, 15, 31, 63],
        Problem::Biharmonic => &[15, 31, 63],
    };
    let ks = a.mesh.ks(default);
    if ks.len() < 2 {
        return Err("convergence needs at least two mesh sizes".into());
    }
    let oracle = oracles(a, &dom)?;
    let reports = convergence(&dom, &config(a, ks[0]), &ks).map_err(|e| e.to_string())?;
    let orders = pairwise_orders(&reports);
    let names = reports[0].errors.names();
    let mut csv = header(&reports[0]);
    for n in &names {
        csv.push_str(&format!(",order_{n}"));
    }
    csv.push('\n');
    for (i, r) in reports.iter().enumerate() {
        csv.push_str(&row(r));
        for j in 0..names.len() {
            csv.push(',');
            if i > 0 {
                csv.push_str(&format!("{:.3}", orders[i - 1][j]));
            }
        }
        csv.push('\n');
    }
    emit(&a.out, &csv, json!({ "reports": reports, "orders": orders, "oracle": oracle }))
}

fn cmd_points(a: &RunArgs) -> Result<(), String> {
    let dom = a.domain.load()?;
    let ks = a.mesh.ks(&[15]);
    let problem: Problem = a.problem.into();
    let mut csv = String::new();
    let mut all = Vec::new();
    for &k in &ks {
        let scheme = PointScheme { kind: a.scheme.into(), s: problem.regularity(), k };
        let pts = assemble_global(&dom, scheme, problem).map_err(|e| e.to_string())?;
        eprintln!("h={} points={}", h_label(k), pts.len());
        let body = points_csv(&pts);
        if csv.is_empty() {
            csv = body;
        } else {
            csv.extend(body.lines().skip(1).map(|l| format!("{l}\n")));
        }
        let list: Vec<_> = pts
            .iter()
            .map(|p| json!({ "x": p.x, "patch": p.patch, "zeta": [p.zeta.0, p.zeta.1], "tag": p.tag.name() }))
            .collect();
        all.push(json!({ "k": k, "count": pts.len(), "points": list }));
    }
    emit(&a.out, &csv, json!(all))
}

fn cmd_space_info(a: &SpaceArgs) -> Result<(), String> {
    let dom = a.domain.load()?;
    let problem: Problem = a.problem.into();
    let s = a.s.unwrap_or(problem.regularity());
    let mut csv = String::from("domain,s,h,k,patch,inner_edge,boundary_edge,vertex,total\n");
    let mut side = Vec::new();
    for k in a.mesh.ks(&[15]) {
        let sp = SmoothSpace::build(&dom, s, k).map_err(|e| e.to_string())?;
        let [p, ie, be, v] = sp.counts;
        csv.push_str(&format!("{},{s},{},{k},{p},{ie},{be},{v},{}\n", dom.name, h_label(k), sp.dim()));
        side.push(json!({ "s": s, "k": k, "counts": sp.counts, "dim": sp.dim() }));
    }
    emit(&a.out, &csv, json!({ "domain": dom.name, "spaces": side }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Convergence(a) => cmd_convergence(a),
        Cmd::Points(a) => cmd_points(a),
        Cmd::SpaceInfo(a) => cmd_space_info(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
