#![allow(dead_code)]

use isocol::collocation::Tracks;
use isocol::geometry::{builtin, MultiPatchDomain};
use isocol::jet::{InverseChain, Jet2};
use isocol::mixed_space::{Factor, Factors};
use isocol::smooth_space::SmoothSpace;
use isocol::solver::ExactValues;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

/// Open knot vector of S^{p,s} with k uniform inner knots of multiplicity p - s.
pub fn knots(p: usize, s: usize, k: usize) -> Vec<f64> {
    let mut t = vec![0.0; p + 1];
    for i in 1..=k {
        t.extend(std::iter::repeat(i as f64 / (k + 1) as f64).take(p - s));
    }
    t.extend(std::iter::repeat(1.0).take(p + 1));
    t
}

pub fn greville_oracle(p: usize, s: usize, k: usize) -> Vec<f64> {
    let t = knots(p, s, k);
    (0..t.len() - p - 1).map(|j| t[j + 1..=j + p].iter().sum::<f64>() / p as f64).collect()
}

/// High-degree points up to index s, then the truncated points, then the
/// plain low-degree points: strictly increasing, and placed as prescribed.
pub fn mixed_greville_ordering(s: usize, k: usize) -> Result<(), String> {
    let f = Factors::new(s, k).map_err(|e| e.to_string())?;
    let tr = Tracks::greville(&f);
    let (z1, z2) = (greville_oracle(s + 1, s, k), greville_oracle(2 * s + 1, s, k));
    let n1 = f.n1();
    let mut seq: Vec<f64> = z2[..=s].to_vec();
    for i in 1..=s {
        let bar = tr.coord(Factor::Trunc(i), (true, false));
        let want = if i <= s / 2 { z2[s + i] } else { z1[i] };
        if (bar - want).abs() > 1e-14 {
            return Err(format!("truncated point {i} at {bar}, expected {want}"));
        }
        seq.push(bar);
    }
    seq.extend(&z1[s + 1..=n1 - s - 2]);
    if let Some(w) = seq.windows(2).find(|w| w[0] >= w[1]) {
        return Err(format!("not increasing: {} then {}", w[0], w[1]));
    }
    for i in 1..=s {
        let a = tr.coord(Factor::Trunc(i), (true, true));
        let b = tr.coord(Factor::Trunc(n1 - 1 - i), (true, true));
        if (a + b - 1.0).abs() > 1e-14 {
            return Err(format!("truncated point {i} not mirrored"));
        }
    }
    Ok(())
}

/// Physical jets of order s of every function active at a patch point.
pub fn physical_jets(dom: &MultiPatchDomain, sp: &SmoothSpace, patch: usize, x: (f64, f64)) -> BTreeMap<usize, Jet2> {
    let s = sp.s;
    let le = sp.eval_local(patch, x, s);
    let ch = InverseChain::new(&dom.jet(patch, x, s), s);
    le.fns
        .iter()
        .enumerate()
        .map(|(i, &f)| (f, ch.apply(&Jet2::from_derivs(s, |a, b| le.get(i, a, b)))))
        .collect()
}

/// Largest jump over all derivatives up to order s across every inner edge,
/// at 20 random points per edge, for random members of W^s; each jump is
/// relative to the largest derivative of the same order along that edge.
pub fn max_relative_jump(name: &str, s: usize, k: usize, members: usize, seed: u64) -> f64 {
    let dom = builtin(name).unwrap();
    let sp = SmoothSpace::build(&dom, s, k).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let coeffs: Vec<Vec<f64>> = (0..members).map(|_| (0..sp.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut worst = 0.0f64;
    for e in &dom.inner_edges {
        let mut size = vec![vec![0.0f64; s + 1]; members];
        let mut jump = vec![vec![0.0f64; s + 1]; members];
        for _ in 0..20 {
            let v = rng.gen_range(0.0..1.0);
            let sides: Vec<BTreeMap<usize, Jet2>> = (0..2)
                .map(|t| physical_jets(&dom, &sp, e.patches[t], e.frames[t].apply(0.0, v)))
                .collect();
            for (m, c) in coeffs.iter().enumerate() {
                let total = |jets: &BTreeMap<usize, Jet2>, a: usize, b: usize| -> f64 {
                    jets.iter().map(|(f, j)| c[*f] * j.deriv(a, b)).sum()
                };
                for d in 0..=s {
                    for q in 0..=d {
                        let (a, b) = (total(&sides[0], d - q, q), total(&sides[1], d - q, q));
                        size[m][d] = size[m][d].max(a.abs()).max(b.abs());
                        jump[m][d] = jump[m][d].max((a - b).abs());
                    }
                }
            }
        }
        for m in 0..members {
            for d in 0..=s {
                worst = worst.max(jump[m][d] / size[m][d].max(f64::MIN_POSITIVE));
            }
        }
    }
    worst
}

/// 1-D polynomial with its first four derivatives at x.
pub fn poly1(c: &[f64], x: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (d, o) in out.iter_mut().enumerate() {
        for (i, a) in c.iter().enumerate().skip(d) {
            let f = ((i - d + 1)..=i).map(|t| t as f64).product::<f64>();
            *o += a * f * x.powi((i - d) as i32);
        }
    }
    out
}

/// Exact data of u(x, y) = p(x) q(y).
pub fn tensor_exact(p: Vec<f64>, q: Vec<f64>) -> impl Fn([f64; 2]) -> ExactValues + Send + Sync + 'static {
    move |x| {
        let (a, b) = (poly1(&p, x[0]), poly1(&q, x[1]));
        ExactValues {
            u: a[0] * b[0],
            grad: [a[1] * b[0], a[0] * b[1]],
            lap: a[2] * b[0] + a[0] * b[2],
            grad_lap: [a[3] * b[0] + a[1] * b[2], a[2] * b[1] + a[0] * b[3]],
            bilap: a[4] * b[0] + 2.0 * a[2] * b[2] + a[0] * b[4],
        }
    }
}
