mod common;

use common::max_relative_jump;
use faer::Mat;
use isocol::geometry::builtin;
use isocol::smooth_space::{Origin, SmoothSpace};
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

#[test]
fn random_members_are_cs_across_edges() {
    for name in ["B", "C", "G"] {
        for (s, k) in [(2, 7), (4, 12)] {
            let j = max_relative_jump(name, s, k, 200, 11);
            assert!(j <= 1e-8, "{name} s={s} k={k}: relative jump {j:e}");
        }
    }
}

#[test]
fn vertex_constraints_hold() {
    for name in ["B", "C"] {
        let dom = builtin(name).unwrap();
        for (s, k) in [(2, 7), (2, 15), (4, 9)] {
            let res = SmoothSpace::vertex_residuals(&dom, s, k).unwrap();
            assert!(!res.is_empty(), "{name}: no vertex of valency >= 3");
            let sp = SmoothSpace::build(&dom, s, k).unwrap();
            assert_eq!(res.len(), sp.basis.iter().filter(|b| matches!(b.origin, Origin::Vertex(v) if dom.vertices[v].valency() >= 3)).count());
            for (v, r) in res {
                assert!(r <= 1e-10, "{name} s={s} k={k} vertex {v}: residual {r:e}");
            }
        }
    }
}

#[test]
fn golden_dimensions_domain_g() {
    let dom = builtin("G").unwrap();
    for (s, k, dim) in [(2, 15, 744), (2, 31, 2488), (2, 63, 9048), (4, 15, 955), (4, 31, 2859), (4, 63, 9739)] {
        let sp = SmoothSpace::build(&dom, s, k).unwrap();
        assert_eq!(sp.dim(), dim, "s={s} k={k}");
        assert_eq!(sp.counts.iter().sum::<usize>(), dim);
    }
}

/// Rank of the basis through its coefficients in the tensor S^{p2,s} basis
/// of every patch; that basis is independent, so the ranks agree.
fn coefficient_rank(sp: &SmoothSpace) -> usize {
    let n = sp.dim();
    let cols: Vec<_> = (0..n).map(|f| sp.coefficients(f)).collect();
    let mut rows = BTreeMap::new();
    for c in &cols {
        for &(p, i, j, _) in c {
            let next = rows.len();
            rows.entry((p, i, j)).or_insert(next);
        }
    }
    let mut a = Mat::<f64>::zeros(rows.len(), n);
    for (f, c) in cols.iter().enumerate() {
        let norm = c.iter().map(|t| t.3 * t.3).sum::<f64>().sqrt();
        for &(p, i, j, v) in c {
            a[(rows[&(p, i, j)], f)] += v / norm;
        }
    }
    let sv = a.singular_values().unwrap();
    sv.iter().filter(|&&x| x > 1e-10 * sv[0]).count()
}

#[test]
fn basis_is_linearly_independent() {
    for name in ["A", "B", "C", "D", "F", "G"] {
        let dom = builtin(name).unwrap();
        for s in [2, 4] {
            let k0 = SmoothSpace::min_k(&dom, s);
            for k in [k0, k0 + 1, 15] {
                let sp = SmoothSpace::build(&dom, s, k).unwrap();
                assert_eq!(coefficient_rank(&sp), sp.dim(), "{name} s={s} k={k}");
            }
        }
    }
}

#[test]
fn scattered_values_have_full_rank() {
    let dom = builtin("B").unwrap();
    let (s, k) = (2, 7);
    let sp = SmoothSpace::build(&dom, s, k).unwrap();
    let n = sp.dim();
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let mut a = Mat::<f64>::zeros(2 * n, n);
    // random points, cycling through the elements so every support is hit
    let ne = k + 1;
    let cells = dom.patch_count() * ne * ne;
    let h = 1.0 / ne as f64;
    for r in 0..2 * n {
        let c = r % cells;
        let (p, e) = (c / (ne * ne), c % (ne * ne));
        let x = (h * ((e / ne) as f64 + rng.gen_range(0.0..1.0)), h * ((e % ne) as f64 + rng.gen_range(0.0..1.0)));
        let le = sp.eval_local(p, x, 0);
        for (i, &f) in le.fns.iter().enumerate() {
            a[(r, f)] = le.get(i, 0, 0);
        }
    }
    let sv = a.singular_values().unwrap();
    assert_eq!(sv.iter().filter(|&&x| x > 1e-10 * sv[0]).count(), n);
}

#[test]
fn coarse_meshes_are_rejected_where_vertex_blocks_overlap() {
    let g = builtin("G").unwrap();
    assert_eq!(SmoothSpace::min_k(&g, 2), 6);
    assert_eq!(SmoothSpace::min_k(&g, 4), 12);
    assert!(SmoothSpace::build(&g, 4, 11).is_err());
    assert_eq!(SmoothSpace::min_k(&builtin("B").unwrap(), 4), 9);
}

#[test]
fn patch_functions_vanish_on_inner_edges() {
    let dom = builtin("B").unwrap();
    for (s, k) in [(2, 7), (4, 9)] {
        let sp = SmoothSpace::build(&dom, s, k).unwrap();
        for e in &dom.inner_edges {
            for t in 0..2 {
                for i in 0..=10 {
                    let x = e.frames[t].apply(0.0, i as f64 / 10.0);
                    let le = sp.eval_local(e.patches[t], x, s);
                    for (j, &f) in le.fns.iter().enumerate() {
                        if !matches!(sp.basis[f].origin, Origin::Patch(_)) {
                            continue;
                        }
                        for a in 0..=s {
                            for b in 0..=s - a {
                                assert!(le.get(j, a, b).abs() <= 1e-12, "s={s} fn {f} d=({a},{b})");
                            }
                        }
                    }
                }
            }
        }
    }
}
