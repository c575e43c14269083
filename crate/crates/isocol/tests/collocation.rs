use isocol::collocation::{assemble_global, PointScheme, Problem, SchemeKind, Tag, Tracks};
use isocol::geometry::{builtin, EdgeRef, MultiPatchDomain};
use isocol::mixed_space::{Factors, Side};
use isocol::smooth_space::SmoothSpace;

fn diameter(dom: &MultiPatchDomain) -> f64 {
    let b = dom.bounding_box();
    (b[2] - b[0]).hypot(b[3] - b[1])
}

fn on_boundary_side(dom: &MultiPatchDomain, p: usize, z: (f64, f64)) -> bool {
    Side::of_point(z, 1e-14).into_iter().any(|s| matches!(dom.side_edge[p][s.index()], EdgeRef::Boundary(_)))
}

#[test]
fn points_are_injective_and_contained() {
    for name in ["A", "B", "C", "D", "F", "G"] {
        let dom = builtin(name).unwrap();
        let tol = 1e-10 * diameter(&dom);
        for problem in [Problem::Poisson, Problem::Biharmonic] {
            let s = problem.regularity();
            for kind in [SchemeKind::Greville, SchemeKind::Superconvergent] {
                let pts = assemble_global(&dom, PointScheme { kind, s, k: 11 }, problem).unwrap();
                let mut xs: Vec<[f64; 2]> = pts.iter().map(|p| p.x).collect();
                xs.sort_by(|a, b| a[0].total_cmp(&b[0]));
                for i in 0..xs.len() {
                    for j in i + 1..xs.len() {
                        if xs[j][0] - xs[i][0] > tol {
                            break;
                        }
                        assert!((xs[i][0] - xs[j][0]).hypot(xs[i][1] - xs[j][1]) > tol, "{name} {kind:?}: duplicate point");
                    }
                }
                for p in &pts {
                    let (a, b) = p.zeta;
                    assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
                    let x = dom.patches[p.patch].point(p.zeta);
                    assert!((x[0] - p.x[0]).abs() <= 1e-12 && (x[1] - p.x[1]).abs() <= 1e-12);
                    match p.tag {
                        Tag::Dirichlet => assert!(on_boundary_side(&dom, p.patch, p.zeta), "{name}: Dirichlet point off the boundary"),
                        Tag::Interior | Tag::Neumann(_) => {
                            assert!(!on_boundary_side(&dom, p.patch, p.zeta), "{name}: interior row on the boundary")
                        }
                    }
                    if let Tag::Neumann(_) = p.tag {
                        let (side, zb) = (p.side.unwrap(), p.boundary.unwrap());
                        assert!(Side::of_point(zb, 1e-14).contains(&side));
                    }
                }
            }
        }
    }
}

#[test]
fn owner_is_the_smallest_patch() {
    let dom = builtin("G").unwrap();
    let pts = assemble_global(&dom, PointScheme { kind: SchemeKind::Greville, s: 2, k: 7 }, Problem::Poisson).unwrap();
    let e = &dom.inner_edges[0];
    let owner = e.patches[0].min(e.patches[1]);
    for p in &pts {
        let on_edge = Side::of_point(p.zeta, 1e-14).contains(&e.sides[if p.patch == e.patches[0] { 0 } else { 1 }]);
        if on_edge {
            assert_eq!(p.patch, owner);
        }
    }
}

#[test]
fn one_patch_systems_are_square() {
    for name in ["A", "D"] {
        let dom = builtin(name).unwrap();
        for problem in [Problem::Poisson, Problem::Biharmonic] {
            let s = problem.regularity();
            for k in [11, 15] {
                let dim = SmoothSpace::build(&dom, s, k).unwrap().dim();
                for kind in [SchemeKind::Greville, SchemeKind::Superconvergent] {
                    let n = assemble_global(&dom, PointScheme { kind, s, k }, problem).unwrap().len();
                    assert_eq!(n, dim, "{name} {problem:?} {kind:?} k={k}");
                }
            }
        }
    }
}

#[test]
fn poisson_counts_on_domain_g() {
    let dom = builtin("G").unwrap();
    for (kind, rows) in [(SchemeKind::Superconvergent, 939), (SchemeKind::Set2, 804)] {
        let n = assemble_global(&dom, PointScheme { kind, s: 2, k: 15 }, Problem::Poisson).unwrap().len();
        assert_eq!(n, rows, "{kind:?}");
    }
}

#[test]
fn tracks_are_symmetric_and_increasing() {
    for s in [2, 4] {
        for k in [10, 11, 15, 16, 31, 32] {
            let f = Factors::new(s, k).unwrap();
            for tr in [Tracks::greville(&f), Tracks::superconvergent(&f).unwrap()] {
                for seq in [&tr.high, &tr.low] {
                    assert!(seq.windows(2).all(|w| w[0] < w[1]), "s={s} k={k}");
                    assert_eq!(seq[0], 0.0);
                    assert_eq!(seq[seq.len() - 1], 1.0);
                }
            }
            // the clustered interior is one-sided by design; the end strips are mirrored
            let g = Tracks::greville(&f);
            let sc = Tracks::superconvergent(&f).unwrap();
            for seq in [&g.high, &g.low] {
                let n = seq.len();
                assert!((0..n).all(|j| (seq[j] + seq[n - 1 - j] - 1.0).abs() < 1e-13), "s={s} k={k}");
            }
            let n = sc.high.len();
            assert!((0..=s + s / 2).all(|j| (sc.high[j] + sc.high[n - 1 - j] - 1.0).abs() < 1e-13));
        }
    }
}
