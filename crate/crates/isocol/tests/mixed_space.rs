use isocol::mixed_space::{dimension, variant_v, Dihedral, EdgeFlags, MixedDegreeSpace2D, Variant};
use proptest::prelude::*;

fn all_flags() -> Vec<(Variant, EdgeFlags)> {
    let mut out = Vec::new();
    for v in Variant::ALL {
        for d in Dihedral::all() {
            let f = v.canonical_flags().mapped(&d);
            if !out.iter().any(|(_, g)| *g == f) {
                out.push((v, f));
            }
        }
    }
    out
}

#[test]
fn dimension_formula_matches_enumeration() {
    let mut seen_v = [false; 3];
    for (variant, flags) in all_flags() {
        for s in [2, 4] {
            for k in [4, 8] {
                let sp = MixedDegreeSpace2D::build(s, k, flags).unwrap();
                let v = variant_v(variant);
                seen_v[v] = true;
                assert_eq!(sp.dim(), dimension(s, k, flags.inner_count(), v), "{variant:?} {flags:?} s={s} k={k}");
                assert_eq!(sp.basis.len(), sp.dim());
            }
        }
    }
    assert_eq!(seen_v, [true; 3]);
}

#[test]
fn both_two_edge_variants_share_the_formula() {
    for s in [2, 4] {
        for k in [4, 8] {
            let adj = MixedDegreeSpace2D::build(s, k, Variant::TwoAdjacent.canonical_flags()).unwrap();
            let opp = MixedDegreeSpace2D::build(s, k, Variant::TwoOpposite.canonical_flags()).unwrap();
            assert_eq!(adj.dim(), dimension(s, k, 2, variant_v(Variant::TwoAdjacent)));
            assert_eq!(opp.dim(), dimension(s, k, 2, variant_v(Variant::TwoOpposite)));
        }
    }
}

fn spaces() -> Vec<MixedDegreeSpace2D> {
    let mut v = Vec::new();
    for (_, flags) in all_flags() {
        for s in [2, 4] {
            for k in [4, 8] {
                v.push(MixedDegreeSpace2D::build(s, k, flags).unwrap());
            }
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity_and_nonnegativity(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        for sp in spaces() {
            let vals = sp.eval((x, y), 0).unwrap();
            let sum: f64 = vals.iter().map(|r| r[0]).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-13, "sum {} at ({}, {})", sum, x, y);
            let min = vals.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
            prop_assert!(min >= -1e-13, "min {} at ({}, {})", min, x, y);
        }
    }

    #[test]
    fn derivatives_of_the_unit_sum_vanish(x in 0.01f64..0.99, y in 0.01f64..0.99) {
        let sp = MixedDegreeSpace2D::build(2, 8, Variant::Four.canonical_flags()).unwrap();
        let vals = sp.eval((x, y), 2).unwrap();
        for c in 1..vals[0].len() {
            let sum: f64 = vals.iter().map(|r| r[c]).sum();
            prop_assert!(sum.abs() <= 1e-9, "column {} sums to {}", c, sum);
        }
    }
}

#[test]
fn dihedral_consistency() {
    // build(flags) mapped by d equals build(mapped flags), as sets of functions on a grid
    let grid: Vec<(f64, f64)> = (0..20).flat_map(|i| (0..20).map(move |j| (i as f64 / 19.0, j as f64 / 19.0))).collect();
    for v in Variant::ALL {
        let base = MixedDegreeSpace2D::build(2, 8, v.canonical_flags()).unwrap();
        for d in Dihedral::all() {
            let mapped = MixedDegreeSpace2D::build(2, 8, v.canonical_flags().mapped(&d)).unwrap();
            assert_eq!(base.dim(), mapped.dim());
            let inv = d.inverse();
            let sample = |sp: &MixedDegreeSpace2D, f: &dyn Fn((f64, f64)) -> (f64, f64)| -> Vec<Vec<f64>> {
                let mut cols = vec![Vec::new(); sp.dim()];
                for &p in &grid {
                    let (x, y) = f(p);
                    for (c, r) in cols.iter_mut().zip(sp.eval((x, y), 0).unwrap()) {
                        c.push(r[0]);
                    }
                }
                cols
            };
            let a = sample(&base, &|p| inv.apply(p.0, p.1));
            let mut b = sample(&mapped, &|p| p);
            for col in &a {
                let dev = |c: &Vec<f64>| col.iter().zip(c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                let best = (0..b.len()).min_by(|&i, &j| dev(&b[i]).total_cmp(&dev(&b[j]))).unwrap();
                assert!(dev(&b[best]) <= 1e-12, "{v:?} {d:?}: no match, deviation {:e}", dev(&b[best]));
                b.swap_remove(best);
            }
        }
    }
}
