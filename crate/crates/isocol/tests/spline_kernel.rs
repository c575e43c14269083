mod common;

use common::{greville_oracle, knots};
use isocol::spline_kernel::UnivariateSpace;
use proptest::prelude::*;

/// Cox-de Boor recursion, right-continuous except at x = 1.
fn cox_de_boor(t: &[f64], p: usize, j: usize, x: f64) -> f64 {
    if p == 0 {
        let last = t[t.len() - 1];
        let inside = t[j] <= x && x < t[j + 1];
        let at_end = x == last && t[j] < last && t[j + 1] == last;
        return if inside || at_end { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    if t[j + p] > t[j] {
        v += (x - t[j]) / (t[j + p] - t[j]) * cox_de_boor(t, p - 1, j, x);
    }
    if t[j + p + 1] > t[j + 1] {
        v += (t[j + p + 1] - x) / (t[j + p + 1] - t[j + 1]) * cox_de_boor(t, p - 1, j + 1, x);
    }
    v
}

const SPACES: [(usize, usize); 4] = [(3, 2), (5, 2), (5, 4), (9, 4)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn partition_of_unity(x in 0.0f64..=1.0, k in 4usize..20) {
        for (p, s) in SPACES {
            let sp = UnivariateSpace::new(p, s, k).unwrap();
            let row = &sp.eval_basis(x, 0).unwrap()[0];
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_cox_de_boor(x in 0.0f64..=1.0, k in 4usize..12) {
        for (p, s) in SPACES {
            let sp = UnivariateSpace::new(p, s, k).unwrap();
            let t = knots(p, s, k);
            let row = &sp.eval_basis(x, 0).unwrap()[0];
            for (j, v) in row.iter().enumerate() {
                let want = cox_de_boor(&t, p, j, x);
                prop_assert!((v - want).abs() <= 1e-12, "p={} j={} x={}: {} vs {}", p, j, x, v, want);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences(u in 0.0f64..1.0, k in 4usize..10) {
        // order-8 central stencil for the first derivative, away from knots
        const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let h = 1.0 / (k + 1) as f64;
        let e = ((u * (k + 1) as f64) as usize).min(k);
        let x = h * (e as f64 + 0.25 + 0.5 * u.fract());
        let step = 1e-3 * h;
        for (p, s) in SPACES {
            let sp = UnivariateSpace::new(p, s, k).unwrap();
            let d = &sp.eval_basis(x, 1).unwrap()[1];
            for j in 0..sp.dim() {
                let f = |y: f64| sp.eval_basis(y, 0).unwrap()[0][j];
                let fd: f64 = W.iter().enumerate().map(|(i, w)| {
                    let o = (i + 1) as f64 * step;
                    w * (f(x + o) - f(x - o))
                }).sum::<f64>() / step;
                let scale = d[j].abs().max(1.0 / h);
                prop_assert!((fd - d[j]).abs() <= 1e-7 * scale, "p={} j={}: {} vs {}", p, j, d[j], fd);
            }
        }
    }

    #[test]
    fn embed_is_exact(seed in any::<u64>(), k in 4usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for s in [2, 4] {
            let low = UnivariateSpace::new(s + 1, s, k).unwrap();
            let high = UnivariateSpace::new(2 * s + 1, s, k).unwrap();
            let c: Vec<f64> = (0..low.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = high.embed(&low, &c);
            prop_assert!(m.is_err());
            let e = low.embed(&high, &c).unwrap();
            let mut worst = 0.0f64;
            let mut size = 0.0f64;
            for i in 0..500 {
                let x = i as f64 / 499.0;
                let a = low.eval_spline(&c, x, 0)[0];
                worst = worst.max((a - high.eval_spline(&e, x, 0)[0]).abs());
                size = size.max(a.abs());
            }
            prop_assert!(worst <= 1e-12 * size);
        }
    }
}

#[test]
fn truncation_kills_end_jets() {
    for s in [2, 4] {
        for k in [8, 16] {
            let low = UnivariateSpace::new(s + 1, s, k).unwrap();
            let high = UnivariateSpace::new(2 * s + 1, s, k).unwrap();
            for j in 0..low.dim() {
                let c: Vec<f64> = low.truncate(j, &high, true, true).unwrap();
                for x in [0.0, 1.0] {
                    let jet = high.eval_spline(&c, x, s);
                    assert!(jet.iter().all(|v| v.abs() <= 1e-12), "s={s} k={k} j={j} x={x}: {jet:?}");
                }
            }
        }
    }
}

#[test]
fn greville_is_increasing_and_symmetric() {
    for (p, s) in SPACES {
        for k in [4, 8, 15] {
            let sp = UnivariateSpace::new(p, s, k).unwrap();
            let want = greville_oracle(p, s, k);
            let g: Vec<f64> = (0..sp.dim()).map(|j| sp.greville::<f64>(j).unwrap()).collect();
            assert_eq!(g.len(), want.len());
            for j in 0..g.len() {
                assert!((g[j] - want[j]).abs() < 1e-14);
                assert!((g[j] + g[g.len() - 1 - j] - 1.0).abs() < 1e-14);
                if j > 0 {
                    assert!(g[j] > g[j - 1]);
                }
            }
        }
    }
}

#[test]
fn mixed_greville_ordering() {
    for s in [2, 4] {
        for k in [8, 16, 32] {
            if let Err(e) = common::mixed_greville_ordering(s, k) {
                panic!("s={s} k={k}: {e}");
            }
        }
    }
}
