//! Property tests for the map layer: Lipschitz evaluation, submultiplicative
//! derivative norms, and partition structure over the tent family.

use entromap_core::maps::{tent, PiecewiseMonotoneMap};
use entromap_core::scalar::Scalar;
use proptest::prelude::*;

fn tent_slope() -> impl Strategy<Value = (i64, i64)> {
    // rational slopes in (1, 2]
    (11i64..=20, Just(10i64))
}

fn map_of(slope: (i64, i64)) -> PiecewiseMonotoneMap {
    tent(Scalar::ratio(slope.0, slope.1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_is_lipschitz_within_pieces(slope in tent_slope(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let m = map_of(slope);
        let lip = m.sup_deriv_norm(1, 1 << 16).unwrap().to_f64();
        // clamp the pair into one piece
        let (lo, hi) = if a <= 0.5 { (0.0, 0.5) } else { (0.5, 1.0) };
        let x = lo + (hi - lo) * a.fract();
        let y = lo + (hi - lo) * b.fract();
        let fx = m.eval_f64(x).unwrap();
        let fy = m.eval_f64(y).unwrap();
        prop_assert!((fx - fy).abs() <= lip * (x - y).abs() + 1e-12);
    }

    #[test]
    fn sup_deriv_norm_is_submultiplicative(slope in tent_slope(), mn in (1usize..=4, 1usize..=4)) {
        let m = map_of(slope);
        let (p, q) = mn;
        let npq = m.sup_deriv_norm(p + q, 1 << 20).unwrap().to_f64();
        let np = m.sup_deriv_norm(p, 1 << 20).unwrap().to_f64();
        let nq = m.sup_deriv_norm(q, 1 << 20).unwrap().to_f64();
        prop_assert!(npq <= np * nq * (1.0 + 1e-12));
    }

    #[test]
    fn partition_branches_avoid_critical_interiors(slope in tent_slope()) {
        let m = map_of(slope);
        let crit = m.critical_set().unwrap();
        let partition = m.natural_partition().unwrap();
        for b in &partition.branches {
            for c in &crit.points {
                prop_assert!(!b.contains(c), "critical point {c} inside branch {b}");
            }
        }
        // branches cover everything except the critical cut
        let total: f64 = partition.branches.iter().map(|b| b.length().to_f64()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lap_counts_are_submultiplicative(slope in tent_slope()) {
        let m = map_of(slope);
        let laps = m.lap_counts_upto(8, 1 << 20).unwrap();
        let l = |n: usize| laps[n - 1];
        for p in 1..=4usize {
            for q in 1..=4usize {
                prop_assert!(l(p + q) <= l(p) * l(q));
            }
        }
    }
}
