mod common;

use brickrl_core::metrics::{aggregate, sample_metrics, AggregateReport, SampleMetrics};
use brickrl_core::parser::{serialize_structure, Layout};
use common::{grid_in, structure_in, SMALL};
use proptest::prelude::*;

fn samples() -> impl Strategy<Value = Vec<SampleMetrics>> {
    prop::collection::vec(
        (structure_in(SMALL, 2, 8), grid_in(SMALL), any::<bool>(), 0.0f64..5.0).prop_map(|(s, t, garble, time)| {
            let mut text = serialize_structure(&s, Layout::OnePerLine);
            if garble {
                text.push_str("\noops");
            }
            sample_metrics(&text, &t, SMALL, time).unwrap()
        }),
        1..20,
    )
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * a.abs().max(1.0),
        (None, None) => true,
        _ => false,
    }
}

fn approx_eq(a: &AggregateReport, b: &AggregateReport) -> bool {
    close(Some(a.parse_rate), Some(b.parse_rate))
        && close(Some(a.coll_free_rate), Some(b.coll_free_rate))
        && close(a.mean_coll_voxels, b.mean_coll_voxels)
        && close(a.mean_voxel_iou, b.mean_voxel_iou)
        && close(a.conn_ratio, b.conn_ratio)
        && close(a.connected_rate, b.connected_rate)
        && close(a.interlock_score, b.interlock_score)
        && close(a.seam_cov, b.seam_cov)
        && close(a.in_bounds_rate, b.in_bounds_rate)
        && close(a.mean_bricks, b.mean_bricks)
        && close(Some(a.avg_time_s), Some(b.avg_time_s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn order_invariant(mut s in samples()) {
        let a = aggregate(&s).unwrap();
        s.reverse();
        prop_assert_eq!(aggregate(&s).unwrap(), a);
    }

    #[test]
    fn replication_invariant(s in samples(), k in 1usize..5) {
        let a = aggregate(&s).unwrap();
        let dup: Vec<_> = s.iter().cloned().cycle().take(s.len() * k).collect();
        let b = aggregate(&dup).unwrap();
        prop_assert_eq!(b.n_total, a.n_total * k);
        prop_assert!(approx_eq(&a, &b), "{a:?} vs {b:?}");
        // Count-based rates are exact.
        prop_assert_eq!(a.parse_rate, b.parse_rate);
        prop_assert_eq!(a.coll_free_rate, b.coll_free_rate);
    }

    #[test]
    fn aggregates_in_range(s in samples()) {
        let a = aggregate(&s).unwrap();
        let unit = [Some(a.parse_rate), Some(a.coll_free_rate), a.mean_voxel_iou, a.conn_ratio,
            a.connected_rate, a.interlock_score, a.seam_cov, a.in_bounds_rate];
        for v in unit.into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for v in [a.mean_coll_voxels, a.mean_bricks, Some(a.avg_time_s)].into_iter().flatten() {
            prop_assert!(v >= 0.0);
        }
        for m in &s {
            if m.collision_free {
                prop_assert_eq!(m.n_col, 0);
            }
        }
    }
}
