mod common;

use proptest::prelude::*;
use robust_coreset::cost::{inlier_assignment, point_costs, robust_cost, robust_cost_weighted};
use robust_coreset::{CenterSet, Dataset, Power, WeightedSet};

fn power() -> impl Strategy<Value = Power> {
    prop_oneof![Just(Power::One), Just(Power::Two)]
}

fn small_weighted() -> impl Strategy<Value = (Vec<f64>, Vec<u32>, f64, Power)> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-20i32..=20, n).prop_map(|v| v.into_iter().map(|x| x as f64 * 0.5).collect()),
            prop::collection::vec(1u32..=3, n),
            -10i32..=10,
            power(),
        )
            .prop_map(|(xs, ws, c, p)| (xs, ws, c as f64 * 0.5, p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn weighted_cost_matches_exhaustive_allocation((xs, ws, c, p) in small_weighted()) {
        let set = WeightedSet::new(Dataset::from_scalars(&xs).unwrap(), ws.iter().map(|&w| w as f64).collect()).unwrap();
        let center = CenterSet::scalar(c, p).unwrap();
        let costs = point_costs(set.points(), &center).unwrap();
        let brute = common::brute_weighted_costs(&costs, &ws);
        for (m, want) in brute.iter().enumerate() {
            let got = robust_cost_weighted(&set, &center, m as f64).unwrap();
            prop_assert!((got - want).abs() <= 1e-9, "m = {}: {} vs {}", m, got, want);
        }
    }

    #[test]
    fn cost_is_monotone_in_m(xs in prop::collection::vec(-1e3f64..1e3, 1..40), c in -1e3f64..1e3, p in power()) {
        let pts = Dataset::from_scalars(&xs).unwrap();
        let center = CenterSet::scalar(c, p).unwrap();
        let mut prev = f64::INFINITY;
        for m in 0..=xs.len() {
            let cost = robust_cost(&pts, &center, m).unwrap();
            prop_assert!(cost <= prev);
            prev = cost;
        }
    }

    #[test]
    fn unit_weights_reduce_to_unweighted(
        rows in prop::collection::vec(prop::collection::vec(-50f64..50.0, 3), 1..30),
        m_frac in 0f64..1.0,
        p in power(),
    ) {
        let pts = Dataset::from_rows(&rows).unwrap();
        let m = (m_frac * rows.len() as f64) as usize;
        let center = CenterSet::single(&[1.0, -2.0, 0.5], p).unwrap();
        let unweighted = robust_cost(&pts, &center, m).unwrap();
        let weighted = robust_cost_weighted(&WeightedSet::unit(pts), &center, m as f64).unwrap();
        prop_assert_eq!(unweighted, weighted);
    }

    #[test]
    fn assignment_structure(
        xs in prop::collection::vec(-100f64..100.0, 1..30),
        ws in prop::collection::vec(0.1f64..5.0, 30),
        m_frac in 0f64..1.0,
        c in -100f64..100.0,
        seed in any::<u64>(),
    ) {
        let n = xs.len();
        let weights = ws[..n].to_vec();
        let set = WeightedSet::new(Dataset::from_scalars(&xs).unwrap(), weights.clone()).unwrap();
        let m = m_frac * set.total_weight();
        let center = CenterSet::scalar(c, Power::One).unwrap();
        let a = inlier_assignment(&set, &center, m).unwrap();
        let kept: f64 = a.kept_weight.iter().sum();
        prop_assert!((kept - (set.total_weight() - m)).abs() <= 1e-9 * set.total_weight());
        let partial: Vec<usize> = (0..n).filter(|&i| a.kept_weight[i] > 0.0 && a.kept_weight[i] < weights[i]).collect();
        prop_assert!(partial.len() <= 1);
        prop_assert!(partial.len() == a.partial_index.iter().count());
        if let Some(pi) = a.partial_index {
            let dp = (xs[pi] - c).abs();
            for i in 0..n {
                if a.kept_weight[i] == weights[i] {
                    prop_assert!((xs[i] - c).abs() <= dp);
                }
            }
        }

        // Permuting the input keeps the cost and the kept (distance, weight) multiset.
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pxs: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        let pws: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
        let pset = WeightedSet::new(Dataset::from_scalars(&pxs).unwrap(), pws).unwrap();
        let b = inlier_assignment(&pset, &center, m).unwrap();
        prop_assert!((a.cost - b.cost).abs() <= 1e-9 * a.cost.max(1.0));
        let mut ka: Vec<(f64, f64)> = (0..n).filter(|&i| a.kept_weight[i] > 0.0).map(|i| ((xs[i] - c).abs(), a.kept_weight[i])).collect();
        let mut kb: Vec<(f64, f64)> = (0..n).filter(|&i| b.kept_weight[i] > 0.0).map(|i| ((pxs[i] - c).abs(), b.kept_weight[i])).collect();
        let key = |v: &(f64, f64), w: &(f64, f64)| v.0.total_cmp(&w.0).then(v.1.total_cmp(&w.1));
        ka.sort_by(key);
        kb.sort_by(key);
        prop_assert_eq!(ka.iter().map(|v| v.0).collect::<Vec<_>>(), kb.iter().map(|v| v.0).collect::<Vec<_>>());
        let total = |v: &[(f64, f64)]| v.iter().map(|x| x.1).sum::<f64>();
        prop_assert!((total(&ka) - total(&kb)).abs() <= 1e-9 * set.total_weight());
    }

    #[test]
    fn multi_center_cost_uses_nearest(
        rows in prop::collection::vec(prop::collection::vec(-10f64..10.0, 2), 2..20),
        m in 0usize..3,
    ) {
        let pts = Dataset::from_rows(&rows).unwrap();
        let m = m.min(rows.len());
        let centers = CenterSet::new(Dataset::from_rows(&[[0.0, 0.0], [5.0, 5.0]]).unwrap(), Power::Two).unwrap();
        let mut costs: Vec<f64> = rows
            .iter()
            .map(|r| {
                let a = r[0] * r[0] + r[1] * r[1];
                let b = (r[0] - 5.0).powi(2) + (r[1] - 5.0).powi(2);
                a.min(b)
            })
            .collect();
        costs.sort_by(f64::total_cmp);
        let want: f64 = costs[..rows.len() - m].iter().sum();
        let got = robust_cost(&pts, &centers, m).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let pts = Dataset::from_rows(&[[0.0, 0.0]]).unwrap();
    let c = CenterSet::scalar(0.0, Power::One).unwrap();
    assert!(robust_cost(&pts, &c, 0).is_err());
    assert!(robust_coreset::geometry::dist(&[0.0, 0.0], &[3.0, 4.0]).unwrap() == 5.0);
    assert!(robust_coreset::geometry::dist(&[2.0], &[-1.0]).unwrap() == 3.0);
    assert!(robust_coreset::geometry::dist(&[2.0], &[-1.0, 0.0]).is_err());
}
