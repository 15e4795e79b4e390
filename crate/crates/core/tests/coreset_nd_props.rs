use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_coreset::coreset_nd::{
    build_inlier_coreset, build_robust_kz, build_robust_nd, check_assumptions, sample_outlier_coreset, NdCoresetConfig,
};
use robust_coreset::cost::{outlier_split, robust_cost, robust_cost_weighted};
use robust_coreset::eval::{empirical_error, inlier_outlier_gap, sample_centers};
use robust_coreset::instances::{gen_gaussian_clusters, GaussianSpec};
use robust_coreset::solver::{lloyd_with_outliers, LloydConfig};
use robust_coreset::{CenterSet, CoresetError, Dataset, Power, WeightedSet};

fn gauss(n: usize, d: usize, k: usize, m: usize, seed: u64) -> Dataset {
    gen_gaussian_clusters(&GaussianSpec { n, d, k, m, spread: 1.0, seed }).unwrap().points
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weights_sum_to_n(
        seed in any::<u64>(),
        n in 200usize..800,
        m_frac in 0f64..0.25,
        k in 1usize..4,
        z in 1u32..=2,
        so in 1usize..80,
        si in 1usize..200,
    ) {
        let m = (m_frac * n as f64) as usize;
        let pts = gauss(n, 3, k, m, seed);
        let power = Power::from_exponent(z).unwrap();
        let centers = lloyd_with_outliers(&pts, k, m, power, 10, seed).unwrap().centers;
        let cfg = NdCoresetConfig::new(0.2, seed).with_sizes(so, si);
        let cs = build_robust_kz(&pts, m, &cfg, &centers).unwrap();
        prop_assert!((cs.set.total_weight() - n as f64).abs() <= 1e-9 * n as f64);
        prop_assert!((cs.outlier_part.total_weight() - m as f64).abs() <= 1e-9 * n as f64);
        prop_assert!((cs.inlier_part.total_weight() - (n - m) as f64).abs() <= 1e-9 * n as f64);
        prop_assert!(cs.outlier_part.len() == so.min(m));
        prop_assert!(cs.inlier_part.len() <= si);
        prop_assert_eq!(cs.set.len(), cs.outlier_part.len() + cs.inlier_part.len());
        let again = build_robust_kz(&pts, m, &cfg, &centers).unwrap();
        prop_assert_eq!(&cs, &again);
    }

    #[test]
    fn per_point_gap_is_bounded(seed in any::<u64>(), m in 20usize..100) {
        let n = 4 * m + 400;
        let pts = gauss(n, 2, 1, m, seed);
        let c_star = lloyd_with_outliers(&pts, 1, m, Power::One, 30, seed).unwrap().centers;
        let split = outlier_split(&pts, &c_star, m).unwrap();
        for c in sample_centers(&pts, 1, Power::One, 50, seed).unwrap() {
            let (t_i, t_o) = inlier_outlier_gap(&pts, &split, &c).unwrap();
            let cost = robust_cost(&pts, &c, m).unwrap();
            prop_assert!(t_i - t_o <= 16.0 * cost / m as f64, "T_I - T_O = {} vs cost/m = {}", t_i - t_o, cost / m as f64);
        }
    }
}

#[test]
fn outlier_sample_examples() {
    let outliers = Dataset::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]).unwrap();
    let full = sample_outlier_coreset(&outliers, 5, 1).unwrap();
    assert_eq!(full, WeightedSet::unit(outliers.clone()));
    for size in 1..=3 {
        let s = sample_outlier_coreset(&outliers, size, 7).unwrap();
        assert_eq!(s.len(), size);
        assert!((s.total_weight() - 3.0).abs() < 1e-12);
    }
    assert!(sample_outlier_coreset(&outliers, 0, 1).is_err());
}

#[test]
fn identical_inliers_get_uniform_weights() {
    let pts = Dataset::from_rows(&vec![[1.0, 1.0]; 50]).unwrap();
    let c = CenterSet::single(&[1.0, 1.0], Power::Two).unwrap();
    let s = build_inlier_coreset(&pts, &c, 10, 3).unwrap();
    let draws = 10.0;
    let per_draw = 50.0 / draws;
    for w in s.weights() {
        let k = (w / per_draw).round();
        assert!((w - k * per_draw).abs() < 1e-9);
    }
    assert!((s.total_weight() - 50.0).abs() < 1e-9);
}

#[test]
fn inlier_weights_normalized_over_many_instances() {
    for seed in 0..100 {
        let pts = gauss(300, 3, 2, 0, seed);
        let c = CenterSet::new(Dataset::from_rows(&[[0.0; 3], [1.0; 3]]).unwrap(), Power::One).unwrap();
        let s = build_inlier_coreset(&pts, &c, 40, seed).unwrap();
        assert!((s.total_weight() - 300.0).abs() <= 1e-9 * 300.0);
    }
}

/// The inlier coreset's contract: for a random outlier-like set `P_O`, outlier count `t`
/// and center `C`, replacing `P_I*` by `S_I` moves the robust cost by at most
/// `eps cost(P_O ∪ P_I*) + 2 eps cost(P_I*, C*)`. Statistical: at least 95% of draws.
#[test]
fn inlier_coreset_error_contract() {
    let eps = 0.2;
    let mut pass = 0;
    let trials = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..trials {
        let seed = trial as u64 / 20;
        let pts = gauss(1000, 2, 1, 50, seed);
        let c_star = lloyd_with_outliers(&pts, 1, 50, Power::One, 30, seed).unwrap().centers;
        let split = outlier_split(&pts, &c_star, 50).unwrap();
        let inliers = pts.select(&split.inliers);
        let base = robust_cost(&inliers, &c_star, 0).unwrap();
        let size = robust_coreset::coreset_nd::default_inlier_size(eps, 1, Power::One, 2, 1.0);
        let s_i = build_inlier_coreset(&inliers, &c_star, size, seed).unwrap();

        let count = rng.random_range(0..40);
        let spread = 50.0 * rng.random::<f64>();
        let rows: Vec<[f64; 2]> =
            (0..count).map(|_| [spread * (rng.random::<f64>() - 0.5), spread * (rng.random::<f64>() - 0.5)]).collect();
        let p_o = WeightedSet::unit(if rows.is_empty() { Dataset::empty(2) } else { Dataset::from_rows(&rows).unwrap() });
        let t = rng.random_range(0..=count + 20);
        let c = sample_centers(&pts, 1, Power::One, 1, rng.random()).unwrap().remove(0);

        let full = p_o.union(&WeightedSet::unit(inliers.clone())).unwrap();
        let approx = p_o.union(&s_i).unwrap();
        let a = robust_cost_weighted(&full, &c, t as f64).unwrap();
        let b = robust_cost_weighted(&approx, &c, t as f64).unwrap();
        if (a - b).abs() <= eps * a + 2.0 * eps * base {
            pass += 1;
        }
    }
    assert!(pass * 100 >= trials * 95, "{pass}/{trials} draws met the contract");
}

#[test]
fn geometric_median_coreset_error() {
    let eps = 0.1;
    let pts = gauss(10_000, 5, 1, 200, 4);
    let c_star = lloyd_with_outliers(&pts, 1, 200, Power::One, 30, 4).unwrap().centers;
    let cfg = NdCoresetConfig::new(eps, 4);
    let cs = build_robust_nd(&pts, 200, &cfg, &c_star).unwrap();
    assert_eq!(cs.set.total_weight().round(), 10_000.0);
    let err = empirical_error(&pts, &cs.set, 200, 1, Power::One, 500, 4).unwrap();
    assert!(err.max_error <= 2.0 * eps, "max error {}", err.max_error);
}

#[test]
fn nd_matches_kz_for_single_center() {
    let pts = gauss(2000, 3, 1, 40, 2);
    let c = lloyd_with_outliers(&pts, 1, 40, Power::One, 20, 2).unwrap().centers;
    let cfg = NdCoresetConfig::new(0.2, 9).with_sizes(30, 60);
    assert_eq!(build_robust_nd(&pts, 40, &cfg, &c).unwrap(), build_robust_kz(&pts, 40, &cfg, &c).unwrap());
    let two = CenterSet::new(Dataset::from_rows(&[[0.0; 3], [1.0; 3]]).unwrap(), Power::One).unwrap();
    assert!(build_robust_nd(&pts, 40, &cfg, &two).is_err());
    let small = gauss(100, 3, 1, 30, 2);
    assert!(matches!(build_robust_nd(&small, 30, &cfg, &c), Err(CoresetError::AssumptionViolation(_))));
    let mut loose = cfg.clone();
    loose.allow_small_n = true;
    assert!(build_robust_nd(&small, 30, &loose, &c).is_ok());
}

#[test]
fn m_zero_gives_inlier_coreset_alone() {
    let pts = gauss(500, 2, 1, 0, 5);
    let c = CenterSet::single(&[0.0, 0.0], Power::One).unwrap();
    let cfg = NdCoresetConfig::new(0.2, 1).with_sizes(10, 50);
    let cs = build_robust_nd(&pts, 0, &cfg, &c).unwrap();
    assert!(cs.outlier_part.is_empty());
    assert_eq!(cs.set, cs.inlier_part);
}

#[test]
fn assumptions_hold_on_default_gaussian_instance() {
    let spec = GaussianSpec::default();
    let data = gen_gaussian_clusters(&spec).unwrap();
    let cfg = LloydConfig::new(spec.k, spec.m as f64, Power::One, 0);
    let centers = robust_coreset::solver::lloyd_weighted(&WeightedSet::unit(data.points.clone()), &cfg).unwrap().centers;
    let report = check_assumptions(&data.points, &centers, spec.m).unwrap();
    assert!(report.holds(), "{:?}", report.violations(spec.m, spec.k));
    assert_eq!(report.cluster_sizes.iter().sum::<usize>(), spec.n - spec.m);
}

#[test]
fn single_tight_cluster_satisfies_assumptions() {
    let mut rows: Vec<[f64; 2]> = (0..400).map(|i| [((i % 20) as f64) * 0.01, ((i / 20) as f64) * 0.01]).collect();
    rows.extend([[100.0, 100.0], [-100.0, 50.0]]);
    let pts = Dataset::from_rows(&rows).unwrap();
    let c = CenterSet::single(&[0.095, 0.095], Power::One).unwrap();
    let report = check_assumptions(&pts, &c, 2).unwrap();
    assert!(report.cond1 && report.cond2);
    assert_eq!(report.cluster_sizes, vec![400]);
}

#[test]
fn builder_matches_reference_composition() {
    for (seed, k, z) in [(1u64, 1usize, 1u32), (2, 3, 2), (3, 2, 1)] {
        let pts = gauss(3000, 4, k, 60, seed);
        let power = Power::from_exponent(z).unwrap();
        let c = lloyd_with_outliers(&pts, k, 60, power, 10, seed).unwrap().centers;
        let cfg = NdCoresetConfig::new(0.2, seed).with_sizes(25, 300);
        let fast = build_robust_kz(&pts, 60, &cfg, &c).unwrap();
        let split = outlier_split(&pts, &c, 60).unwrap();
        assert_eq!(fast.split, split);
        let s_o = sample_outlier_coreset(&pts.select(&split.outliers), 25, seed).unwrap();
        let s_i = build_inlier_coreset(&pts.select(&split.inliers), &c, 300, seed).unwrap();
        assert_eq!(fast.outlier_part, s_o);
        assert_eq!(fast.inlier_part, s_i);
        assert_eq!(fast.assumptions, check_assumptions(&pts, &c, 60).unwrap());
    }
}
