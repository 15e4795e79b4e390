//! Centers fed to the coreset builders.
//!
//! * [`robust_median_1d`]: exact robust geometric median on the line, `O(n)` after sorting.
//! * [`kmeanspp_seed`]: classic `D^z` seeding.
//! * [`lloyd_with_outliers`] / [`lloyd_weighted`]: Lloyd iterations that drop the
//!   current `m` farthest points before every recentering step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{assign_by_costs, robust_cost};
use crate::error::{invalid, Result};
use crate::geometry::{CenterSet, Dataset, Power, WeightedSet};
use crate::numeric::{pairwise_sum, rng_stream};

/// A solution together with its robust cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub centers: CenterSet,
    pub cost: f64,
    /// Inclusive index range of the inliers (1D solver only).
    pub inlier_window: Option<(usize, usize)>,
    pub iterations: usize,
    /// Robust cost after each Lloyd step, starting with the seeding.
    pub cost_trace: Vec<f64>,
}

/// Start of the contiguous window of `keep` points nearest to `c` in a sorted slice.
///
/// Equal distances on both sides resolve to the left window.
pub fn nearest_window(sorted: &[f64], c: f64, keep: usize) -> usize {
    let n = sorted.len();
    debug_assert!(keep >= 1 && keep <= n);
    let (mut lo, mut hi) = (0, n - keep);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if c - sorted[mid] > sorted[mid + keep] - c {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check_sorted(sorted: &[f64]) -> Result<()> {
    if sorted.iter().any(|x| !x.is_finite()) {
        return invalid("values must be finite");
    }
    if sorted.windows(2).any(|w| w[0] > w[1]) {
        return invalid("values must be sorted ascending");
    }
    Ok(())
}

/// `sum_{i in [l, r]} |p_i - p_k|` for a median index `k`, evaluated directly.
fn window_cost(sorted: &[f64], l: usize, r: usize, k: usize) -> f64 {
    let c = sorted[k];
    let terms: Vec<f64> = sorted[l..=r].iter().map(|p| (p - c).abs()).collect();
    pairwise_sum(&terms)
}

/// Exact robust 1D geometric median.
///
/// The inliers of an optimal center form a contiguous window of `n - m` points
/// and the center is that window's (lower) median. All `m + 1` windows are scored
/// in `O(1)` each from prefix sums; the smallest left index wins ties.
pub fn robust_median_1d(sorted: &[f64], m: usize) -> Result<SolveResult> {
    let n = sorted.len();
    if m >= n {
        return invalid(format!("need m < n (m = {m}, n = {n})"));
    }
    check_sorted(sorted)?;
    let width = n - m;
    let base = sorted[0];
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for p in sorted {
        acc += p - base;
        prefix.push(acc);
    }
    let score = |l: usize| {
        let r = l + width - 1;
        let k = l + (width - 1) / 2;
        let c = sorted[k] - base;
        let below = (k - l) as f64 * c - (prefix[k] - prefix[l]);
        let above = (prefix[r + 1] - prefix[k + 1]) - (r - k) as f64 * c;
        below + above
    };
    let mut best = (0, score(0));
    for l in 1..=m {
        let s = score(l);
        if s < best.1 {
            best = (l, s);
        }
    }
    let l = best.0;
    let r = l + width - 1;
    let k = l + (width - 1) / 2;
    let cost = window_cost(sorted, l, r, k);
    Ok(SolveResult {
        centers: CenterSet::scalar(sorted[k], Power::One)?,
        cost,
        inlier_window: Some((l, r)),
        iterations: 0,
        cost_trace: vec![cost],
    })
}

/// Draw an index with probability proportional to `mass`; `None` if all mass is zero.
fn draw_proportional(mass: &[f64], rng: &mut impl Rng) -> Option<usize> {
    let total = pairwise_sum(mass);
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in mass.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if acc > target {
                return Some(i);
            }
        }
    }
    last
}

fn draw_unchosen(n: usize, chosen: &[usize], rng: &mut impl Rng) -> usize {
    let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
    free[rng.random_range(0..free.len())]
}

/// k-means++ style seeding: each new center is an input point drawn with
/// probability proportional to `dist(p, chosen)^z`.
pub fn kmeanspp_seed(points: &Dataset, k: usize, power: Power, seed: u64) -> Result<CenterSet> {
    let n = points.len();
    if k == 0 || k > n {
        return invalid(format!("need 1 <= k <= n (k = {k}, n = {n})"));
    }
    let mut rng = rng_stream(seed, 0);
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest_sq: Vec<f64> =
        points.rows().map(|p| crate::geometry::sq_dist(p, points.row(chosen[0]))).collect();
    while chosen.len() < k {
        let mass: Vec<f64> = nearest_sq.iter().map(|&d| power.of_sq(d)).collect();
        let next = match draw_proportional(&mass, &mut rng) {
            Some(i) if !chosen.contains(&i) => i,
            _ => draw_unchosen(n, &chosen, &mut rng),
        };
        chosen.push(next);
        let c = points.row(next);
        for (d, p) in nearest_sq.iter_mut().zip(points.rows()) {
            *d = d.min(crate::geometry::sq_dist(p, c));
        }
    }
    CenterSet::new(points.select(&chosen), power)
}

/// Parameters of the outlier-aware Lloyd heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub k: usize,
    /// Outlier mass removed before each recentering.
    pub m: f64,
    pub power: Power,
    pub max_iters: usize,
    /// Independent seedings; the lowest final cost wins.
    pub restarts: usize,
    pub seed: u64,
    /// Relative improvement below which iteration stops.
    pub tol: f64,
}

impl LloydConfig {
    pub fn new(k: usize, m: f64, power: Power, seed: u64) -> Self {
        Self { k, m, power, max_iters: 50, restarts: 3, seed, tol: 1e-9 }
    }
}

/// `D^z` seeding on a weighted set that ignores the current `m` farthest mass.
///
/// Plain `D^z` sampling is drawn to far outliers; trimming them from the
/// candidate pool keeps seeds inside the inlier clusters.
fn trimmed_seed(set: &WeightedSet, k: usize, m: f64, power: Power, rng: &mut impl Rng) -> Result<CenterSet> {
    let n = set.len();
    let weights = set.weights();
    let pts = set.points();
    let first = draw_proportional(weights, rng).unwrap_or(0);
    let mut chosen = vec![first];
    let mut nearest_sq: Vec<f64> = pts.rows().map(|p| crate::geometry::sq_dist(p, pts.row(first))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    while chosen.len() < k.min(n) {
        order.sort_unstable_by(|&a, &b| nearest_sq[b].total_cmp(&nearest_sq[a]).then(a.cmp(&b)));
        let mut mass: Vec<f64> = weights.to_vec();
        let mut to_drop = m;
        for &i in &order {
            if to_drop <= 0.0 {
                break;
            }
            let cut = mass[i].min(to_drop);
            mass[i] -= cut;
            to_drop -= cut;
        }
        for (w, &d) in mass.iter_mut().zip(&nearest_sq) {
            *w *= power.of_sq(d);
        }
        let next = match draw_proportional(&mass, rng) {
            Some(i) if !chosen.contains(&i) => i,
            _ => draw_unchosen(n, &chosen, rng),
        };
        chosen.push(next);
        let c = pts.row(next);
        for (d, p) in nearest_sq.iter_mut().zip(pts.rows()) {
            *d = d.min(crate::geometry::sq_dist(p, c));
        }
    }
    CenterSet::new(pts.select(&chosen), power)
}

fn weighted_median(values: &mut [(f64, f64)]) -> f64 {
    values.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = values.iter().map(|v| v.1).sum();
    let mut acc = 0.0;
    for &(x, w) in values.iter() {
        acc += w;
        if acc >= 0.5 * total {
            return x;
        }
    }
    values.last().map(|v| v.0).unwrap_or(0.0)
}

/// Lloyd iterations from given initial centers on a weighted set.
///
/// Each step (a) keeps the weight-`w(S) - m` nearest mass, (b) assigns it to the
/// nearest center and (c) recenters: weighted mean for `z = 2`, coordinate-wise
/// weighted median for `z = 1`. A `z = 1` recentering that would raise its
/// cluster's cost is rejected, so the robust cost never increases. A center that
/// keeps no mass is moved onto the farthest kept point.
pub fn lloyd_from(set: &WeightedSet, init: CenterSet, m: f64, max_iters: usize, tol: f64) -> Result<SolveResult> {
    init.check_dim(set.dim())?;
    let power = init.power();
    let dim = set.dim();
    let k = init.k();
    let pts = set.points();
    let weights = set.weights();
    let mut centers = init;
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let nearest: Vec<(usize, f64)> = pts.rows().map(|p| centers.nearest(p)).collect();
        let costs: Vec<f64> = nearest.iter().map(|&(_, d)| power.of_sq(d)).collect();
        let assignment = assign_by_costs(&costs, weights, m)?;
        let cost = assignment.cost;
        if let Some(&prev) = trace.last() {
            trace.push(cost);
            if prev - cost <= tol * prev {
                break;
            }
        } else {
            trace.push(cost);
        }
        if iterations >= max_iters {
            break;
        }
        iterations += 1;

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &(j, _)) in nearest.iter().enumerate() {
            if assignment.kept_weight[i] > 0.0 {
                members[j].push(i);
            }
        }
        let mut next = centers.centers().as_flat().to_vec();
        let mut reseeded: Vec<usize> = Vec::new();
        for (j, idx) in members.iter().enumerate() {
            let slot = &mut next[j * dim..(j + 1) * dim];
            if idx.is_empty() {
                let far = (0..set.len())
                    .filter(|&i| assignment.kept_weight[i] > 0.0 && !reseeded.contains(&i))
                    .max_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(b.cmp(&a)));
                if let Some(i) = far {
                    slot.copy_from_slice(pts.row(i));
                    reseeded.push(i);
                }
                continue;
            }
            let kept = |i: usize| assignment.kept_weight[i];
            let candidate: Vec<f64> = match power {
                Power::Two => {
                    let mass: f64 = idx.iter().map(|&i| kept(i)).sum();
                    (0..dim)
                        .map(|t| idx.iter().map(|&i| kept(i) * pts.row(i)[t]).sum::<f64>() / mass)
                        .collect()
                }
                Power::One => {
                    let mut buf: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
                    (0..dim)
                        .map(|t| {
                            buf.clear();
                            buf.extend(idx.iter().map(|&i| (pts.row(i)[t], kept(i))));
                            weighted_median(&mut buf)
                        })
                        .collect()
                }
            };
            let cluster_cost = |c: &[f64]| -> f64 {
                idx.iter()
                    .map(|&i| kept(i) * power.of_sq(crate::geometry::sq_dist(pts.row(i), c)))
                    .sum()
            };
            let old = centers.center(j).to_vec();
            if power == Power::Two || cluster_cost(&candidate) <= cluster_cost(&old) {
                slot.copy_from_slice(&candidate);
            }
        }
        centers = CenterSet::new(Dataset::new(dim, next)?, power)?;
    }
    let cost = *trace.last().expect("at least one evaluation");
    Ok(SolveResult { centers, cost, inlier_window: None, iterations, cost_trace: trace })
}

/// Outlier-aware Lloyd on a weighted set with trimmed `D^z` seeding and restarts.
pub fn lloyd_weighted(set: &WeightedSet, cfg: &LloydConfig) -> Result<SolveResult> {
    if cfg.k == 0 || cfg.k > set.len() {
        return invalid(format!("need 1 <= k <= |S| (k = {}, |S| = {})", cfg.k, set.len()));
    }
    if !(cfg.m >= 0.0) || cfg.m >= set.total_weight() {
        return invalid(format!("need 0 <= m < w(S) (m = {})", cfg.m));
    }
    let mut best: Option<SolveResult> = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = rng_stream(cfg.seed, restart as u64);
        let init = trimmed_seed(set, cfg.k, cfg.m, cfg.power, &mut rng)?;
        let run = lloyd_from(set, init, cfg.m, cfg.max_iters, cfg.tol)?;
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Outlier-aware Lloyd on an unweighted dataset.
pub fn lloyd_with_outliers(
    points: &Dataset,
    k: usize,
    m: usize,
    power: Power,
    max_iters: usize,
    seed: u64,
) -> Result<SolveResult> {
    if m >= points.len() {
        return invalid(format!("need m < n (m = {m}, n = {})", points.len()));
    }
    let set = WeightedSet::unit(points.clone());
    let mut cfg = LloydConfig::new(k, m as f64, power, seed);
    cfg.max_iters = max_iters;
    let mut result = lloyd_weighted(&set, &cfg)?;
    result.cost = robust_cost(points, &result.centers, m)?;
    Ok(result)
}
