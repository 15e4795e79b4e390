//! Robust coresets in `R^d`: a uniform sample of the optimal outliers `L*`
//! reweighted to mass `m`, joined with an inlier coreset of `P \ L*`.

use rand::seq::index;
use rand_distr::{Distribution, weighted::WeightedAliasIndex};
use serde::{Deserialize, Serialize};

use crate::cost::{point_costs, split_by_costs, OutlierSplit};
use crate::error::{invalid, CoresetError, Result};
use crate::geometry::{CenterSet, Dataset, Power, WeightedSet};
use crate::numeric::{pairwise_sum, rng_stream};

const OUTLIER_STREAM: u64 = 1;
const INLIER_STREAM: u64 = 2;

/// Sample budgets of the nd builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdCoresetConfig {
    pub eps: f64,
    /// Multiplier of the default budgets.
    pub c0: f64,
    /// `None`: use [`default_outlier_size`].
    pub outlier_sample_size: Option<usize>,
    /// `None`: use [`default_inlier_size`].
    pub inlier_sample_size: Option<usize>,
    pub seed: u64,
    /// Build `build_robust_nd` even when `n < 4m`.
    pub allow_small_n: bool,
}

impl NdCoresetConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        Self { eps, c0: 1.0, outlier_sample_size: None, inlier_sample_size: None, seed, allow_small_n: false }
    }

    pub fn with_sizes(mut self, outlier: usize, inlier: usize) -> Self {
        self.outlier_sample_size = Some(outlier);
        self.inlier_sample_size = Some(inlier);
        self
    }

    /// Split a total budget between `S_O` and `S_I` in proportion to `m : n - m`.
    pub fn for_total_size(mut self, total: usize, n: usize, m: usize) -> Self {
        let total = total.max(2);
        let outlier = if m == 0 {
            1
        } else {
            ((total as f64 * m as f64 / n as f64).round() as usize).clamp(1, m.min(total - 1))
        };
        self.outlier_sample_size = Some(outlier);
        self.inlier_sample_size = Some(total - if m == 0 { 0 } else { outlier });
        self
    }

    /// `(|S_O|, |S_I|)` budgets for the given `k`, `z` and dimension.
    pub fn sizes(&self, k: usize, power: Power, dim: usize) -> (usize, usize) {
        (
            self.outlier_sample_size.unwrap_or_else(|| default_outlier_size(self.eps, k, dim, self.c0)),
            self.inlier_sample_size.unwrap_or_else(|| default_inlier_size(self.eps, k, power, dim, self.c0)),
        )
    }
}

fn log_factor(eps: f64) -> f64 {
    ((1.0 / eps).log2() + 1.0).ceil()
}

/// `ceil(c0 k eps^-2 min(eps^-2, d) ceil(log2(1/eps) + 1))`.
pub fn default_outlier_size(eps: f64, k: usize, dim: usize, c0: f64) -> usize {
    let e2 = eps.powi(-2);
    ((c0 * k as f64 * e2 * e2.min(dim as f64) * log_factor(eps)).ceil() as usize).max(1)
}

/// `ceil(c0 k^2 eps^-2z min(eps^-2, d) ceil(log2(1/eps) + 1))`.
pub fn default_inlier_size(eps: f64, k: usize, power: Power, dim: usize, c0: f64) -> usize {
    let ez = eps.powi(-2 * power.exponent() as i32);
    let k2 = (k * k) as f64;
    ((c0 * k2 * ez * eps.powi(-2).min(dim as f64) * log_factor(eps)).ceil() as usize).max(1)
}

/// Sorted indices into `0..m` of a uniform sample without replacement, and the
/// common weight `m / |S_O|`.
fn outlier_draws(m: usize, size: usize, seed: u64) -> (Vec<usize>, f64) {
    if size >= m {
        return ((0..m).collect(), 1.0);
    }
    let mut rng = rng_stream(seed, OUTLIER_STREAM);
    let mut picked = index::sample(&mut rng, m, size).into_vec();
    picked.sort_unstable();
    (picked, m as f64 / size as f64)
}

/// Uniform sample without replacement of `min(size, |L|)` outliers, each weighted `|L| / |S_O|`.
pub fn sample_outlier_coreset(outliers: &Dataset, size: usize, seed: u64) -> Result<WeightedSet> {
    let m = outliers.len();
    if m == 0 {
        return Ok(WeightedSet::empty(outliers.dim()));
    }
    if size == 0 {
        return invalid("outlier sample size must be at least 1");
    }
    if size >= m {
        return Ok(WeightedSet::unit(outliers.clone()));
    }
    let (picked, w) = outlier_draws(m, size, seed);
    WeightedSet::new(outliers.select(&picked), vec![w; picked.len()])
}

/// `(1/|P_I| + dist^z / cost(P_I)) / 2` per inlier, uniform if the cost is zero.
fn sensitivity_probs(costs: &[f64]) -> Vec<f64> {
    let n = costs.len();
    let total = pairwise_sum(costs);
    let uniform = 1.0 / n as f64;
    if total > 0.0 {
        costs.iter().map(|c| 0.5 * (uniform + c / total)).collect()
    } else {
        vec![uniform; n]
    }
}

/// Sensitivity sampling of the inliers around `centers`.
///
/// Draws `size` points with replacement with probability
/// `(1/|P_I| + dist^z / cost(P_I)) / 2`, weights each draw `1 / (size prob)`,
/// merges duplicates, and rescales so the total weight is `|P_I|`.
pub fn build_inlier_coreset(inliers: &Dataset, centers: &CenterSet, size: usize, seed: u64) -> Result<WeightedSet> {
    if inliers.is_empty() {
        return invalid("inlier set is empty");
    }
    if size == 0 {
        return invalid("inlier sample size must be at least 1");
    }
    let costs = point_costs(inliers, centers)?;
    importance_sample(inliers, sensitivity_probs(&costs), size, seed)
}

/// `size` draws with replacement from `probs`: the drawn indices (ascending) and
/// their weights, `1 / (size prob)` per draw, rescaled to total `|probs|`.
pub(crate) fn importance_draws(probs: &[f64], size: usize, seed: u64) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = probs.len();
    let table = WeightedAliasIndex::new(probs.to_vec())
        .map_err(|e| CoresetError::InvalidInput(format!("sampling distribution: {e}")))?;
    let mut rng = rng_stream(seed, INLIER_STREAM);
    let mut draws = vec![0u32; n];
    for _ in 0..size {
        draws[table.sample(&mut rng)] += 1;
    }
    let picked: Vec<usize> = (0..n).filter(|&i| draws[i] > 0).collect();
    let raw: Vec<f64> = picked.iter().map(|&i| draws[i] as f64 / (size as f64 * probs[i])).collect();
    let scale = n as f64 / pairwise_sum(&raw);
    Ok((picked, raw.iter().map(|w| w * scale).collect()))
}

pub(crate) fn importance_sample(points: &Dataset, probs: Vec<f64>, size: usize, seed: u64) -> Result<WeightedSet> {
    let (picked, weights) = importance_draws(&probs, size, seed)?;
    WeightedSet::new(points.select(&picked), weights)
}

/// Output of the nd builders, keeping the two halves apart for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdCoreset {
    /// `S_O ∪ S_I`, outliers first.
    pub set: WeightedSet,
    pub outlier_part: WeightedSet,
    pub inlier_part: WeightedSet,
    /// `L*` and `P_I*` with respect to the input centers.
    pub split: OutlierSplit,
    pub assumptions: AssumptionReport,
}

/// Robust geometric median coreset (`k = 1`).
pub fn build_robust_nd(points: &Dataset, m: usize, cfg: &NdCoresetConfig, center: &CenterSet) -> Result<NdCoreset> {
    if center.k() != 1 {
        return invalid(format!("expected a single center, got {}", center.k()));
    }
    if points.len() < 4 * m && !cfg.allow_small_n {
        return Err(CoresetError::AssumptionViolation(format!(
            "n >= 4m does not hold (n = {}, m = {m})",
            points.len()
        )));
    }
    build_robust_kz(points, m, cfg, center)
}

/// Nearest center and squared distance of every point.
fn nearest_all(points: &Dataset, centers: &CenterSet) -> Result<Vec<(usize, f64)>> {
    centers.check_dim(points.dim())?;
    Ok(points.rows().map(|p| centers.nearest(p)).collect())
}

/// Robust `(k, z)`-clustering coreset. The assumption report is attached, never enforced.
///
/// Distances to `C*` are computed once; only the sampled rows are copied.
pub fn build_robust_kz(points: &Dataset, m: usize, cfg: &NdCoresetConfig, centers: &CenterSet) -> Result<NdCoreset> {
    let n = points.len();
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {}", cfg.eps));
    }
    if m >= n {
        return invalid(format!("need m < n (m = {m}, n = {n})"));
    }
    let nearest = nearest_all(points, centers)?;
    let power = centers.power();
    let costs: Vec<f64> = nearest.iter().map(|&(_, sq)| power.of_sq(sq)).collect();
    let split = split_by_costs(&costs, m);
    let assumptions = report(centers, m, &split, &nearest)?;
    let (so, si) = cfg.sizes(centers.k(), power, points.dim());
    if si == 0 || (so == 0 && m > 0) {
        return invalid("sample sizes must be at least 1");
    }

    let outlier_part = if m == 0 {
        WeightedSet::empty(points.dim())
    } else {
        let (picked, w) = outlier_draws(m, so, cfg.seed);
        let rows: Vec<usize> = picked.iter().map(|&j| split.outliers[j]).collect();
        WeightedSet::new(points.select(&rows), vec![w; rows.len()])?
    };
    let inlier_costs: Vec<f64> = split.inliers.iter().map(|&i| costs[i]).collect();
    let (picked, weights) = importance_draws(&sensitivity_probs(&inlier_costs), si, cfg.seed)?;
    let rows: Vec<usize> = picked.iter().map(|&j| split.inliers[j]).collect();
    let inlier_part = WeightedSet::new(points.select(&rows), weights)?;

    let set = outlier_part.union(&inlier_part)?;
    Ok(NdCoreset { set, outlier_part, inlier_part, split, assumptions })
}

/// Cluster-structure diagnostics at the centers `C*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `|P_i*|`: inliers nearest to each center.
    pub cluster_sizes: Vec<usize>,
    /// Largest inlier distance to `C*`.
    pub r_max: f64,
    /// `(cost_z(P_I*, C*) / |P_I*|)^(1/z)`.
    pub r_bar: f64,
    /// `min_i |P_i*| >= 4m`.
    pub cond1: bool,
    /// `(r_max / r_bar)^z <= 4k`.
    pub cond2: bool,
    /// `dist(c_i, c_j)^z >= m r_max^z / min(|P_i*|, |P_j*|)` for every pair; reported only.
    pub separation: bool,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2
    }

    /// Human-readable list of the failed conditions.
    pub fn violations(&self, m: usize, k: usize) -> Vec<String> {
        let mut out = Vec::new();
        if !self.cond1 {
            let min = self.cluster_sizes.iter().min().copied().unwrap_or(0);
            out.push(format!("smallest inlier cluster has {min} points, fewer than 4m = {}", 4 * m));
        }
        if !self.cond2 {
            out.push(format!(
                "r_max / r_bar = {:.4} exceeds the bound for 4k = {}",
                self.r_max / self.r_bar,
                4 * k
            ));
        }
        out
    }
}

/// `(cond1, cond2)` from summary statistics.
pub fn assumption_conditions(min_cluster: usize, ratio: f64, m: usize, k: usize, power: Power) -> (bool, bool) {
    (min_cluster >= 4 * m, power.of_dist(ratio) <= 4.0 * k as f64)
}

pub fn check_assumptions(points: &Dataset, centers: &CenterSet, m: usize) -> Result<AssumptionReport> {
    if m > points.len() {
        return invalid(format!("m = {m} exceeds the number of points {}", points.len()));
    }
    let nearest = nearest_all(points, centers)?;
    let costs: Vec<f64> = nearest.iter().map(|&(_, sq)| centers.power().of_sq(sq)).collect();
    report(centers, m, &split_by_costs(&costs, m), &nearest)
}

fn report(centers: &CenterSet, m: usize, split: &OutlierSplit, nearest: &[(usize, f64)]) -> Result<AssumptionReport> {
    let k = centers.k();
    let power = centers.power();
    let mut sizes = vec![0usize; k];
    let mut r_max: f64 = 0.0;
    let mut costs = Vec::with_capacity(split.inliers.len());
    for &i in &split.inliers {
        let (c, sq) = nearest[i];
        sizes[c] += 1;
        r_max = r_max.max(sq.sqrt());
        costs.push(power.of_sq(sq));
    }
    if split.inliers.is_empty() {
        return invalid("no inliers");
    }
    let r_bar = power.root(pairwise_sum(&costs) / split.inliers.len() as f64);
    let ratio = if r_bar > 0.0 { r_max / r_bar } else { 1.0 };
    let min = sizes.iter().copied().min().unwrap_or(0);
    let (cond1, cond2) = assumption_conditions(min, ratio, m, k, power);
    let mut separation = true;
    for i in 0..k {
        for j in i + 1..k {
            let d = crate::geometry::dist(centers.center(i), centers.center(j))?;
            let smaller = sizes[i].min(sizes[j]);
            if smaller == 0 || power.of_dist(d) * (smaller as f64) < m as f64 * power.of_dist(r_max) {
                separation = false;
            }
        }
    }
    Ok(AssumptionReport { cluster_sizes: sizes, r_max, r_bar, cond1, cond2, separation })
}
