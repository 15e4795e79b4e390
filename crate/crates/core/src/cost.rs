//! Exact robust cost evaluation.
//!
//! `cost_z^(m)(P, C)` discards the `m` points with the largest `dist(p, C)^z` and
//! sums the rest. For a weighted set the discarded mass `m` may be split across
//! points: the minimizing weight function keeps the nearest points in full,
//! drops the farthest in full, and splits at most one point in between.
//!
//! Ties in distance are broken by dataset index (smaller index is kept first),
//! so every function here is deterministic.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{CenterSet, Dataset, WeightedSet};
use crate::numeric::pairwise_sum;

/// `dist(p, C)^z` for every point of `points`.
pub fn point_costs(points: &Dataset, centers: &CenterSet) -> Result<Vec<f64>> {
    centers.check_dim(points.dim())?;
    Ok(points.rows().map(|p| centers.cost_of(p)).collect())
}

#[inline]
fn by_cost_then_index(costs: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b))
}

/// Indices of the `keep` smallest entries of `costs` under the (cost, index) order.
fn kept_mask(costs: &[f64], keep: usize) -> Vec<bool> {
    let n = costs.len();
    let mut mask = vec![false; n];
    if keep == 0 {
        return mask;
    }
    if keep >= n {
        mask.fill(true);
        return mask;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.select_nth_unstable_by(keep - 1, by_cost_then_index(costs));
    for &i in &order[..keep] {
        mask[i] = true;
    }
    mask
}

/// Robust cost from precomputed per-point costs `dist(p, C)^z`.
pub fn trimmed_cost(costs: &[f64], m: usize) -> Result<f64> {
    if m > costs.len() {
        return invalid(format!("m = {m} exceeds the number of points {}", costs.len()));
    }
    let mask = kept_mask(costs, costs.len() - m);
    let kept: Vec<f64> = costs.iter().zip(&mask).filter(|(_, k)| **k).map(|(c, _)| *c).collect();
    Ok(pairwise_sum(&kept))
}

/// `cost_z^(m)(P, C)`: the sum of the `|P| - m` smallest `dist(p, C)^z`.
pub fn robust_cost(points: &Dataset, centers: &CenterSet, m: usize) -> Result<f64> {
    if m > points.len() {
        return invalid(format!("m = {m} exceeds the number of points {}", points.len()));
    }
    trimmed_cost(&point_costs(points, centers)?, m)
}

/// Vanilla (non-robust) clustering cost.
pub fn vanilla_cost(points: &Dataset, centers: &CenterSet) -> Result<f64> {
    robust_cost(points, centers, 0)
}

/// Outlier/inlier partition of an unweighted dataset at fixed centers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlierSplit {
    /// Ascending dataset indices of the `n - m` kept points.
    pub inliers: Vec<usize>,
    /// Ascending dataset indices of the `m` discarded points.
    pub outliers: Vec<usize>,
}

/// The `m` points of largest `dist(·, C)^z` are outliers; at equal distance the
/// larger dataset index is discarded first.
pub fn outlier_split(points: &Dataset, centers: &CenterSet, m: usize) -> Result<OutlierSplit> {
    if m > points.len() {
        return invalid(format!("m = {m} exceeds the number of points {}", points.len()));
    }
    let costs = point_costs(points, centers)?;
    Ok(split_by_costs(&costs, m))
}

pub(crate) fn split_by_costs(costs: &[f64], m: usize) -> OutlierSplit {
    let mask = kept_mask(costs, costs.len() - m);
    let (mut inliers, mut outliers) = (Vec::new(), Vec::new());
    for (i, kept) in mask.into_iter().enumerate() {
        if kept {
            inliers.push(i);
        } else {
            outliers.push(i);
        }
    }
    OutlierSplit { inliers, outliers }
}

/// The minimizing weight function `w'` of the weighted robust cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InlierAssignment {
    /// `w'(p)` per point, `0 <= w'(p) <= w(p)`.
    pub kept_weight: Vec<f64>,
    /// The unique point with `0 < w'(p) < w(p)`, if any.
    pub partial_index: Option<usize>,
    /// `sum_p w'(p) dist(p, C)^z`.
    pub cost: f64,
}

impl InlierAssignment {
    /// Discarded weight `w(p) - w'(p)` of point `i`.
    pub fn dropped(&self, weights: &[f64], i: usize) -> f64 {
        weights[i] - self.kept_weight[i]
    }
}

/// Greedy fill from precomputed costs; the core of every weighted evaluation.
pub(crate) fn assign_by_costs(costs: &[f64], weights: &[f64], m: f64) -> Result<InlierAssignment> {
    let total = pairwise_sum(weights);
    let tol = 1e-12 * total.max(1.0);
    if !(m >= 0.0) || m > total + tol {
        return invalid(format!("outlier weight m = {m} must lie in [0, w(S) = {total}]"));
    }
    let n = costs.len();
    let mut kept_weight = vec![0.0; n];
    let mut partial_index = None;
    let mut budget = total - m;
    if budget > tol {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(by_cost_then_index(costs));
        for i in order {
            if budget <= tol {
                break;
            }
            let w = weights[i];
            if w <= budget + tol {
                kept_weight[i] = w;
                budget -= w;
            } else {
                kept_weight[i] = budget;
                partial_index = Some(i);
                budget = 0.0;
            }
        }
    }
    let terms: Vec<f64> = kept_weight
        .iter()
        .zip(costs)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, c)| w * c)
        .collect();
    Ok(InlierAssignment { kept_weight, partial_index, cost: pairwise_sum(&terms) })
}

/// Minimizing inlier weights of a weighted set for outlier mass `m`.
pub fn inlier_assignment(set: &WeightedSet, centers: &CenterSet, m: f64) -> Result<InlierAssignment> {
    let costs = point_costs(set.points(), centers)?;
    assign_by_costs(&costs, set.weights(), m)
}

/// `cost_z^(m)(S, C) = min_{w'} sum_p w'(p) dist(p, C)^z` with `sum w' = w(S) - m`.
pub fn robust_cost_weighted(set: &WeightedSet, centers: &CenterSet, m: f64) -> Result<f64> {
    if set.is_empty() {
        return if m <= 0.0 { Ok(0.0) } else { invalid("m > 0 on an empty weighted set") };
    }
    Ok(inlier_assignment(set, centers, m)?.cost)
}

/// Weighted robust cost from precomputed per-point costs.
pub fn trimmed_cost_weighted(costs: &[f64], weights: &[f64], m: f64) -> Result<f64> {
    Ok(assign_by_costs(costs, weights, m)?.cost)
}
