//! Reference constructions: keep every optimal outlier verbatim and sample the
//! inliers (HJLW23, HLLW25), or sample uniformly (control).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::cost::{outlier_split, point_costs};
use crate::coreset_nd::{build_inlier_coreset, importance_sample};
use crate::error::{invalid, CoresetError, Result};
use crate::geometry::{CenterSet, Dataset, WeightedSet};
use crate::numeric::{pairwise_sum, rng_stream};

const UNIFORM_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    Hjlw23,
    Hllw25,
    Uniform,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hjlw23 => "hjlw23",
            Self::Hllw25 => "hllw25",
            Self::Uniform => "uniform",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = CoresetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hjlw23" => Ok(Self::Hjlw23),
            "hllw25" => Ok(Self::Hllw25),
            "uniform" => Ok(Self::Uniform),
            other => invalid(format!("unknown baseline {other:?}")),
        }
    }
}

struct Parts {
    outliers: Dataset,
    inliers: Dataset,
    inlier_budget: usize,
}

fn split_parts(points: &Dataset, m: usize, target_size: usize, centers: &CenterSet) -> Result<Parts> {
    let n = points.len();
    if m >= n {
        return invalid(format!("need m < n (m = {m}, n = {n})"));
    }
    if target_size < m {
        return invalid(format!("target size {target_size} is below m = {m}; this baseline keeps every outlier"));
    }
    let split = outlier_split(points, centers, m)?;
    Ok(Parts {
        outliers: points.select(&split.outliers),
        inliers: points.select(&split.inliers),
        inlier_budget: (target_size - m).max(1),
    })
}

/// All of `L*` at weight 1, plus inliers drawn with ring-rounded sensitivities:
/// a point's cost is rounded up to the next power of two times the mean inlier
/// cost, floored at that mean.
pub fn build_hjlw23(points: &Dataset, m: usize, target_size: usize, centers: &CenterSet, seed: u64) -> Result<WeightedSet> {
    let parts = split_parts(points, m, target_size, centers)?;
    let costs = point_costs(&parts.inliers, centers)?;
    let mean = pairwise_sum(&costs) / costs.len() as f64;
    let probs: Vec<f64> = if mean > 0.0 {
        let rounded: Vec<f64> =
            costs.iter().map(|&c| if c <= mean { mean } else { mean * (c / mean).log2().ceil().exp2() }).collect();
        let total = pairwise_sum(&rounded);
        rounded.iter().map(|r| r / total).collect()
    } else {
        vec![1.0 / costs.len() as f64; costs.len()]
    };
    let sample = importance_sample(&parts.inliers, probs, parts.inlier_budget, seed)?;
    WeightedSet::unit(parts.outliers).union(&sample)
}

/// All of `L*` at weight 1, plus the full remaining budget through the `S_I` sampler.
pub fn build_hllw25(points: &Dataset, m: usize, target_size: usize, centers: &CenterSet, seed: u64) -> Result<WeightedSet> {
    let parts = split_parts(points, m, target_size, centers)?;
    let sample = build_inlier_coreset(&parts.inliers, centers, parts.inlier_budget, seed)?;
    WeightedSet::unit(parts.outliers).union(&sample)
}

/// Uniform sample without replacement, each point weighted `n / target_size`.
pub fn build_uniform(points: &Dataset, target_size: usize, seed: u64) -> Result<WeightedSet> {
    let n = points.len();
    if target_size == 0 || target_size > n {
        return invalid(format!("target size must lie in [1, {n}], got {target_size}"));
    }
    if target_size == n {
        return Ok(WeightedSet::unit(points.clone()));
    }
    let mut rng = rng_stream(seed, UNIFORM_STREAM);
    let mut picked = index::sample(&mut rng, n, target_size).into_vec();
    picked.sort_unstable();
    WeightedSet::new(points.select(&picked), vec![n as f64 / target_size as f64; target_size])
}
