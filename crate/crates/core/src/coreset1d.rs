//! Coresets for the robust geometric median on the line.
//!
//! The sorted input is cut into three parts: the `m` leftmost points `P_L`, the
//! `m` rightmost points `P_R`, and the middle `P_M`, which is an inlier set for
//! every center. `P_M` gets a vanilla bucket coreset at accuracy `eps / 3`.
//! `P_L` and `P_R` are classified into distance blocks around the anchors
//! `c_L = c* - r_max` and `c_R = c* + r_max`, split greedily into buckets with
//! bounded cumulative error and bounded size, and finally cut so that no bucket
//! straddles the inlier window of the centers `p_{m+1}` and `p_{n-m}`. Each
//! bucket is represented by its mean with weight equal to its size.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoresetError, Result};
use crate::geometry::{Dataset, WeightedSet};
use crate::numeric::pairwise_sum;
use crate::solver::{nearest_window, robust_median_1d};

/// Default divisor of the inner-block cumulative-error cap `2^i eps^2 n r_max / 288`.
pub const INNER_CAP_DIVISOR: f64 = 288.0;

/// Default divisor of the vanilla cap `2^i eps^2 n r_bar / K`.
pub const VANILLA_CAP_DIVISOR: f64 = 4.0;

/// A contiguous run `sorted[start..=end]` with cached statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub count: usize,
    pub mean: f64,
    /// `sum |p - mean|` over the bucket.
    pub cum_err: f64,
}

impl Bucket {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end + 1
    }
}

/// Count, mean and cumulative error of `sorted[l..=r]`, computed directly.
pub fn bucket_stats(sorted: &[f64], l: usize, r: usize) -> Result<Bucket> {
    if l > r || r >= sorted.len() {
        return invalid(format!("bucket range [{l}, {r}] is outside 0..{}", sorted.len()));
    }
    let slice = &sorted[l..=r];
    let base = slice[0];
    let count = slice.len();
    let shifted: Vec<f64> = slice.iter().map(|p| p - base).collect();
    let rel_mean = pairwise_sum(&shifted) / count as f64;
    let dev: Vec<f64> = shifted.iter().map(|p| (p - rel_mean).abs()).collect();
    Ok(Bucket { start: l, end: r, count, mean: base + rel_mean, cum_err: pairwise_sum(&dev) })
}

/// Greedy left-to-right maximal buckets of `sorted[range]` with
/// `cum_err <= err_cap` and `count <= count_cap`. Every bucket holds at least one point.
///
/// The running cumulative error is maintained in amortized `O(1)` per point:
/// appending a point never moves the mean left, so the split between points
/// below and above the mean only advances.
pub fn greedy_buckets(sorted: &[f64], range: Range<usize>, err_cap: f64, count_cap: f64) -> Vec<Bucket> {
    let mut out = Vec::new();
    let mut l = range.start;
    while l < range.end {
        let base = sorted[l];
        let mut total = 0.0;
        let mut below_sum = 0.0;
        let mut split = l;
        let mut r = l;
        while r + 1 < range.end {
            let cand = r + 1;
            let count = (cand - l + 1) as f64;
            if count > count_cap {
                break;
            }
            let t = total + (sorted[cand] - base);
            let mu = t / count;
            let (mut j, mut bs) = (split, below_sum);
            while j <= cand && sorted[j] - base < mu {
                bs += sorted[j] - base;
                j += 1;
            }
            let below = (j - l) as f64;
            let delta = (t - bs) - (count - below) * mu + below * mu - bs;
            if delta > err_cap {
                break;
            }
            total = t;
            split = j;
            below_sum = bs;
            r = cand;
        }
        out.push(bucket_stats(sorted, l, r).expect("range inside slice"));
        l = r + 1;
    }
    out
}

/// Which collection a block is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockSide {
    /// `P_L` strictly left of `c_L`.
    Left,
    /// `P_L` at or right of `c_L`.
    LeftInner,
    /// `P_R` at or left of `c_R`.
    RightInner,
    /// `P_R` strictly right of `c_R`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockLevel {
    /// Distance to the anchor at least `r_max`.
    Far,
    /// Level `i`: distance in `[2^i eps r_max, 2^(i+1) eps r_max)`, or below `2 eps r_max` for `i = 0`.
    Inner(u32),
}

/// A maximal run of consecutive points that share a side and a level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub side: BlockSide,
    pub level: BlockLevel,
    pub start: usize,
    /// Exclusive.
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub c_left: f64,
    pub c_right: f64,
    pub r_max: f64,
    pub eps: f64,
    pub max_level: u32,
    /// Ordered by `start`; together they cover `P_L` and `P_R` exactly once.
    pub blocks: Vec<Block>,
}

/// `ceil(log2(1 / eps))`.
pub fn max_level(eps: f64) -> u32 {
    (1.0 / eps).log2().ceil().max(0.0) as u32
}

/// Level of a distance against thresholds `2^i * unit`. Level 0 is `[0, 2 unit)`.
fn level_of(dist: f64, unit: f64, cap: Option<u32>) -> u32 {
    if !(unit > 0.0) {
        return cap.unwrap_or(0);
    }
    if dist < 2.0 * unit {
        return 0;
    }
    let mut i: u32 = 1;
    let mut upper = 4.0 * unit;
    while dist >= upper {
        if cap.is_some_and(|c| i >= c) {
            break;
        }
        i += 1;
        upper *= 2.0;
    }
    cap.map_or(i, |c| i.min(c))
}

fn push_runs(blocks: &mut Vec<Block>, range: Range<usize>, key: impl Fn(usize) -> (BlockSide, BlockLevel)) {
    for i in range {
        let (side, level) = key(i);
        match blocks.last_mut() {
            Some(b) if b.end == i && b.side == side && b.level == level => b.end = i + 1,
            _ => blocks.push(Block { side, level, start: i, end: i + 1 }),
        }
    }
}

/// Classify `P_L = sorted[left]` and `P_R = sorted[right]` into far and inner blocks
/// around `c_L = c_star - r_max` and `c_R = c_star + r_max`.
pub fn partition_blocks(
    sorted: &[f64],
    left: Range<usize>,
    right: Range<usize>,
    c_star: f64,
    r_max: f64,
    eps: f64,
) -> BlockPartition {
    let c_left = c_star - r_max;
    let c_right = c_star + r_max;
    let unit = eps * r_max;
    let top = max_level(eps);
    let mut blocks = Vec::new();
    push_runs(&mut blocks, left, |i| {
        let p = sorted[i];
        if p < c_left {
            let d = c_left - p;
            if d >= r_max {
                (BlockSide::Left, BlockLevel::Far)
            } else {
                (BlockSide::Left, BlockLevel::Inner(level_of(d, unit, Some(top))))
            }
        } else {
            (BlockSide::LeftInner, BlockLevel::Inner(level_of(p - c_left, unit, Some(top))))
        }
    });
    push_runs(&mut blocks, right, |i| {
        let p = sorted[i];
        if p > c_right {
            let d = p - c_right;
            if d >= r_max {
                (BlockSide::Right, BlockLevel::Far)
            } else {
                (BlockSide::Right, BlockLevel::Inner(level_of(d, unit, Some(top))))
            }
        } else {
            (BlockSide::RightInner, BlockLevel::Inner(level_of(c_right - p, unit, Some(top))))
        }
    });
    BlockPartition { c_left, c_right, r_max, eps, max_level: top, blocks }
}

/// Greedy buckets of one block: inner blocks cap `cum_err <= 2^i eps^2 n r_max / 288`
/// and `count <= eps n / 16`; far blocks cap only the count.
pub fn split_block(sorted: &[f64], block: &Block, eps: f64, n: usize, r_max: f64) -> Vec<Bucket> {
    split_block_with(sorted, block, eps, n, r_max, INNER_CAP_DIVISOR)
}

pub fn split_block_with(
    sorted: &[f64],
    block: &Block,
    eps: f64,
    n: usize,
    r_max: f64,
    divisor: f64,
) -> Vec<Bucket> {
    let count_cap = eps * n as f64 / 16.0;
    let err_cap = match block.level {
        BlockLevel::Far => f64::INFINITY,
        BlockLevel::Inner(i) => 2f64.powi(i as i32) * eps * eps * n as f64 * r_max / divisor,
    };
    greedy_buckets(sorted, block.start..block.end, err_cap, count_cap)
}

/// Inclusive inlier window of the center `sorted[center]` for `m` outliers.
pub fn inlier_window_at(sorted: &[f64], center: usize, m: usize) -> (usize, usize) {
    let keep = sorted.len() - m;
    let start = nearest_window(sorted, sorted[center], keep);
    (start, start + keep - 1)
}

/// Cut every bucket that partially intersects the inlier window of `p_{m+1}` or
/// of `p_{n-m}` into its inside and outside parts.
pub fn boundary_split(sorted: &[f64], buckets: &[Bucket], m: usize) -> Vec<Bucket> {
    let n = sorted.len();
    if m == 0 || m >= n {
        return buckets.to_vec();
    }
    let mut cuts = Vec::with_capacity(4);
    for center in [m, n - m - 1] {
        let (a, b) = inlier_window_at(sorted, center, m);
        cuts.push(a);
        cuts.push(b + 1);
    }
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::with_capacity(buckets.len() + 4);
    for bucket in buckets {
        let mut start = bucket.start;
        for &cut in &cuts {
            if cut > start && cut <= bucket.end {
                out.push(bucket_stats(sorted, start, cut - 1).expect("sub-range of a bucket"));
                start = cut;
            }
        }
        if start == bucket.start {
            out.push(bucket.clone());
        } else {
            out.push(bucket_stats(sorted, start, bucket.end).expect("sub-range of a bucket"));
        }
    }
    out
}

/// Tuning of the vanilla 1D bucket coreset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanillaConfig {
    pub cap_divisor: f64,
}

impl Default for VanillaConfig {
    fn default() -> Self {
        Self { cap_divisor: VANILLA_CAP_DIVISOR }
    }
}

/// Buckets of the vanilla 1D coreset of `sorted[range]`.
///
/// Distances to the median `c` are cut into levels `[2^i eps r_bar, 2^(i+1) eps r_bar)`
/// (`r_bar` the mean absolute deviation), each side and level split greedily with
/// `cum_err <= 2^i eps^2 n r_bar / K`. A bucket whose interior holds the center is
/// at distance at least `2^i eps r_bar` from `c`, where the cost is at least
/// `n 2^(i-1) eps r_bar`; so `K >= 2` bounds the error by `eps` times the cost.
pub fn vanilla_buckets(sorted: &[f64], range: Range<usize>, eps: f64, cfg: VanillaConfig) -> Vec<Bucket> {
    let n = range.len();
    if n == 0 {
        return Vec::new();
    }
    let med = range.start + (n - 1) / 2;
    let c = sorted[med];
    let dev: Vec<f64> = sorted[range.clone()].iter().map(|p| (p - c).abs()).collect();
    let r_bar = pairwise_sum(&dev) / n as f64;
    if !(r_bar > 0.0) {
        return greedy_buckets(sorted, range, 0.0, f64::INFINITY);
    }
    let unit = eps * r_bar;
    let mut blocks = Vec::new();
    push_runs(&mut blocks, range.start..med + 1, |i| {
        (BlockSide::Left, BlockLevel::Inner(level_of(c - sorted[i], unit, None)))
    });
    push_runs(&mut blocks, med + 1..range.end, |i| {
        (BlockSide::Right, BlockLevel::Inner(level_of(sorted[i] - c, unit, None)))
    });
    let mut out = Vec::new();
    for b in &blocks {
        let BlockLevel::Inner(i) = b.level else { unreachable!() };
        let cap = 2f64.powi(i as i32) * eps * eps * n as f64 * r_bar / cfg.cap_divisor;
        out.extend(greedy_buckets(sorted, b.start..b.end, cap, f64::INFINITY));
    }
    out
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    Ok(())
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

fn buckets_to_set(buckets: &[Bucket]) -> Result<WeightedSet> {
    if buckets.is_empty() {
        return Ok(WeightedSet::empty(1));
    }
    let means: Vec<f64> = buckets.iter().map(|b| b.mean).collect();
    let weights: Vec<f64> = buckets.iter().map(|b| b.count as f64).collect();
    WeightedSet::new(Dataset::from_scalars(&means)?, weights)
}

/// Vanilla 1D coreset: one weighted mean per bucket, total weight `n`.
pub fn build_vanilla_1d(sorted: &[f64], eps: f64) -> Result<WeightedSet> {
    build_vanilla_1d_with(sorted, eps, VanillaConfig::default())
}

pub fn build_vanilla_1d_with(sorted: &[f64], eps: f64, cfg: VanillaConfig) -> Result<WeightedSet> {
    if sorted.is_empty() {
        return invalid("need at least one point");
    }
    check_eps(eps)?;
    check_sorted(sorted)?;
    buckets_to_set(&vanilla_buckets(sorted, 0..sorted.len(), eps, cfg))
}

/// Options of the robust 1D builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Robust1dConfig {
    pub eps: f64,
    /// Build even when `n < 4m`; the error guarantee no longer applies.
    pub allow_small_n: bool,
    pub inner_cap_divisor: f64,
    pub vanilla: VanillaConfig,
}

impl Robust1dConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, allow_small_n: false, inner_cap_divisor: INNER_CAP_DIVISOR, vanilla: VanillaConfig::default() }
    }
}

/// Output of the robust 1D builder, with the bucket map retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coreset1d {
    /// One point per bucket, in bucket order.
    pub set: WeightedSet,
    /// Ordered by `start`; they partition `0..n`.
    pub buckets: Vec<Bucket>,
    /// Index range (into `buckets`) of the vanilla buckets covering `P_M`.
    pub middle: Range<usize>,
    pub c_star: f64,
    pub r_max: f64,
    pub partition: BlockPartition,
    /// Buckets created by the boundary split.
    pub boundary_added: usize,
}

/// Robust 1D coreset of size `O~(eps^-1/2 + (m/n) eps^-1)` in `O(n)` time on sorted input.
pub fn build_robust_1d(sorted: &[f64], m: usize, eps: f64) -> Result<Coreset1d> {
    build_robust_1d_with(sorted, m, Robust1dConfig::new(eps))
}

pub fn build_robust_1d_with(sorted: &[f64], m: usize, cfg: Robust1dConfig) -> Result<Coreset1d> {
    let n = sorted.len();
    let eps = cfg.eps;
    check_eps(eps)?;
    if m >= n {
        return invalid(format!("need m < n (m = {m}, n = {n})"));
    }
    check_sorted(sorted)?;
    if n < 4 * m && !cfg.allow_small_n {
        return Err(CoresetError::AssumptionViolation(format!(
            "n >= 4m does not hold (n = {n}, m = {m})"
        )));
    }
    let left_end = m.min(n);
    let right_start = (n - m).max(left_end);

    let solve = robust_median_1d(sorted, m)?;
    let c_star = solve.centers.center(0)[0];
    let (wl, wr) = solve.inlier_window.expect("1D solver reports its window");
    let r_max = (c_star - sorted[wl]).max(sorted[wr] - c_star);

    let partition = partition_blocks(sorted, 0..left_end, right_start..n, c_star, r_max, eps);
    let mut outer: Vec<Bucket> = Vec::new();
    for block in &partition.blocks {
        outer.extend(split_block_with(sorted, block, eps, n, r_max, cfg.inner_cap_divisor));
    }
    let middle = vanilla_buckets(sorted, left_end..right_start, eps / 3.0, cfg.vanilla);

    let mut buckets: Vec<Bucket> = outer.into_iter().chain(middle).collect();
    buckets.sort_by_key(|b| b.start);
    let before = buckets.len();
    let buckets = boundary_split(sorted, &buckets, m);
    let boundary_added = buckets.len() - before;

    let first_mid = buckets.iter().position(|b| b.start >= left_end && b.end < right_start);
    let middle = match first_mid {
        Some(a) => {
            let len = buckets[a..].iter().take_while(|b| b.end < right_start).count();
            a..a + len
        }
        None => 0..0,
    };
    Ok(Coreset1d {
        set: buckets_to_set(&buckets)?,
        buckets,
        middle,
        c_star,
        r_max,
        partition,
        boundary_added,
    })
}
