//! Measurement protocol: empirical error over sampled centers, size–error sweeps,
//! range-space and misalignment diagnostics, and runtime comparisons.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{build_hjlw23, build_hllw25, build_uniform};
use crate::coreset1d::{build_robust_1d_with, Bucket, Coreset1d, Robust1dConfig};
use crate::coreset_nd::{build_robust_kz, NdCoresetConfig};
use crate::cost::{inlier_assignment, outlier_split, point_costs, robust_cost, robust_cost_weighted, trimmed_cost, OutlierSplit};
use crate::error::{invalid, CoresetError, Result};
use crate::geometry::{CenterSet, Dataset, Power, WeightedSet};
use crate::numeric::{pairwise_sum, rng_stream};
use crate::solver::{lloyd_weighted, nearest_window, LloydConfig};

/// Default number of sampled centers per evaluation.
pub const DEFAULT_CENTERS: usize = 500;

/// Draw `count` center sets from `points`: distinct single points for `k = 1`,
/// otherwise independent `k`-tuples of distinct points.
pub fn sample_centers(points: &Dataset, k: usize, power: Power, count: usize, seed: u64) -> Result<Vec<CenterSet>> {
    let n = points.len();
    if k == 0 || k > n {
        return invalid(format!("need 1 <= k <= n (k = {k}, n = {n})"));
    }
    let mut rng = rng_stream(seed, 0);
    if k == 1 {
        let picked = index::sample(&mut rng, n, count.min(n)).into_vec();
        return picked.into_iter().map(|i| CenterSet::single(points.row(i), power)).collect();
    }
    (0..count)
        .map(|_| {
            let tuple = index::sample(&mut rng, n, k).into_vec();
            CenterSet::new(points.select(&tuple), power)
        })
        .collect()
}

/// Sampled centers with the full-data robust cost precomputed.
#[derive(Debug, Clone)]
pub struct CenterBank {
    pub centers: Vec<CenterSet>,
    pub cost_p: Vec<f64>,
    pub m: usize,
}

impl CenterBank {
    pub fn new(points: &Dataset, m: usize, centers: Vec<CenterSet>) -> Result<Self> {
        let cost_p = centers.par_iter().map(|c| robust_cost(points, c, m)).collect::<Result<Vec<_>>>()?;
        Ok(Self { centers, cost_p, m })
    }

    pub fn sample(points: &Dataset, m: usize, k: usize, power: Power, count: usize, seed: u64) -> Result<Self> {
        Self::new(points, m, sample_centers(points, k, power, count, seed)?)
    }

    /// Relative error of `set` at every center with positive full cost.
    pub fn evaluate(&self, set: &WeightedSet) -> Result<ErrorSummary> {
        let per: Vec<Option<f64>> = self
            .centers
            .par_iter()
            .zip(&self.cost_p)
            .map(|(c, &cp)| {
                if cp <= 0.0 {
                    return Ok(None);
                }
                let cs = robust_cost_weighted(set, c, self.m as f64)?;
                Ok(Some((cp - cs).abs() / cp))
            })
            .collect::<Result<_>>()?;
        let skipped = per.iter().filter(|e| e.is_none()).count();
        let per_center: Vec<f64> = per.into_iter().flatten().collect();
        if per_center.is_empty() {
            return invalid("every sampled center has zero robust cost");
        }
        let max_error = per_center.iter().copied().fold(0.0, f64::max);
        Ok(ErrorSummary { max_error, per_center, skipped })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    /// `max_c |cost(P, c) - cost(S, c)| / cost(P, c)`.
    pub max_error: f64,
    pub per_center: Vec<f64>,
    /// Centers skipped because `cost(P, c) = 0`.
    pub skipped: usize,
}

/// Empirical error of `set` against `points` over `num_centers` sampled centers.
pub fn empirical_error(
    points: &Dataset,
    set: &WeightedSet,
    m: usize,
    k: usize,
    power: Power,
    num_centers: usize,
    seed: u64,
) -> Result<ErrorSummary> {
    if num_centers == 0 {
        return invalid("need at least one center");
    }
    CenterBank::sample(points, m, k, power, num_centers, seed)?.evaluate(set)
}

/// Coreset constructions under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builder {
    Ours1d,
    OursNd,
    Hjlw23,
    Hllw25,
    Uniform,
}

impl fmt::Display for Builder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ours1d => "ours1d",
            Self::OursNd => "oursnd",
            Self::Hjlw23 => "hjlw23",
            Self::Hllw25 => "hllw25",
            Self::Uniform => "uniform",
        })
    }
}

impl FromStr for Builder {
    type Err = CoresetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ours1d" => Ok(Self::Ours1d),
            "oursnd" => Ok(Self::OursNd),
            "hjlw23" => Ok(Self::Hjlw23),
            "hllw25" => Ok(Self::Hllw25),
            "uniform" => Ok(Self::Uniform),
            other => invalid(format!("unknown builder {other:?}")),
        }
    }
}

/// A dataset prepared for repeated builds: the reference centers `C*` and, in 1D,
/// the sorted values.
#[derive(Debug, Clone)]
pub struct BuildContext {
    pub points: Dataset,
    pub m: usize,
    pub k: usize,
    pub power: Power,
    pub eps: f64,
    pub reference: CenterSet,
    pub sorted: Option<Vec<f64>>,
    pub allow_small_n: bool,
}

impl BuildContext {
    /// Compute `C*` with outlier-aware Lloyd on the full data.
    pub fn new(points: Dataset, m: usize, k: usize, power: Power, eps: f64, seed: u64) -> Result<Self> {
        let set = WeightedSet::unit(points.clone());
        let reference = lloyd_weighted(&set, &LloydConfig::new(k, m as f64, power, seed))?.centers;
        Ok(Self::with_reference(points, m, power, eps, reference))
    }

    pub fn with_reference(points: Dataset, m: usize, power: Power, eps: f64, reference: CenterSet) -> Self {
        let sorted = (points.dim() == 1).then(|| {
            let mut xs = points.as_flat().to_vec();
            xs.sort_by(f64::total_cmp);
            xs
        });
        let k = reference.k();
        Self { points, m, k, power, eps, reference, sorted, allow_small_n: false }
    }

    /// Build with `builder` aiming at `size` points.
    pub fn build(&self, builder: Builder, size: usize, seed: u64) -> Result<WeightedSet> {
        let n = self.points.len();
        match builder {
            Builder::Ours1d => Ok(self.ours_1d_for_size(size)?.set),
            Builder::OursNd => {
                let mut cfg = NdCoresetConfig::new(self.eps, seed).for_total_size(size, n, self.m);
                cfg.allow_small_n = self.allow_small_n;
                Ok(build_robust_kz(&self.points, self.m, &cfg, &self.reference)?.set)
            }
            Builder::Hjlw23 => build_hjlw23(&self.points, self.m, size, &self.reference, seed),
            Builder::Hllw25 => build_hllw25(&self.points, self.m, size, &self.reference, seed),
            Builder::Uniform => build_uniform(&self.points, size.min(n), seed),
        }
    }

    fn ours_1d(&self, eps: f64) -> Result<Coreset1d> {
        let Some(sorted) = &self.sorted else {
            return invalid("the 1D builder needs one-dimensional data");
        };
        if self.power != Power::One || self.k != 1 {
            return invalid("the 1D builder handles k = 1, z = 1 only");
        }
        let mut cfg = Robust1dConfig::new(eps);
        cfg.allow_small_n = self.allow_small_n;
        build_robust_1d_with(sorted, self.m, cfg)
    }

    /// The 1D coreset with the smallest `eps` whose size is at most `size`
    /// (bisection on `eps`; the coarsest build if none fits).
    pub fn ours_1d_for_size(&self, size: usize) -> Result<Coreset1d> {
        let (mut lo, mut hi) = (1e-6f64, 0.99f64);
        let mut best = self.ours_1d(hi)?;
        if best.set.len() > size {
            return Ok(best);
        }
        for _ in 0..40 {
            let mid = (lo * hi).sqrt();
            let c = self.ours_1d(mid)?;
            if c.set.len() <= size {
                hi = mid;
                best = c;
            } else {
                lo = mid;
            }
            if hi / lo < 1.0 + 1e-3 {
                break;
            }
        }
        Ok(best)
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One measurement of a builder on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub builder: Builder,
    pub target_size: usize,
    pub size: usize,
    pub trial: usize,
    pub empirical_error: f64,
    pub per_center: Vec<f64>,
    pub skipped: usize,
    pub build_time: Duration,
    pub seed: u64,
}

/// Build once and measure against `bank`.
pub fn evaluate_builder(
    ctx: &BuildContext,
    bank: &CenterBank,
    builder: Builder,
    size: usize,
    trial: usize,
    seed: u64,
) -> Result<EvalReport> {
    let start = Instant::now();
    let set = ctx.build(builder, size, seed)?;
    let build_time = start.elapsed();
    let summary = bank.evaluate(&set)?;
    Ok(EvalReport {
        builder,
        target_size: size,
        size: set.len(),
        trial,
        empirical_error: summary.max_error,
        per_center: summary.per_center,
        skipped: summary.skipped,
        build_time,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMean {
    pub builder: Builder,
    pub size: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub seed: u64,
    pub rows: Vec<EvalReport>,
    pub means: Vec<SweepMean>,
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "builder,target_size,size,trial,empirical_error,skipped,build_seconds,seed";

    /// One CSV row per (builder, size, trial).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.17e},{},{:.6},{}\n",
                r.builder,
                r.target_size,
                r.size,
                r.trial,
                r.empirical_error,
                r.skipped,
                r.build_time.as_secs_f64(),
                r.seed
            ));
        }
        out
    }
}

/// Mean empirical error per (builder, size) over `trials`. Centers are resampled
/// per trial and shared by every builder within it.
pub fn sweep_size_error(
    ctx: &BuildContext,
    sizes: &[usize],
    builders: &[Builder],
    trials: usize,
    num_centers: usize,
    seed: u64,
) -> Result<SweepTable> {
    if sizes.is_empty() || builders.is_empty() || trials == 0 {
        return invalid("need at least one size, one builder and one trial");
    }
    let per_trial: Vec<Vec<EvalReport>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            let bank = CenterBank::sample(&ctx.points, ctx.m, ctx.k, ctx.power, num_centers, ts)?;
            let mut rows = Vec::with_capacity(sizes.len() * builders.len());
            for &b in builders {
                for &s in sizes {
                    rows.push(evaluate_builder(ctx, &bank, b, s, t, ts)?);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<EvalReport> = per_trial.into_iter().flatten().collect();
    rows.sort_by_key(|r| (builders.iter().position(|b| *b == r.builder), sizes.iter().position(|s| *s == r.target_size), r.trial));
    let mut means = Vec::new();
    for &b in builders {
        for &s in sizes {
            let errs: Vec<f64> =
                rows.iter().filter(|r| r.builder == b && r.target_size == s).map(|r| r.empirical_error).collect();
            let mean = pairwise_sum(&errs) / errs.len() as f64;
            let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / errs.len() as f64;
            means.push(SweepMean { builder: b, size: s, mean_error: mean, std_error: var.sqrt(), trials: errs.len() });
        }
    }
    Ok(SweepTable { seed, rows, means })
}

/// Random balls with precomputed population fractions, reusable across samples.
#[derive(Debug, Clone)]
pub struct BallBank {
    centers: Vec<Vec<f64>>,
    sq_radii: Vec<f64>,
    fractions: Vec<f64>,
}

impl BallBank {
    /// `count` balls with centers uniform in the bounding box of `population` and
    /// radii uniform in `(0, diag]`, `diag` the box diagonal.
    pub fn new(population: &Dataset, count: usize, seed: u64) -> Result<Self> {
        if population.is_empty() {
            return invalid("population is empty");
        }
        let d = population.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for r in population.rows() {
            for j in 0..d {
                lo[j] = lo[j].min(r[j]);
                hi[j] = hi[j].max(r[j]);
            }
        }
        let diag = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let mut rng = rng_stream(seed, 0);
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut sq_radii = Vec::with_capacity(count);
        for _ in 0..count {
            centers.push((0..d).map(|j| if hi[j] > lo[j] { rng.random_range(lo[j]..=hi[j]) } else { lo[j] }).collect());
            let r = diag * (1.0 - rng.random::<f64>());
            sq_radii.push(r * r);
        }
        let n = population.len() as f64;
        let fractions = centers
            .par_iter()
            .zip(&sq_radii)
            .map(|(c, &r2)| population.rows().filter(|p| sq(p, c) <= r2).count() as f64 / n)
            .collect();
        Ok(Self { centers, sq_radii, fractions })
    }

    /// `max_B | |P ∩ B| / |P| - w(S ∩ B) / w(S) |` over the stored balls.
    pub fn deviation(&self, sample: &WeightedSet) -> f64 {
        let total = sample.total_weight();
        self.centers
            .par_iter()
            .zip(&self.sq_radii)
            .zip(&self.fractions)
            .map(|((c, &r2), &f)| {
                let inside: f64 =
                    (0..sample.len()).filter(|&i| sq(sample.row(i), c) <= r2).map(|i| sample.weights()[i]).sum();
                (f - inside / total).abs()
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn sq(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Monte-Carlo ball-range deviation of `sample` from `population`.
pub fn ball_range_check(population: &Dataset, sample: &WeightedSet, num_balls: usize, seed: u64) -> Result<f64> {
    Ok(BallBank::new(population, num_balls, seed)?.deviation(sample))
}

/// Exact ball-range deviation on the line: balls are closed intervals, so the
/// supremum is `max G - min G` for the signed cumulative difference `G`.
pub fn ball_range_exact_1d(population: &[f64], sample: &WeightedSet) -> Result<f64> {
    if sample.dim() != 1 || population.is_empty() {
        return invalid("need a nonempty 1D population and a 1D sample");
    }
    let pw = 1.0 / population.len() as f64;
    let sw = sample.total_weight();
    let mut events: Vec<(f64, f64)> = population.iter().map(|&x| (x, pw)).collect();
    events.extend((0..sample.len()).map(|i| (sample.row(i)[0], -sample.weights()[i] / sw)));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut g, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            g += events[i].1;
            i += 1;
        }
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok(hi - lo)
}

/// Per-bucket outlier counts of `P` and the coreset at center `c`, via the sorted
/// window and a two-pointer sweep over the (sorted) representatives.
pub fn bucket_outlier_counts(sorted: &[f64], buckets: &[Bucket], set: &WeightedSet, m: usize, c: f64) -> (Vec<f64>, Vec<f64>) {
    let n = sorted.len();
    let keep = n - m;
    let a = if keep == 0 { 0 } else { nearest_window(sorted, c, keep) };
    let b = a + keep;
    let mp: Vec<f64> = buckets
        .iter()
        .map(|bk| {
            let inside = bk.end.min(b.saturating_sub(1)) as isize - bk.start.max(a) as isize + 1;
            (bk.count as isize - inside.max(0).min(bk.count as isize)) as f64
        })
        .collect();
    let xs: Vec<f64> = (0..set.len()).map(|i| set.row(i)[0]).collect();
    let ws = set.weights();
    let mut kept = vec![0.0; xs.len()];
    let mut budget = keep as f64;
    let mut right = xs.partition_point(|&x| x < c);
    let mut left = right;
    while budget > 0.0 && (left > 0 || right < xs.len()) {
        let take_left = match (left > 0, right < xs.len()) {
            (true, true) => c - xs[left - 1] <= xs[right] - c,
            (l, _) => l,
        };
        let i = if take_left {
            left -= 1;
            left
        } else {
            right += 1;
            right - 1
        };
        let w = ws[i].min(budget);
        kept[i] = w;
        budget -= w;
    }
    let ms = ws.iter().zip(&kept).map(|(w, k)| w - k).collect();
    (mp, ms)
}

/// `sum_i |m_i - m_i'|` for the bucket map of a 1D coreset.
pub fn misalignment(sorted: &[f64], coreset: &Coreset1d, m: usize, c: f64) -> f64 {
    let (mp, ms) = bucket_outlier_counts(sorted, &coreset.buckets, &coreset.set, m, c);
    mp.iter().zip(&ms).map(|(a, b)| (a - b).abs()).sum()
}

/// The same per-bucket counts through `outlier_split` and `inlier_assignment`.
pub fn bucket_outlier_counts_direct(
    sorted: &[f64],
    buckets: &[Bucket],
    set: &WeightedSet,
    m: usize,
    c: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let center = CenterSet::scalar(c, Power::One)?;
    let split = outlier_split(&Dataset::from_scalars(sorted)?, &center, m)?;
    let mut mp = vec![0.0; buckets.len()];
    let mut owner = vec![0usize; sorted.len()];
    for (bi, b) in buckets.iter().enumerate() {
        owner[b.range()].fill(bi);
    }
    for &i in &split.outliers {
        mp[owner[i]] += 1.0;
    }
    let assign = inlier_assignment(set, &center, m as f64)?;
    let ms = (0..set.len()).map(|i| assign.dropped(set.weights(), i)).collect();
    Ok((mp, ms))
}

/// `sum_B |cost^(m_B)(B, c) - (|B| - m_B) dist(mu(B), c)|` with `m_B` the outliers of
/// `P` at `c` falling in `B`: the error bound used by component-wise analyses.
pub fn componentwise_error(sorted: &[f64], buckets: &[Bucket], m: usize, c: f64) -> Result<f64> {
    let center = CenterSet::scalar(c, Power::One)?;
    let split = outlier_split(&Dataset::from_scalars(sorted)?, &center, m)?;
    let mut outlier = vec![false; sorted.len()];
    for &i in &split.outliers {
        outlier[i] = true;
    }
    let mut terms = Vec::with_capacity(buckets.len());
    for b in buckets {
        let mb = b.range().filter(|&i| outlier[i]).count();
        let costs: Vec<f64> = sorted[b.range()].iter().map(|p| (p - c).abs()).collect();
        let inner = trimmed_cost(&costs, mb)?;
        terms.push((inner - (b.count - mb) as f64 * (b.mean - c).abs()).abs());
    }
    Ok(pairwise_sum(&terms))
}

/// `m_P = |L* ∩ L^(c)|` and `m_S`, the mass of `S_O` discarded at `c` when
/// evaluating `S_O ∪ P_I*` (inliers at unit weight) with outlier mass `m`.
pub fn outlier_count_pair(
    points: &Dataset,
    split: &OutlierSplit,
    outlier_sample: &WeightedSet,
    m: usize,
    c: &CenterSet,
) -> Result<(f64, f64)> {
    let at_c = outlier_split(points, c, m)?;
    let mut star = vec![false; points.len()];
    for &i in &split.outliers {
        star[i] = true;
    }
    let mp = at_c.outliers.iter().filter(|&&i| star[i]).count() as f64;
    let joined = outlier_sample.union(&WeightedSet::unit(points.select(&split.inliers)))?;
    let assign = inlier_assignment(&joined, c, m as f64)?;
    let ms = (0..outlier_sample.len()).map(|i| assign.dropped(joined.weights(), i)).sum();
    Ok((mp, ms))
}

/// `(T_I, T_O)`: farthest optimal inlier and nearest optimal outlier from `c`.
pub fn inlier_outlier_gap(points: &Dataset, split: &OutlierSplit, c: &CenterSet) -> Result<(f64, f64)> {
    let costs = point_costs(points, &CenterSet::new(c.centers().clone(), Power::One)?)?;
    let t_i = split.inliers.iter().map(|&i| costs[i]).fold(0.0, f64::max);
    let t_o = split.outliers.iter().map(|&i| costs[i]).fold(f64::INFINITY, f64::min);
    Ok((t_i, t_o))
}

/// Runtime and quality of solving on a coreset versus the full data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub builder: Builder,
    pub target_size: usize,
    pub size: usize,
    pub build_time: Duration,
    pub solve_time: Duration,
    pub full_solve_time: Duration,
    pub cost_p: f64,
    /// Full-data robust cost at the centers found on the coreset.
    pub cost_s: f64,
    pub seed: u64,
}

impl SpeedupRow {
    pub const CSV_HEADER: &'static str =
        "builder,target_size,size,build_seconds,solve_seconds,full_solve_seconds,cost_p,cost_s,seed";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.17e},{:.17e},{}",
            self.builder,
            self.target_size,
            self.size,
            self.build_time.as_secs_f64(),
            self.solve_time.as_secs_f64(),
            self.full_solve_time.as_secs_f64(),
            self.cost_p,
            self.cost_s,
            self.seed
        )
    }
}

/// Time the Lloyd solver on each coreset and on the full data. Each timing is the
/// mean over `repeats` solver seeds; the lowest-cost centers are kept.
pub fn speedup_report(
    ctx: &BuildContext,
    entries: &[(Builder, usize)],
    seed: u64,
    repeats: usize,
) -> Result<Vec<SpeedupRow>> {
    let repeats = repeats.max(1);
    let full = WeightedSet::unit(ctx.points.clone());
    let timed = |set: &WeightedSet| -> Result<(Duration, CenterSet)> {
        let mut elapsed = Duration::ZERO;
        let mut best: Option<(f64, CenterSet)> = None;
        for r in 0..repeats {
            let solver = LloydConfig::new(ctx.k, ctx.m as f64, ctx.power, seed.wrapping_add(r as u64));
            let start = Instant::now();
            let run = lloyd_weighted(set, &solver)?;
            elapsed += start.elapsed();
            if best.as_ref().is_none_or(|(c, _)| run.cost < *c) {
                best = Some((run.cost, run.centers));
            }
        }
        Ok((elapsed / repeats as u32, best.expect("at least one solve").1))
    };
    let (full_solve_time, full_centers) = timed(&full)?;
    let cost_p = robust_cost(&ctx.points, &full_centers, ctx.m)?;
    let mut rows = Vec::with_capacity(entries.len());
    for &(builder, size) in entries {
        let start = Instant::now();
        let set = ctx.build(builder, size, seed)?;
        let build_time = start.elapsed();
        let (solve_time, centers) = timed(&set)?;
        rows.push(SpeedupRow {
            builder,
            target_size: size,
            size: set.len(),
            build_time,
            solve_time,
            full_solve_time,
            cost_p,
            cost_s: robust_cost(&ctx.points, &centers, ctx.m)?,
            seed,
        });
    }
    Ok(rows)
}
