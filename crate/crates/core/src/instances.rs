//! Instance generators: the adversarial 1D constructions and synthetic Gaussian
//! benchmarks. Every generator is deterministic under its seed, and 1D families
//! come out sorted.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoresetError, Result};
use crate::geometry::Dataset;
use crate::numeric::rng_stream;

/// Largest magnitude an adversarial instance may contain.
pub const VALUE_CAP: f64 = 1e300;

/// The pigeonhole instance: `q` far groups that each need their own coreset point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundInstance {
    /// Sorted.
    pub points: Vec<f64>,
    pub q: usize,
    pub alpha: f64,
    pub group_size: usize,
    /// `m^(j alpha)` for `j = 1..=q`.
    pub centers: Vec<f64>,
    /// `I_j = [m^((j-1) alpha + 1), m^(j alpha + 1)]`.
    pub intervals: Vec<(f64, f64)>,
}

fn power_of(base: f64, exponent: f64) -> Result<f64> {
    let v = if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        (exponent * base.ln()).exp()
    };
    if !v.is_finite() || v > VALUE_CAP {
        return Err(CoresetError::InvalidParameters(format!(
            "{base}^{exponent} exceeds the representable cap {VALUE_CAP:e}"
        )));
    }
    Ok(v)
}

/// `q = floor(m / (2 n eps))` groups `T_i` of `floor(m / q)` points at `m^(i alpha)`,
/// `alpha = 2 + log_m(eps^-2)`; the rest of the points sit at 0.
pub fn gen_lower_bound_1d(n: usize, m: usize, eps: f64) -> Result<LowerBoundInstance> {
    if !(eps > 0.0 && eps < 1.0) || m < 2 || m >= n {
        return Err(CoresetError::InvalidParameters(format!(
            "need eps in (0, 1) and 2 <= m < n (n = {n}, m = {m}, eps = {eps})"
        )));
    }
    if n < 4 * m {
        return Err(CoresetError::AssumptionViolation(format!("n >= 4m does not hold (n = {n}, m = {m})")));
    }
    let q = (m as f64 / (2.0 * n as f64 * eps)).floor() as usize;
    if q == 0 {
        return Err(CoresetError::InvalidParameters(format!(
            "q = floor(m / (2 n eps)) is zero for n = {n}, m = {m}, eps = {eps}"
        )));
    }
    let mf = m as f64;
    let alpha = 2.0 + (eps.powi(-2)).ln() / mf.ln();
    let group_size = m / q;
    let mut points = vec![0.0; n - q * group_size];
    let mut centers = Vec::with_capacity(q);
    let mut intervals = Vec::with_capacity(q);
    for j in 1..=q {
        let v = power_of(mf, j as f64 * alpha)?;
        points.extend(std::iter::repeat_n(v, group_size));
        centers.push(v);
        intervals.push((power_of(mf, (j - 1) as f64 * alpha + 1.0)?, power_of(mf, j as f64 * alpha + 1.0)?));
    }
    Ok(LowerBoundInstance { points, q, alpha, group_size, centers, intervals })
}

/// Inliers `i / n` for `i <= n - m`, outliers `n^(3 (i - n + m))` beyond.
pub fn gen_obstacle(n: usize, m: usize) -> Result<Vec<f64>> {
    if m < 2 || m >= n {
        return Err(CoresetError::InvalidParameters(format!("need 2 <= m < n (n = {n}, m = {m})")));
    }
    let nf = n as f64;
    let mut points: Vec<f64> = (1..=n - m).map(|i| i as f64 / nf).collect();
    for j in 1..=m {
        points.push(power_of(nf, 3.0 * j as f64)?);
    }
    Ok(points)
}

/// `1, 2, ..., m` followed by `n - m` copies of `x`.
pub fn gen_ratio_lb(n: usize, m: usize, x: f64) -> Result<Vec<f64>> {
    if m == 0 || m >= n {
        return Err(CoresetError::InvalidParameters(format!("need 1 <= m < n (n = {n}, m = {m})")));
    }
    if !(x > m as f64) || x > VALUE_CAP {
        return Err(CoresetError::InvalidParameters(format!("far value {x} must exceed m = {m}")));
    }
    let mut points: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    points.extend(std::iter::repeat_n(x, n - m));
    Ok(points)
}

/// Default far value `10^6 m` of [`gen_ratio_lb`].
pub fn ratio_lb_default_x(m: usize) -> f64 {
    1e6 * m as f64
}

/// Parameters of [`gen_gaussian_clusters`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    /// Total points, outliers included.
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub spread: f64,
    pub seed: u64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self { n: 10_000, d: 5, k: 5, m: 200, spread: 1.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoints {
    pub points: Dataset,
    /// Cluster of each point; `None` for planted outliers.
    pub labels: Vec<Option<usize>>,
    pub means: Dataset,
}

fn gaussian_vec(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `k` isotropic Gaussian clusters (round-robin sizes) plus `m` outliers on a far shell.
///
/// Means are at least `8 spread sqrt(d)` apart inside a cube of half-width
/// `k` times that; outliers sit at radius uniform in `[R, 2R]` around the origin,
/// with `R` four times the reach of any cluster.
pub fn gen_gaussian_clusters(spec: &GaussianSpec) -> Result<LabeledPoints> {
    let GaussianSpec { n, d, k, m, spread, seed } = *spec;
    if k == 0 || d == 0 || m >= n || n - m < k {
        return Err(CoresetError::InvalidParameters(format!(
            "need k >= 1, d >= 1 and n - m >= k (n = {n}, d = {d}, k = {k}, m = {m})"
        )));
    }
    if !(spread >= 0.0) || !spread.is_finite() {
        return invalid(format!("spread must be finite and nonnegative, got {spread}"));
    }
    let mut rng = rng_stream(seed, 0);
    let root_d = (d as f64).sqrt();
    let sep = 8.0 * spread * root_d;
    let half = sep * k as f64;
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(k);
    while means.len() < k {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..1000 {
            let cand: Vec<f64> = (0..d).map(|_| if half > 0.0 { rng.random_range(-half..=half) } else { 0.0 }).collect();
            let gap = means
                .iter()
                .map(|c| c.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            if gap >= sep {
                best = Some((gap, cand));
                break;
            }
            if best.as_ref().is_none_or(|(g, _)| gap > *g) {
                best = Some((gap, cand));
            }
        }
        means.push(best.expect("at least one candidate").1);
    }
    let reach = half * root_d + 6.0 * spread * root_d;
    let shell = 4.0 * reach.max(1.0);
    let mut coords = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n - m {
        let c = i % k;
        for (x, z) in means[c].iter().zip(gaussian_vec(&mut rng, d)) {
            coords.push(x + spread * z);
        }
        labels.push(Some(c));
    }
    for _ in 0..m {
        let mut dir = gaussian_vec(&mut rng, d);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            dir = vec![0.0; d];
            dir[0] = 1.0;
        } else {
            dir.iter_mut().for_each(|v| *v /= norm);
        }
        let r = rng.random_range(shell..=2.0 * shell);
        coords.extend(dir.iter().map(|v| v * r));
        labels.push(None);
    }
    Ok(LabeledPoints {
        points: Dataset::new(d, coords)?,
        labels,
        means: Dataset::from_rows(&means)?,
    })
}

/// Sorted scalars of a 1D [`gen_gaussian_clusters`] instance.
pub fn gen_gaussian_1d(n: usize, m: usize, seed: u64) -> Result<Vec<f64>> {
    let labeled = gen_gaussian_clusters(&GaussianSpec { n, d: 1, k: 1, m, spread: 1.0, seed })?;
    let mut xs = labeled.points.into_flat();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Add i.i.d. standard Cauchy noise to every coordinate of `floor(fraction n)` random points.
pub fn contaminate_cauchy(points: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..1.0).contains(&fraction) {
        return invalid(format!("contamination fraction must lie in [0, 1), got {fraction}"));
    }
    let n = points.len();
    let count = (fraction * n as f64).floor() as usize;
    let mut out = points.as_flat().to_vec();
    if count == 0 {
        return Dataset::new(points.dim(), out);
    }
    let d = points.dim();
    let mut rng = rng_stream(seed, 1);
    let cauchy = Cauchy::new(0.0, 1.0).expect("valid scale");
    let mut picked = index::sample(&mut rng, n, count).into_vec();
    picked.sort_unstable();
    for i in picked {
        for x in &mut out[i * d..(i + 1) * d] {
            let mut noise: f64 = cauchy.sample(&mut rng);
            while noise == 0.0 || !(*x + noise).is_finite() {
                noise = cauchy.sample(&mut rng);
            }
            *x += noise;
        }
    }
    Dataset::new(d, out)
}

/// Separate equal values by `i 2^-40 scale`, keeping the order.
pub fn jitter_sorted(points: &mut [f64]) {
    let scale = points.iter().fold(0.0f64, |a, p| a.max(p.abs())).max(1.0);
    for (i, p) in points.iter_mut().enumerate() {
        *p += i as f64 * scale * 2f64.powi(-40);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    LowerBound1d,
    Obstacle,
    Ratio,
    Gauss,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LowerBound1d => "lb1d",
            Self::Obstacle => "obstacle",
            Self::Ratio => "ratio",
            Self::Gauss => "gauss",
        })
    }
}

impl FromStr for Family {
    type Err = CoresetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lb1d" => Ok(Self::LowerBound1d),
            "obstacle" => Ok(Self::Obstacle),
            "ratio" => Ok(Self::Ratio),
            "gauss" => Ok(Self::Gauss),
            other => invalid(format!("unknown instance family {other:?}")),
        }
    }
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub contamination: f64,
    /// Separate duplicate values in 1D families.
    pub jitter: bool,
}

impl InstanceSpec {
    pub fn new(family: Family, n: usize, m: usize) -> Self {
        Self { family, n, m, d: 1, k: 1, eps: 0.1, seed: 0, contamination: 0.0, jitter: false }
    }
}

/// Build the dataset described by `spec`.
pub fn generate(spec: &InstanceSpec) -> Result<Dataset> {
    if spec.m >= spec.n || spec.d == 0 {
        return Err(CoresetError::InvalidParameters(format!(
            "need n > m >= 0 and d >= 1 (n = {}, m = {}, d = {})",
            spec.n, spec.m, spec.d
        )));
    }
    let scalars = |mut xs: Vec<f64>| {
        if spec.jitter {
            jitter_sorted(&mut xs);
        }
        Dataset::from_scalars(&xs)
    };
    let base = match spec.family {
        Family::LowerBound1d => scalars(gen_lower_bound_1d(spec.n, spec.m, spec.eps)?.points)?,
        Family::Obstacle => scalars(gen_obstacle(spec.n, spec.m)?)?,
        Family::Ratio => scalars(gen_ratio_lb(spec.n, spec.m, ratio_lb_default_x(spec.m))?)?,
        Family::Gauss => {
            let g = GaussianSpec { n: spec.n, d: spec.d, k: spec.k, m: spec.m, spread: 1.0, seed: spec.seed };
            gen_gaussian_clusters(&g)?.points
        }
    };
    contaminate_cauchy(&base, spec.contamination, spec.seed)
}
