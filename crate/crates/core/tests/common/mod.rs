#![allow(dead_code)]

use robust_coreset::coreset1d::Bucket;

/// Minimum weighted robust cost by exhaustive integral outlier allocations.
/// `best[t]` is the optimum for outlier mass `t`, for every `t` in `0..=w(S)`.
pub fn brute_weighted_costs(costs: &[f64], weights: &[u32]) -> Vec<f64> {
    let total: u32 = weights.iter().sum();
    let mut best = vec![f64::INFINITY; total as usize + 1];
    let mut alloc = vec![0u32; weights.len()];
    loop {
        let dropped: u32 = alloc.iter().sum();
        let cost: f64 = costs.iter().zip(weights).zip(&alloc).map(|((c, w), o)| (w - o) as f64 * c).sum();
        let slot = &mut best[dropped as usize];
        *slot = slot.min(cost);
        let mut i = 0;
        loop {
            if i == alloc.len() {
                return best;
            }
            if alloc[i] < weights[i] {
                alloc[i] += 1;
                break;
            }
            alloc[i] = 0;
            i += 1;
        }
    }
}

/// Optimal window `(l, r)` and cost of the robust 1D median, by trying every
/// window and every candidate center inside it. The first strictly better window wins.
pub fn brute_median_1d(sorted: &[f64], m: usize) -> ((usize, usize), f64, f64) {
    let n = sorted.len();
    let w = n - m;
    let mut best: Option<((usize, usize), f64, f64)> = None;
    for l in 0..=m {
        let window = &sorted[l..l + w];
        let mut local: Option<(f64, f64)> = None;
        for &c in window {
            let cost: f64 = window.iter().map(|p| (p - c).abs()).sum();
            if local.is_none_or(|(lc, _)| cost < lc) {
                local = Some((cost, c));
            }
        }
        let (cost, c) = local.unwrap();
        if best.is_none_or(|(_, bc, _)| cost < bc) {
            best = Some(((l, l + w - 1), cost, c));
        }
    }
    best.unwrap()
}

/// Direct recomputation of a bucket's statistics.
pub fn naive_bucket(sorted: &[f64], b: &Bucket) -> (usize, f64, f64) {
    let xs = &sorted[b.start..=b.end];
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.len(), mean, xs.iter().map(|p| (p - mean).abs()).sum())
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
