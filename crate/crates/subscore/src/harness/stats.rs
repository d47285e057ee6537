//! Wilcoxon signed-rank test.
//!
//! Exact null distribution (dynamic program over the achievable rank sums)
//! for up to 25 nonzero pairs; normal approximation with continuity and tie
//! corrections beyond that. Average ranks are doubled internally so the
//! dynamic program stays on integers even with ties.

use crate::error::Error;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    /// Median of `a - b` is negative.
    Less,
    /// Median of `a - b` is positive.
    Greater,
}

const EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank p-value for paired samples.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    wilcoxon_signed_rank_with(a, b, Alternative::TwoSided)
}

pub fn wilcoxon_signed_rank_with(a: &[f64], b: &[f64], alternative: Alternative) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "paired samples must have equal length, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 6 {
        return Err(Error::InvalidInput(format!(
            "need at least 6 pairs for a meaningful test, got {}",
            a.len()
        )));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Ok(1.0);
    }
    let (w_plus2, ranks2, tie_sizes) = signed_ranks_doubled(&diffs);
    let n = diffs.len();
    let p = if n <= EXACT_LIMIT {
        exact_p(w_plus2, &ranks2, alternative)
    } else {
        normal_p(w_plus2, n, &tie_sizes, alternative)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Ranks |d| with average ranks for ties, doubled to stay integral.
/// Returns (2 * W+, doubled ranks, tie group sizes).
fn signed_ranks_doubled(diffs: &[f64]) -> (u64, Vec<u64>, Vec<usize>) {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut pos = 0usize;
    while pos < n {
        let mut end = pos + 1;
        while end < n && diffs[order[end]].abs() == diffs[order[pos]].abs() {
            end += 1;
        }
        // Average of ranks pos+1 ..= end, doubled: (pos + 1 + end).
        let doubled_rank = (pos + 1 + end) as u64;
        for &idx in &order[pos..end] {
            ranks2[idx] = doubled_rank;
        }
        tie_sizes.push(end - pos);
        pos = end;
    }
    let w_plus2: u64 = diffs
        .iter()
        .zip(&ranks2)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, &r)| r)
        .sum();
    (w_plus2, ranks2, tie_sizes)
}

/// Exact tail probabilities by enumerating the distribution of the doubled
/// statistic under random sign flips. Counts fit exactly in f64 for n <= 25.
fn exact_p(w_plus2: u64, ranks2: &[u64], alternative: Alternative) -> f64 {
    let total: u64 = ranks2.iter().sum();
    let mut dist = vec![0.0f64; total as usize + 1];
    dist[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        reach += r;
        for s in (0..=reach).rev() {
            if s >= r && dist[s - r] > 0.0 {
                dist[s] += dist[s - r];
            }
        }
    }
    let denom = 2f64.powi(ranks2.len() as i32);
    let cdf_at = |w: u64| -> f64 {
        dist[..=(w as usize)].iter().sum::<f64>() / denom
    };
    let sf_at = |w: u64| -> f64 { dist[(w as usize)..].iter().sum::<f64>() / denom };
    match alternative {
        Alternative::Less => cdf_at(w_plus2),
        Alternative::Greater => sf_at(w_plus2),
        Alternative::TwoSided => 2.0 * f64::min(cdf_at(w_plus2), sf_at(w_plus2)),
    }
}

fn normal_p(w_plus2: u64, n: usize, tie_sizes: &[usize], alternative: Alternative) -> f64 {
    let nf = n as f64;
    let w = w_plus2 as f64 / 2.0;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_correction: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / 48.0;
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_correction;
    let sd = variance.sqrt();
    match alternative {
        Alternative::Less => phi((w - mean + 0.5) / sd),
        Alternative::Greater => 1.0 - phi((w - mean - 0.5) / sd),
        Alternative::TwoSided => {
            let shift = 0.5 * (w - mean).signum();
            let z = ((w - mean) - shift) / sd;
            2.0 * (1.0 - phi(z.abs()))
        }
    }
}

/// Standard normal CDF via the complementary error function.
fn phi(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Rational Chebyshev approximation of erfc, fractional error below 1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}
