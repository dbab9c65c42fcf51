use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturb::sampling_rng;
use crate::scalar::{dot, norm, Scalar};

pub const DEFAULT_PAIR_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityStats {
    pub vectors: usize,
    pub pairs: usize,
    pub sampled: bool,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub percent_above_mean: f64,
}

/// Maps a linear index over the upper triangle (row-major, `i < j`) to `(i, j)`.
pub fn unrank_pair(p: usize, n: usize) -> (usize, usize) {
    let offset = |i: usize| i * (2 * n - i - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * p as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as usize;
    i = i.min(n - 2);
    while i > 0 && offset(i) > p {
        i -= 1;
    }
    while i + 1 < n - 1 && offset(i + 1) <= p {
        i += 1;
    }
    (i, i + 1 + p - offset(i))
}

/// Cosine statistics over all unordered pairs, or a seeded sample of
/// `pair_cap` pairs when there are more.
pub fn pairwise_similarity_stats<S: Scalar>(
    vectors: &[&[S]],
    pair_cap: Option<usize>,
    seed: u64,
) -> Result<SimilarityStats> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::Validation(format!("pairwise similarity needs at least 2 vectors, got {n}")));
    }
    let norms: Vec<f64> = vectors.iter().map(|v| norm(v)).collect();
    if norms.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::Validation("pairwise similarity over a zero vector".into()));
    }
    let total = n * (n - 1) / 2;
    let (pairs, sampled): (Vec<usize>, bool) = match pair_cap {
        Some(cap) if cap < total => {
            if cap == 0 {
                return Err(Error::Validation("pair cap must be at least 1".into()));
            }
            let mut p = index::sample(&mut sampling_rng(seed, "pairs"), total, cap).into_vec();
            p.sort_unstable();
            (p, true)
        }
        _ => ((0..total).collect(), false),
    };
    let sims: Vec<f64> = pairs
        .par_iter()
        .map(|&p| {
            let (i, j) = unrank_pair(p, n);
            dot(vectors[i], vectors[j]) / (norms[i] * norms[j])
        })
        .collect();
    let count = sims.len() as f64;
    let mean = sims.iter().sum::<f64>() / count;
    let var = sims.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / count;
    let min = sims.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let above = sims.iter().filter(|&&s| s > mean).count();
    Ok(SimilarityStats {
        vectors: n,
        pairs: sims.len(),
        sampled,
        mean,
        std: var.sqrt(),
        min,
        max,
        percent_above_mean: 100.0 * above as f64 / count,
    })
}
