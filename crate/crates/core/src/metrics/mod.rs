//! Retrieval and overlap metrics, similarity statistics and the capability matrix.

mod capability;
mod similarity;

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturb::Category;
use crate::retrieval::Key;

pub use capability::{capability_matrix, CapabilityCell, CapabilityMatrix, Threshold, Thresholds};
pub use similarity::{pairwise_similarity_stats, unrank_pair, SimilarityStats, DEFAULT_PAIR_CAP};

pub const T100_CUTOFF: usize = 100;

/// Rank of the relevant candidate for one query; `None` when beyond the ranked depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOutcome {
    pub query: Key,
    pub rank: Option<usize>,
}

impl RankOutcome {
    pub fn new(query: Key, rank: Option<usize>) -> Self {
        debug_assert!(rank != Some(0));
        RankOutcome { query, rank }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: Category,
    pub metric: String,
    pub value: f64,
}

fn non_empty<T>(items: &[T], metric: &str) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Validation(format!("{metric} of an empty outcome list")));
    }
    Ok(())
}

/// Mean reciprocal rank; an absent rank contributes 0.
pub fn mrr(outcomes: &[RankOutcome]) -> Result<f64> {
    non_empty(outcomes, "MRR")?;
    let sum: f64 = outcomes.iter().map(|o| o.rank.map_or(0.0, |r| 1.0 / r as f64)).sum();
    Ok(sum / outcomes.len() as f64)
}

/// Percentage of queries whose rank is present and at most `cutoff`.
pub fn hits_at(outcomes: &[RankOutcome], cutoff: usize) -> Result<f64> {
    non_empty(outcomes, "hit rate")?;
    let hits = outcomes.iter().filter(|o| o.rank.is_some_and(|r| r <= cutoff)).count();
    Ok(100.0 * hits as f64 / outcomes.len() as f64)
}

pub fn t100(outcomes: &[RankOutcome]) -> Result<f64> {
    hits_at(outcomes, T100_CUTOFF)
}

/// NNk_Ret for one neighbor class.
pub fn nnk_ret(outcomes: &[RankOutcome], k: usize) -> Result<f64> {
    hits_at(outcomes, k)
}

/// Overlap percentage of two k-NN lists under set semantics.
pub fn overlap<K: Eq + Hash>(a: &[K], b: &[K], k: usize) -> Result<f64> {
    if a.len() != k || b.len() != k {
        return Err(Error::Validation(format!("AOP-{k} needs lists of length {k}, got {} and {}", a.len(), b.len())));
    }
    let sa: HashSet<&K> = a.iter().collect();
    let sb: HashSet<&K> = b.iter().collect();
    Ok(100.0 * sa.intersection(&sb).count() as f64 / k as f64)
}

/// Average overlap percentage over pairs of k-NN lists.
pub fn aop<'a, K: Eq + Hash + 'a>(pairs: impl IntoIterator<Item = (&'a [K], &'a [K])>, k: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (a, b) in pairs {
        sum += overlap(a, b, k)?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::Validation("AOP of an empty pair list".into()));
    }
    Ok(sum / n as f64)
}

/// Mean of per-code values within each category, for categories that have any.
pub fn category_means<'a>(values: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Vec<(Category, f64)>> {
    let mut acc: Vec<(Category, f64, usize)> = Vec::new();
    for (code, v) in values {
        let cat = crate::perturb::lookup(code)?.category();
        match acc.iter_mut().find(|(c, _, _)| *c == cat) {
            Some(e) => {
                e.1 += v;
                e.2 += 1;
            }
            None => acc.push((cat, v, 1)),
        }
    }
    acc.sort_by_key(|e| e.0);
    Ok(acc.into_iter().map(|(c, s, n)| (c, s / n as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn outcomes(ranks: &[Option<usize>]) -> Vec<RankOutcome> {
        ranks.iter().enumerate().map(|(i, r)| RankOutcome::new(Key::new(format!("d{i}"), "T"), *r)).collect()
    }

    #[test]
    fn mrr_examples() {
        assert_eq!(mrr(&outcomes(&[Some(1); 3])).unwrap(), 1.0);
        assert!((mrr(&outcomes(&[Some(1), Some(2), Some(4)])).unwrap() - 0.583_333_333_3).abs() < 1e-9);
        assert_eq!(mrr(&outcomes(&[None, Some(1)])).unwrap(), 0.5);
        assert!(mrr(&[]).is_err());
    }

    #[test]
    fn t100_examples() {
        assert!((t100(&outcomes(&[Some(5), Some(200), Some(50)])).unwrap() - 66.67).abs() < 0.01);
        assert_eq!(t100(&outcomes(&[None, None])).unwrap(), 0.0);
        assert_eq!(t100(&outcomes(&[Some(1); 4])).unwrap(), 100.0);
        assert!(t100(&[]).is_err());
    }

    #[test]
    fn nnk_examples() {
        let o = outcomes(&[Some(1), Some(1), Some(3)]);
        assert!((nnk_ret(&o, 1).unwrap() - 66.67).abs() < 0.01);
        assert_eq!(nnk_ret(&o, 10).unwrap(), 100.0);
    }

    #[test]
    fn aop_examples() {
        let a = [1, 2, 3];
        let b = [4, 5, 6];
        assert_eq!(aop([(&a[..], &a[..])], 3).unwrap(), 100.0);
        assert_eq!(aop([(&a[..], &b[..])], 3).unwrap(), 0.0);
        assert!(aop([(&a[..], &b[..2])], 3).is_err());
        assert!(aop(Vec::<(&[i32], &[i32])>::new(), 3).is_err());
    }

    #[test]
    fn category_means_group() {
        let m = category_means([("T_ARot", 10.0), ("T_ASortAsc", 20.0), ("TDelNN", 1.0)]).unwrap();
        assert_eq!(m, vec![(Category::LlPs, 15.0), (Category::LoDs, 1.0)]);
    }

    fn rank_list() -> impl Strategy<Value = Vec<Option<usize>>> {
        prop::collection::vec(prop::option::weighted(0.9, 1usize..300), 1..60)
    }

    proptest! {
        #[test]
        fn bounds_and_permutation(ranks in rank_list(), seed in any::<u64>()) {
            let o = outcomes(&ranks);
            let m = mrr(&o).unwrap();
            prop_assert!((0.0..=1.0).contains(&m));
            let t = t100(&o).unwrap();
            prop_assert!((0.0..=100.0).contains(&t));
            let mut shuffled = o.clone();
            use rand::{seq::SliceRandom, SeedableRng};
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert!((mrr(&shuffled).unwrap() - m).abs() < 1e-12);
            prop_assert_eq!(t100(&shuffled).unwrap(), t);
        }

        #[test]
        fn nnk_monotone_in_k(ranks in rank_list(), k in 1usize..50) {
            let o = outcomes(&ranks);
            prop_assert!(nnk_ret(&o, k).unwrap() <= nnk_ret(&o, k + 1).unwrap());
        }

        #[test]
        fn aop_symmetric_and_bounded(a in prop::collection::hash_set(0u32..30, 10), b in prop::collection::hash_set(0u32..30, 10)) {
            let mut a: Vec<u32> = a.into_iter().collect();
            let b: Vec<u32> = b.into_iter().collect();
            let x = aop([(&a[..], &b[..])], 10).unwrap();
            let y = aop([(&b[..], &a[..])], 10).unwrap();
            prop_assert_eq!(x, y);
            prop_assert!((0.0..=100.0).contains(&x));
            a.reverse();
            prop_assert_eq!(aop([(&a[..], &b[..])], 10).unwrap(), x);
        }
    }
}
