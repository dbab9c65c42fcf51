use std::cmp::Ordering;

use super::Key;
use crate::embed::Store;
use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub key: Key,
    pub score: f64,
}

/// Dense row-major matrix of candidate vectors, rows in key order.
#[derive(Debug, Clone)]
pub struct Index<S> {
    keys: Vec<Key>,
    data: Vec<S>,
    norms: Vec<f64>,
    dimension: usize,
}

/// Index over the store records whose key passes `filter`.
pub fn build_index<S: Scalar>(store: &Store<S>, filter: impl FnMut(&Key) -> bool) -> Result<Index<S>> {
    let mut filter = filter;
    let rows: Vec<(Key, Vec<S>)> =
        store.iter().filter(|(k, _)| filter(k)).map(|(k, v)| (k.clone(), v.to_vec())).collect();
    Index::from_rows(rows)
}

impl<S: Scalar> Index<S> {
    /// Builds from arbitrary rows; they are sorted by key.
    pub fn from_rows(mut rows: Vec<(Key, Vec<S>)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("index filter matched no records".into()));
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!("duplicate index key {}", w[0].0)));
        }
        let dimension = rows[0].1.len();
        let mut keys = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dimension);
        let mut norms = Vec::with_capacity(rows.len());
        for (k, v) in rows {
            if v.len() != dimension {
                return Err(Error::Dimension { expected: dimension, actual: v.len() });
            }
            let n = norm(&v);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::ZeroVector { doc_id: k.doc_id, code: k.code });
            }
            norms.push(n);
            data.extend(v);
            keys.push(k);
        }
        Ok(Index { keys, data, norms, dimension })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn position(&self, key: &Key) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    fn check_query(&self, query: &[S]) -> Result<f64> {
        if query.len() != self.dimension {
            return Err(Error::Dimension { expected: self.dimension, actual: query.len() });
        }
        let n = norm(query);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Validation("query vector has zero norm".into()));
        }
        Ok(n)
    }

    /// Cosine of the query against every row.
    pub fn scores(&self, query: &[S]) -> Result<Vec<f64>> {
        let qn = self.check_query(query)?;
        let q: Vec<f64> = query.iter().map(|x| x.widen()).collect();
        Ok((0..self.len())
            .map(|i| {
                let d: f64 = self.row(i).iter().zip(&q).map(|(a, b)| a.widen() * b).sum();
                d / (qn * self.norms[i])
            })
            .collect())
    }

    /// Exact top-k, score descending, ties by ascending key; `exclude` never appears.
    pub fn query_topk(&self, query: &[S], k: usize, exclude: &[Key]) -> Result<Vec<Hit>> {
        if k == 0 {
            return Err(Error::Validation("k must be at least 1".into()));
        }
        let scores = self.scores(query)?;
        let skip = self.excluded_rows(exclude);
        let mut rows: Vec<usize> = (0..self.len()).filter(|i| !skip.contains(i)).collect();
        let cmp = |a: &usize, b: &usize| -> Ordering { scores[*b].total_cmp(&scores[*a]).then(a.cmp(b)) };
        if k < rows.len() {
            rows.select_nth_unstable_by(k - 1, cmp);
            rows.truncate(k);
        }
        rows.sort_unstable_by(cmp);
        Ok(rows.into_iter().map(|i| Hit { key: self.keys[i].clone(), score: scores[i] }).collect())
    }

    /// 1-based rank of `relevant` over the full ordering of non-excluded rows.
    pub fn rank_of(&self, query: &[S], relevant: &Key, exclude: &[Key]) -> Result<usize> {
        let target = self
            .position(relevant)
            .ok_or_else(|| Error::Validation(format!("relevant key {relevant} is not a candidate")))?;
        let skip = self.excluded_rows(exclude);
        if skip.contains(&target) {
            return Err(Error::Validation(format!("relevant key {relevant} is excluded")));
        }
        let scores = self.scores(query)?;
        let t = scores[target];
        let ahead = (0..self.len())
            .filter(|i| !skip.contains(i))
            .filter(|&i| scores[i] > t || (scores[i] == t && i < target))
            .count();
        Ok(ahead + 1)
    }

    fn excluded_rows(&self, exclude: &[Key]) -> Vec<usize> {
        exclude.iter().filter_map(|k| self.position(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Record;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn store(rows: &[(&str, &str, Vec<f64>)]) -> Store<f64> {
        Store::from_records("m", rows[0].2.len(), rows.iter().map(|(d, c, v)| Record::new(*d, *c, v.clone()))).unwrap()
    }

    #[test]
    fn filter_semantics() {
        let s = store(&[
            ("a", "T", vec![1.0, 0.0]),
            ("a", "T+A", vec![1.0, 1.0]),
            ("b", "T+A", vec![0.0, 1.0]),
            ("c", "T", vec![1.0, 2.0]),
            ("c", "T+A", vec![2.0, 1.0]),
        ]);
        assert_eq!(build_index(&s, |k| k.code == "T+A").unwrap().len(), 3);
        assert!(build_index(&s, |k| k.code == "none").is_err());
    }

    #[test]
    fn mixed_dimension_rejected() {
        let rows = vec![(Key::new("a", "T"), vec![1.0f32, 0.0]), (Key::new("b", "T"), vec![1.0])];
        assert!(matches!(Index::from_rows(rows), Err(Error::Dimension { .. })));
    }

    #[test]
    fn self_query_ranks_first() {
        let s = store(&[("a", "T", vec![0.3, 0.4]), ("b", "T", vec![1.0, 0.0]), ("c", "T", vec![0.0, 1.0])]);
        let idx = build_index(&s, |_| true).unwrap();
        let hits = idx.query_topk(&[0.3, 0.4], 3, &[]).unwrap();
        assert_eq!(hits[0].key, Key::new("a", "T"));
        assert!((hits[0].score - 1.0).abs() < 1e-6);
        let hits = idx.query_topk(&[0.3, 0.4], 3, &[Key::new("a", "T")]).unwrap();
        assert!(hits.iter().all(|h| h.key.doc_id != "a"));
    }

    #[test]
    fn orthogonal_scores_zero() {
        let s =
            store(&[("a", "T", vec![1.0, 0.0, 0.0]), ("b", "T", vec![0.0, 1.0, 0.0]), ("c", "T", vec![0.0, 0.0, 1.0])]);
        let idx = build_index(&s, |_| true).unwrap();
        let hits = idx.query_topk(&[0.0, 1.0, 0.0], 3, &[]).unwrap();
        assert_eq!(hits[0].key.doc_id, "b");
        assert!(hits[1..].iter().all(|h| h.score.abs() < 1e-6));
        assert_eq!(hits[1].key.doc_id, "a");
    }

    #[test]
    fn zero_query_rejected() {
        let s = store(&[("a", "T", vec![1.0, 0.0])]);
        let idx = build_index(&s, |_| true).unwrap();
        assert!(idx.query_topk(&[0.0, 0.0], 1, &[]).is_err());
    }

    #[test]
    fn topk_matches_exhaustive_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rows: Vec<(Key, Vec<f64>)> = (0..20)
                .map(|i| (Key::new(format!("d{i:02}"), "T+A"), (0..6).map(|_| rng.random_range(-1.0..1.0)).collect()))
                .collect();
            let idx = Index::from_rows(rows.clone()).unwrap();
            let q: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut oracle: Vec<(f64, Key)> = rows
                .iter()
                .map(|(k, v)| {
                    let c = crate::scalar::cosine(v, &q).unwrap();
                    (c, k.clone())
                })
                .collect();
            oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let got: Vec<Key> = idx.query_topk(&q, 5, &[]).unwrap().into_iter().map(|h| h.key).collect();
            let want: Vec<Key> = oracle.iter().take(5).map(|o| o.1.clone()).collect();
            assert_eq!(got, want);
            let full: Vec<Key> = idx.query_topk(&q, 100, &[]).unwrap().into_iter().map(|h| h.key).collect();
            for (pos, k) in full.iter().enumerate() {
                assert_eq!(idx.rank_of(&q, k, &[]).unwrap(), pos + 1);
            }
        }
    }

    #[test]
    fn ties_break_by_key() {
        let s = store(&[("b", "T", vec![1.0, 0.0]), ("a", "T", vec![2.0, 0.0]), ("c", "T", vec![0.5, 0.0])]);
        let idx = build_index(&s, |_| true).unwrap();
        let keys: Vec<String> =
            idx.query_topk(&[1.0, 0.0], 3, &[]).unwrap().into_iter().map(|h| h.key.doc_id).collect();
        assert_eq!(keys, ["a", "b", "c"]);
        assert_eq!(idx.rank_of(&[1.0, 0.0], &Key::new("c", "T"), &[]).unwrap(), 3);
    }
}
