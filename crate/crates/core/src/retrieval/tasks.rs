use std::collections::HashSet;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Index, Key};
use crate::corpus::Corpus;
use crate::embed::Store;
use crate::error::{Error, Result};
use crate::metrics::RankOutcome;
use crate::perturb::{sampling_rng, CODE_TITLE, CODE_TITLE_ABSTRACT};
use crate::scalar::Scalar;

pub const DEFAULT_TASK_SAMPLE: usize = 1000;
pub const DEFAULT_AOP_SAMPLE: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    Task1,
    Task2,
    NnRet,
    Aop,
}

impl TaskId {
    pub const ALL: [TaskId; 4] = [TaskId::Task1, TaskId::Task2, TaskId::NnRet, TaskId::Aop];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::Task1 => "task1",
            TaskId::Task2 => "task2",
            TaskId::NnRet => "nn_ret",
            TaskId::Aop => "aop",
        }
    }
}

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("nnret") && *t == TaskId::NnRet))
            .ok_or_else(|| Error::Validation(format!("unknown task {s:?}; expected task1, task2, nn_ret or aop")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub key: Key,
    pub relevant: Key,
    /// Candidate keys removed for this query only.
    pub exclude: Vec<Key>,
}

/// Queries against a shared candidate pool, with per-query exclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSetup {
    pub task: TaskId,
    pub candidates: Vec<Key>,
    pub queries: Vec<Query>,
}

impl TaskSetup {
    pub fn candidates_for(&self, query: &Query) -> Vec<&Key> {
        self.candidates.iter().filter(|k| !query.exclude.contains(k)).collect()
    }

    pub fn candidate_count(&self, query: &Query) -> usize {
        self.candidates.len() - query.exclude.iter().filter(|k| self.candidates.binary_search(k).is_ok()).count()
    }

    /// Queries grouped by their key's code, in first-seen order.
    pub fn by_code(&self) -> Vec<(String, Vec<&Query>)> {
        let mut out: Vec<(String, Vec<&Query>)> = Vec::new();
        for q in &self.queries {
            match out.iter_mut().find(|(c, _)| *c == q.key.code) {
                Some((_, v)) => v.push(q),
                None => out.push((q.key.code.clone(), vec![q])),
            }
        }
        out
    }
}

/// Seeded uniform sample of `min(sample_size, |corpus|)` documents, in corpus order.
pub fn sample_documents<'a>(corpus: &'a Corpus, sample_size: usize, seed: u64, purpose: &str) -> Vec<&'a str> {
    let n = corpus.len();
    let m = sample_size.min(n);
    let mut picks =
        if m == n { (0..n).collect() } else { index::sample(&mut sampling_rng(seed, purpose), n, m).into_vec() };
    picks.sort_unstable();
    picks.into_iter().map(|i| corpus.documents[i].id.as_str()).collect()
}

fn require<S: Scalar>(store: &Store<S>, key: Key) -> Result<Key> {
    store.require(&key)?;
    Ok(key)
}

fn all_with_code<S: Scalar>(corpus: &Corpus, store: &Store<S>, code: &str) -> Result<Vec<Key>> {
    corpus.documents.iter().map(|d| require(store, Key::new(&d.id, code))).collect()
}

fn sorted(mut keys: Vec<Key>) -> Vec<Key> {
    keys.sort();
    keys
}

pub fn build_task1<S: Scalar>(corpus: &Corpus, store: &Store<S>, sample_size: usize, seed: u64) -> Result<TaskSetup> {
    let candidates = sorted(all_with_code(corpus, store, CODE_TITLE_ABSTRACT)?);
    let queries = sample_documents(corpus, sample_size, seed, "queries")
        .into_iter()
        .map(|id| {
            Ok(Query {
                key: require(store, Key::new(id, CODE_TITLE))?,
                relevant: Key::new(id, CODE_TITLE_ABSTRACT),
                exclude: Vec::new(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(TaskSetup { task: TaskId::Task1, candidates, queries })
}

/// As Task I, with every other document's title added to the candidates.
pub fn build_task2<S: Scalar>(corpus: &Corpus, store: &Store<S>, sample_size: usize, seed: u64) -> Result<TaskSetup> {
    let mut candidates = all_with_code(corpus, store, CODE_TITLE_ABSTRACT)?;
    candidates.extend(all_with_code(corpus, store, CODE_TITLE)?);
    let candidates = sorted(candidates);
    let queries = sample_documents(corpus, sample_size, seed, "queries")
        .into_iter()
        .map(|id| {
            let key = Key::new(id, CODE_TITLE);
            Query { exclude: vec![key.clone()], key, relevant: Key::new(id, CODE_TITLE_ABSTRACT) }
        })
        .collect();
    Ok(TaskSetup { task: TaskId::Task2, candidates, queries })
}

/// Every `(doc, code)` variant queried against all originals.
pub fn build_nn_ret<S: Scalar>(corpus: &Corpus, store: &Store<S>, codes: &[&str]) -> Result<TaskSetup> {
    let candidates = sorted(all_with_code(corpus, store, CODE_TITLE_ABSTRACT)?);
    let mut queries = Vec::with_capacity(codes.len() * corpus.len());
    for code in codes {
        for d in &corpus.documents {
            queries.push(Query {
                key: require(store, Key::new(&d.id, *code))?,
                relevant: Key::new(&d.id, CODE_TITLE_ABSTRACT),
                exclude: Vec::new(),
            });
        }
    }
    Ok(TaskSetup { task: TaskId::NnRet, candidates, queries })
}

/// Ranks every query's relevant key over its full candidate ordering.
pub fn rank_queries<S: Scalar>(setup: &TaskSetup, store: &Store<S>) -> Result<Vec<RankOutcome>> {
    let rows =
        setup.candidates.iter().map(|k| Ok((k.clone(), store.require(k)?.to_vec()))).collect::<Result<Vec<_>>>()?;
    let index = Index::from_rows(rows)?;
    setup
        .queries
        .par_iter()
        .map(|q| {
            let v = store.require(&q.key)?;
            let rank = index.rank_of(v, &q.relevant, &q.exclude)?;
            Ok(RankOutcome::new(q.key.clone(), Some(rank)))
        })
        .collect()
}

#[derive(Serialize)]
struct DumpLine<'a> {
    query: &'a Key,
    ranked: Vec<(&'a Key, f64)>,
}

/// JSONL of the top-`depth` list for each query.
pub fn ranked_dump<S: Scalar>(setup: &TaskSetup, store: &Store<S>, depth: usize) -> Result<String> {
    let rows =
        setup.candidates.iter().map(|k| Ok((k.clone(), store.require(k)?.to_vec()))).collect::<Result<Vec<_>>>()?;
    let index = Index::from_rows(rows)?;
    let lines: Vec<String> = setup
        .queries
        .par_iter()
        .map(|q| {
            let hits = index.query_topk(store.require(&q.key)?, depth.max(1), &q.exclude)?;
            let pos: Vec<usize> = hits.iter().map(|h| index.position(&h.key).unwrap()).collect();
            let line = DumpLine {
                query: &q.key,
                ranked: pos.iter().zip(&hits).map(|(&i, h)| (&index.keys()[i], h.score)).collect(),
            };
            Ok(serde_json::to_string(&line)?)
        })
        .collect::<Result<_>>()?;
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AopPair {
    pub doc_id: String,
    pub variant_nn: Vec<Key>,
    pub original_nn: Vec<Key>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AopSetup {
    pub code: String,
    pub k: usize,
    pub candidate_count: usize,
    pub pairs: Vec<AopPair>,
}

/// k-NN lists of each sampled document's variant and original over the
/// pool of all variants and originals. Both of the document's own keys are
/// excluded from both lists.
pub fn build_aop<S: Scalar>(
    corpus: &Corpus,
    store: &Store<S>,
    code: &str,
    sample_size: usize,
    k: usize,
    seed: u64,
) -> Result<AopSetup> {
    if k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    if code == CODE_TITLE_ABSTRACT {
        return Err(Error::Validation("AOP needs a neighbor code other than T+A".into()));
    }
    let ids: HashSet<&str> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
    let rows: Vec<(Key, Vec<S>)> = store
        .iter()
        .filter(|(key, _)| (key.code == code || key.code == CODE_TITLE_ABSTRACT) && ids.contains(key.doc_id.as_str()))
        .map(|(key, v)| (key.clone(), v.to_vec()))
        .collect();
    let sample = sample_documents(corpus, sample_size, seed, "aop");
    for id in &sample {
        store.require(&Key::new(*id, code))?;
        store.require(&Key::new(*id, CODE_TITLE_ABSTRACT))?;
    }
    if rows.len() < k + 2 {
        return Err(Error::Validation(format!("AOP-{k} needs at least {} candidates, found {}", k + 2, rows.len())));
    }
    let index = Index::from_rows(rows)?;
    let pairs = sample
        .par_iter()
        .map(|id| {
            let vk = Key::new(*id, code);
            let ok = Key::new(*id, CODE_TITLE_ABSTRACT);
            let exclude = [vk.clone(), ok.clone()];
            let nn = |key: &Key| -> Result<Vec<Key>> {
                Ok(index.query_topk(store.require(key)?, k, &exclude)?.into_iter().map(|h| h.key).collect())
            };
            Ok(AopPair { doc_id: id.to_string(), variant_nn: nn(&vk)?, original_nn: nn(&ok)? })
        })
        .collect::<Result<_>>()?;
    Ok(AopSetup { code: code.to_string(), k, candidate_count: index.len(), pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::embed::Record;

    fn corpus(n: usize) -> Corpus {
        Corpus::from_documents(
            "c",
            (0..n).map(|i| Document::new(format!("d{i}"), format!("Title {i}"), "Abstract.")).collect(),
        )
        .unwrap()
    }

    fn store(c: &Corpus, codes: &[&str]) -> Store<f64> {
        let mut s = Store::new("m", 4).unwrap();
        for (i, d) in c.documents.iter().enumerate() {
            for (j, code) in codes.iter().enumerate() {
                let v = vec![1.0 + i as f64, (j + 1) as f64, (i * j) as f64 * 0.1, 0.5];
                s.insert(Record::new(&d.id, *code, v)).unwrap();
            }
        }
        s
    }

    #[test]
    fn task1_shape() {
        let c = corpus(3);
        let s = store(&c, &["T", "T+A"]);
        let t = build_task1(&c, &s, 1000, 7).unwrap();
        assert_eq!(t.queries.len(), 3);
        assert!(t.queries.iter().all(|q| t.candidate_count(q) == 3));
        assert_eq!(t.queries[0].relevant, Key::new(&t.queries[0].key.doc_id, "T+A"));
        assert_eq!(t, build_task1(&c, &s, 1000, 7).unwrap());
    }

    #[test]
    fn task2_shape() {
        let c = corpus(3);
        let s = store(&c, &["T", "T+A"]);
        let t = build_task2(&c, &s, 1000, 7).unwrap();
        for q in &t.queries {
            assert_eq!(t.candidate_count(q), 5);
            assert!(!t.candidates_for(q).contains(&&q.key));
            assert_eq!(q.relevant.code, "T+A");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let c = corpus(50);
        let a = sample_documents(&c, 10, 3, "queries");
        assert_eq!(a, sample_documents(&c, 10, 3, "queries"));
        assert_ne!(a, sample_documents(&c, 10, 4, "queries"));
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn nn_ret_shape() {
        let c = corpus(3);
        let s = store(&c, &["T+A", "T_ARot", "TDelNN"]);
        let t = build_nn_ret(&c, &s, &["T_ARot", "TDelNN"]).unwrap();
        assert_eq!(t.queries.len(), 6);
        assert_eq!(t.candidates.len(), 3);
        let groups = t.by_code();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "T_ARot");
        assert!(build_nn_ret(&c, &s, &["T_ASortAsc"]).is_err());
    }

    #[test]
    fn missing_record_is_named() {
        let c = corpus(2);
        let s = store(&c, &["T+A"]);
        let err = build_task1(&c, &s, 10, 1).unwrap_err();
        assert!(matches!(err, Error::MissingRecord { ref code, .. } if code == "T"));
    }

    #[test]
    fn aop_lists_have_k_entries() {
        let k = 4;
        let c = corpus(k + 1);
        let s = store(&c, &["T+A", "T_ARot"]);
        let a = build_aop(&c, &s, "T_ARot", 2000, k, 1).unwrap();
        assert_eq!(a.pairs.len(), k + 1);
        for p in &a.pairs {
            assert_eq!(p.variant_nn.len(), k);
            assert_eq!(p.original_nn.len(), k);
            assert!(p.variant_nn.iter().chain(&p.original_nn).all(|key| key.doc_id != p.doc_id));
        }
    }

    #[test]
    fn aop_identical_vectors_full_overlap() {
        let c = corpus(6);
        let mut s = Store::new("m", 3).unwrap();
        for (i, d) in c.documents.iter().enumerate() {
            let v = vec![1.0, i as f64, (i * i) as f64];
            s.insert(Record::new(&d.id, "T+A", v.clone())).unwrap();
            s.insert(Record::new(&d.id, "T_ADelQ1", v)).unwrap();
        }
        let a = build_aop(&c, &s, "T_ADelQ1", 10, 3, 1).unwrap();
        for p in &a.pairs {
            assert_eq!(p.variant_nn, p.original_nn);
        }
    }

    #[test]
    fn ranks_over_full_ordering() {
        let c = corpus(4);
        let s = store(&c, &["T", "T+A"]);
        let t = build_task1(&c, &s, 10, 1).unwrap();
        let r = rank_queries(&t, &s).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|o| o.rank.is_some_and(|x| (1..=4).contains(&x))));
        let dump = ranked_dump(&t, &s, 2).unwrap();
        assert_eq!(dump.lines().count(), 4);
        assert!(dump.starts_with(r#"{"query":{"doc_id":"d0","code":"T"},"ranked":[[{"doc_id":"#));
    }
}
