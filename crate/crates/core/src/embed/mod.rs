//! Embedding records, stores, providers and normalization.

mod format;
mod hash;
pub mod remote;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturb::CODE_TITLE_ABSTRACT;
use crate::retrieval::Key;
use crate::scalar::{is_finite_vec, norm, Scalar};

pub use format::{
    decode_jsonl, decode_nbrv, encode_jsonl, encode_nbrv, load_store, save_store, StoreFormat, NBRV_MAGIC, NBRV_VERSION,
};
pub use hash::{hash_embed, hash_embed_all, stable_hash, DEFAULT_HASH_DIMENSION, MIN_HASH_DIMENSION};
pub use remote::{remote_embed, resolve_endpoint, RemoteConfig, EMBED_URL_ENV};

/// Floor applied to per-dimension standard deviations.
pub const STD_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record<S> {
    pub doc_id: String,
    pub code: String,
    pub vector: Vec<S>,
}

impl<S: Scalar> Record<S> {
    pub fn new(doc_id: impl Into<String>, code: impl Into<String>, vector: Vec<S>) -> Self {
        Record { doc_id: doc_id.into(), code: code.into(), vector }
    }

    pub fn key(&self) -> Key {
        Key::new(&self.doc_id, &self.code)
    }
}

/// Vectors keyed by `(doc_id, code)`, all of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Store<S> {
    model_name: String,
    dimension: usize,
    records: BTreeMap<Key, Vec<S>>,
}

impl<S: Scalar> Store<S> {
    pub fn new(model_name: impl Into<String>, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Validation("embedding dimension must be at least 1".into()));
        }
        Ok(Store { model_name: model_name.into(), dimension, records: BTreeMap::new() })
    }

    pub fn from_records(
        model_name: impl Into<String>,
        dimension: usize,
        records: impl IntoIterator<Item = Record<S>>,
    ) -> Result<Self> {
        let mut store = Store::new(model_name, dimension)?;
        for r in records {
            store.insert(r)?;
        }
        Ok(store)
    }

    pub fn insert(&mut self, record: Record<S>) -> Result<()> {
        if record.vector.len() != self.dimension {
            return Err(Error::Dimension { expected: self.dimension, actual: record.vector.len() });
        }
        if !is_finite_vec(&record.vector) {
            return Err(Error::Validation(format!("non-finite value in vector ({}, {})", record.doc_id, record.code)));
        }
        let key = record.key();
        if self.records.contains_key(&key) {
            return Err(Error::Validation(format!("duplicate record {key}")));
        }
        self.records.insert(key, record.vector);
        Ok(())
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn set_model_name(&mut self, name: impl Into<String>) {
        self.model_name = name.into();
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &Key) -> Option<&[S]> {
        self.records.get(key).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &Key) -> bool {
        self.records.contains_key(key)
    }

    /// Like [`Store::get`] but a missing key is an error naming it.
    pub fn require(&self, key: &Key) -> Result<&[S]> {
        self.get(key).ok_or_else(|| Error::MissingRecord { doc_id: key.doc_id.clone(), code: key.code.clone() })
    }

    /// Records in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Key, &[S])> {
        self.records.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &Key> {
        self.records.keys()
    }

    pub fn records(&self) -> Vec<Record<S>> {
        self.iter().map(|(k, v)| Record::new(&k.doc_id, &k.code, v.to_vec())).collect()
    }

    pub fn keys_with_code<'a>(&'a self, code: &'a str) -> impl Iterator<Item = &'a Key> + 'a {
        self.records.keys().filter(move |k| k.code == code)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Key) -> bool) -> Store<S> {
        Store {
            model_name: self.model_name.clone(),
            dimension: self.dimension,
            records: self.records.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    pub fn cast<T: Scalar>(&self) -> Store<T> {
        Store {
            model_name: self.model_name.clone(),
            dimension: self.dimension,
            records: self
                .records
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| T::narrow(x.widen())).collect()))
                .collect(),
        }
    }

    /// Merges another store of the same dimension; keys must not collide.
    pub fn extend(&mut self, other: Store<S>) -> Result<()> {
        if other.dimension != self.dimension {
            return Err(Error::Dimension { expected: self.dimension, actual: other.dimension });
        }
        for (k, v) in other.records {
            self.insert(Record::new(k.doc_id, k.code, v))?;
        }
        Ok(())
    }
}

/// Scales a record to unit Euclidean norm.
pub fn l2_normalize<S: Scalar>(record: &Record<S>) -> Result<Record<S>> {
    let n = norm(&record.vector);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector { doc_id: record.doc_id.clone(), code: record.code.clone() });
    }
    Ok(Record::new(&record.doc_id, &record.code, record.vector.iter().map(|x| S::narrow(x.widen() / n)).collect()))
}

pub fn l2_normalize_store<S: Scalar>(store: &Store<S>) -> Result<Store<S>> {
    let mut out = Store::new(store.model_name(), store.dimension())?;
    for (k, v) in store.iter() {
        out.insert(l2_normalize(&Record::new(&k.doc_id, &k.code, v.to_vec()))?)?;
    }
    Ok(out)
}

/// Per-dimension mean and floored population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn reference_moments<S: Scalar>(store: &Store<S>, reference: &[Key]) -> Result<Moments> {
    let mut keys: Vec<&Key> = reference.iter().collect();
    keys.sort();
    keys.dedup();
    if keys.len() < 2 {
        return Err(Error::Validation(format!(
            "standardization needs at least 2 reference vectors, got {}",
            keys.len()
        )));
    }
    let d = store.dimension();
    let n = keys.len() as f64;
    let vectors = keys.iter().map(|k| store.require(k)).collect::<Result<Vec<_>>>()?;
    let mut mean = vec![0.0; d];
    for v in &vectors {
        for (m, x) in mean.iter_mut().zip(v.iter()) {
            *m += x.widen();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for v in &vectors {
        for ((s, x), m) in var.iter_mut().zip(v.iter()).zip(&mean) {
            let dx = x.widen() - m;
            *s += dx * dx;
        }
    }
    let std = var.into_iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
    Ok(Moments { mean, std })
}

/// Z-scores every vector with moments taken over `reference`.
pub fn standardize<S: Scalar>(store: &Store<S>, reference: &[Key]) -> Result<Store<S>> {
    let m = reference_moments(store, reference)?;
    Ok(Store {
        model_name: store.model_name.clone(),
        dimension: store.dimension,
        records: store
            .records
            .iter()
            .map(|(k, v)| {
                let z = v
                    .iter()
                    .zip(m.mean.iter().zip(&m.std))
                    .map(|(x, (mu, sd))| S::narrow((x.widen() - mu) / sd))
                    .collect();
                (k.clone(), z)
            })
            .collect(),
    })
}

/// The default standardization reference: every `T+A` key in the store.
pub fn default_reference<S: Scalar>(store: &Store<S>) -> Vec<Key> {
    store.keys_with_code(CODE_TITLE_ABSTRACT).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    L2,
    Standardize,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::L2 => "l2",
            Normalization::Standardize => "standardize",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Normalization::None),
            "l2" => Ok(Normalization::L2),
            "standardize" | "std" => Ok(Normalization::Standardize),
            other => {
                Err(Error::Validation(format!("unknown normalization {other:?}; expected none, l2 or standardize")))
            }
        }
    }
}

/// Applies `mode`; standardization uses `reference` or, if absent, all `T+A` keys.
pub fn normalize_store<S: Scalar>(
    store: &Store<S>,
    mode: Normalization,
    reference: Option<&[Key]>,
) -> Result<Store<S>> {
    match mode {
        Normalization::None => Ok(store.clone()),
        Normalization::L2 => l2_normalize_store(store),
        Normalization::Standardize => match reference {
            Some(r) => standardize(store, r),
            None => standardize(store, &default_reference(store)),
        },
    }
}
