//! Run configuration shared by the CLI and the report metadata.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embed::{Normalization, DEFAULT_HASH_DIMENSION};
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_PAIR_CAP;
use crate::retrieval::{TaskId, DEFAULT_AOP_SAMPLE, DEFAULT_TASK_SAMPLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    #[default]
    Hash,
    File,
    Remote,
}

impl Provider {
    pub fn as_str(self) -> &'static str {
        match self {
            Provider::Hash => "hash",
            Provider::File => "file",
            Provider::Remote => "remote",
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hash" => Ok(Provider::Hash),
            "file" => Ok(Provider::File),
            "remote" => Ok(Provider::Remote),
            other => Err(Error::Validation(format!("unknown provider {other:?}; expected hash, file or remote"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<String>,
    pub dataset: Option<String>,
    pub codes: String,
    pub seed: u64,
    pub provider: Provider,
    pub model: Option<String>,
    pub hash_dimension: usize,
    pub store: Option<String>,
    pub embed_url: Option<String>,
    pub tags: Option<String>,
    pub tagger: Option<String>,
    pub antonyms: Option<String>,
    pub normalization: Normalization,
    pub tasks: Vec<TaskId>,
    pub task_sample: usize,
    pub aop_sample: usize,
    pub nn_k: Vec<usize>,
    pub aop_k: Vec<usize>,
    pub pair_cap: usize,
    pub output_dir: Option<String>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            dataset: None,
            codes: "all".into(),
            seed: 0,
            provider: Provider::Hash,
            model: None,
            hash_dimension: DEFAULT_HASH_DIMENSION,
            store: None,
            embed_url: None,
            tags: None,
            tagger: None,
            antonyms: None,
            normalization: Normalization::None,
            tasks: TaskId::ALL.to_vec(),
            task_sample: DEFAULT_TASK_SAMPLE,
            aop_sample: DEFAULT_AOP_SAMPLE,
            nn_k: vec![1, 10],
            aop_k: vec![10, 20],
            pair_cap: DEFAULT_PAIR_CAP,
            output_dir: None,
            threads: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file, or the config embedded in a report file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = crate::fsutil::read_to_string(path)?;
        let parse_err = |e: serde_json::Error| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        };
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
        if let Some(embedded) = value.pointer_mut("/metadata/config") {
            value = embedded.take();
        }
        serde_json::from_value(value).map_err(parse_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Model label: the explicit name, else one derived from the provider.
    pub fn model_name(&self) -> String {
        match (&self.model, self.provider) {
            (Some(m), _) => m.clone(),
            (None, Provider::Hash) => format!("hash-{}", self.hash_dimension),
            (None, Provider::File) => self
                .store
                .as_deref()
                .and_then(|s| Path::new(s).file_stem())
                .and_then(|s| s.to_str())
                .unwrap_or("file")
                .to_string(),
            (None, Provider::Remote) => "remote".into(),
        }
    }

    pub fn dataset_name(&self) -> String {
        if let Some(d) = &self.dataset {
            return d.clone();
        }
        self.corpus
            .as_deref()
            .and_then(|c| Path::new(c).file_stem())
            .and_then(|s| s.to_str())
            .unwrap_or("corpus")
            .to_string()
    }

    /// Hex SHA-256 of the canonical JSON of every result-affecting field.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.threads = None;
        c.embed_url = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nn_k.is_empty() || self.nn_k.contains(&0) || self.aop_k.is_empty() || self.aop_k.contains(&0) {
            return Err(Error::Validation("k values must be non-empty and at least 1".into()));
        }
        if self.task_sample == 0 || self.aop_sample == 0 {
            return Err(Error::Validation("sample sizes must be at least 1".into()));
        }
        if self.pair_cap == 0 {
            return Err(Error::Validation("pair cap must be at least 1".into()));
        }
        crate::perturb::expand_codes(&self.codes)?;
        Ok(())
    }
}
