//! Client for the `/embed` wire protocol.

use std::collections::HashMap;
use std::thread;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Record, Store};
use crate::error::{Error, Result};
use crate::perturb::DocumentVariant;

pub const EMBED_URL_ENV: &str = "NBR_EMBED_URL";
pub const DEFAULT_BATCH_SIZE: usize = 32;

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    pub batch_size: usize,
    pub parallelism: usize,
    pub max_attempts: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            model: model.into(),
            batch_size: DEFAULT_BATCH_SIZE,
            parallelism: 4,
            max_attempts: 3,
            backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(120),
        }
    }
}

/// The flag value if given, else `NBR_EMBED_URL`.
pub fn resolve_endpoint(flag: Option<&str>) -> Result<String> {
    if let Some(f) = flag.filter(|f| !f.is_empty()) {
        return Ok(f.to_string());
    }
    match std::env::var(EMBED_URL_ENV) {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::Validation(format!("remote provider needs --embed-url or {EMBED_URL_ENV}"))),
    }
}

#[derive(Serialize)]
struct Input<'a> {
    id: &'a str,
    code: &'a str,
    title: &'a str,
    #[serde(rename = "abstract")]
    abstract_text: &'a str,
}

#[derive(Serialize)]
struct Request<'a> {
    model: &'a str,
    inputs: Vec<Input<'a>>,
}

#[derive(Deserialize)]
struct OutVector {
    id: String,
    code: String,
    vector: Vec<f32>,
}

#[derive(Deserialize)]
struct Response {
    model: String,
    dim: usize,
    vectors: Vec<OutVector>,
}

struct BatchResult {
    model: String,
    dim: usize,
    records: Vec<Record<f32>>,
}

fn batch_label(index: usize, batch: &[DocumentVariant]) -> String {
    let ids: Vec<String> = batch.iter().map(|v| format!("{}/{}", v.doc_id, v.code)).collect();
    format!("#{index} [{}]", ids.join(", "))
}

enum Attempt {
    Transient(String),
    Fatal(Error),
}

fn send_once(agent: &ureq::Agent, url: &str, body: &Request<'_>) -> std::result::Result<Response, Attempt> {
    let mut resp = agent.post(url).send_json(body).map_err(|e| Attempt::Transient(e.to_string()))?;
    let status = resp.status().as_u16();
    if status >= 500 {
        return Err(Attempt::Transient(format!("HTTP {status}")));
    }
    if status != 200 {
        let text = resp.body_mut().read_to_string().unwrap_or_default();
        return Err(Attempt::Fatal(Error::Protocol(format!("HTTP {status} from {url}: {text}"))));
    }
    resp.body_mut()
        .read_json::<Response>()
        .map_err(|e| Attempt::Fatal(Error::Protocol(format!("malformed response from {url}: {e}"))))
}

fn embed_batch(
    agent: &ureq::Agent,
    config: &RemoteConfig,
    index: usize,
    batch: &[DocumentVariant],
) -> Result<BatchResult> {
    let url = format!("{}/embed", config.endpoint);
    let request = Request {
        model: &config.model,
        inputs: batch
            .iter()
            .map(|v| Input { id: &v.doc_id, code: &v.code, title: &v.title, abstract_text: &v.abstract_text })
            .collect(),
    };
    let attempts = config.max_attempts.max(1);
    let mut last = String::new();
    let mut response = None;
    for attempt in 0..attempts {
        match send_once(agent, &url, &request) {
            Ok(r) => {
                response = Some(r);
                break;
            }
            Err(Attempt::Fatal(e)) => return Err(e),
            Err(Attempt::Transient(msg)) => {
                last = msg;
                if attempt + 1 < attempts {
                    thread::sleep(config.backoff * 2u32.pow(attempt));
                }
            }
        }
    }
    let Some(response) = response else {
        return Err(Error::Transport {
            endpoint: config.endpoint.clone(),
            batch: batch_label(index, batch),
            message: format!("{last} after {attempts} attempts"),
        });
    };

    let mut by_key: HashMap<(String, String), Vec<f32>> = HashMap::with_capacity(response.vectors.len());
    for v in response.vectors {
        if v.vector.len() != response.dim {
            return Err(Error::Protocol(format!(
                "vector for ({}, {}) has length {} but server declared dim {}",
                v.id,
                v.code,
                v.vector.len(),
                response.dim
            )));
        }
        if by_key.insert((v.id.clone(), v.code.clone()), v.vector).is_some() {
            return Err(Error::Protocol(format!("duplicate vector for ({}, {})", v.id, v.code)));
        }
    }
    let mut records = Vec::with_capacity(batch.len());
    for v in batch {
        let vector = by_key
            .remove(&(v.doc_id.clone(), v.code.clone()))
            .ok_or_else(|| Error::Protocol(format!("response is missing id ({}, {})", v.doc_id, v.code)))?;
        records.push(Record::new(&v.doc_id, &v.code, vector));
    }
    if let Some(((id, code), _)) = by_key.into_iter().next() {
        return Err(Error::Protocol(format!("response has unrequested id ({id}, {code})")));
    }
    Ok(BatchResult { model: response.model, dim: response.dim, records })
}

/// Embeds `variants` through the remote service, batching and retrying.
pub fn remote_embed(variants: &[DocumentVariant], config: &RemoteConfig) -> Result<Store<f32>> {
    if variants.is_empty() {
        return Err(Error::Validation("no variants to embed".into()));
    }
    let agent: ureq::Agent =
        ureq::Agent::config_builder().http_status_as_error(false).timeout_global(Some(config.timeout)).build().into();
    let batches: Vec<&[DocumentVariant]> = variants.chunks(config.batch_size.clamp(1, DEFAULT_BATCH_SIZE)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let results: Vec<Result<BatchResult>> =
        pool.install(|| batches.par_iter().enumerate().map(|(i, b)| embed_batch(&agent, config, i, b)).collect());

    let mut store: Option<Store<f32>> = None;
    for r in results {
        let batch = r?;
        let s = match &mut store {
            Some(s) => s,
            None => store.insert(
                Store::new(batch.model.clone(), batch.dim)
                    .map_err(|_| Error::Protocol(format!("server declared invalid dim {}", batch.dim)))?,
            ),
        };
        if batch.dim != s.dimension() {
            return Err(Error::Protocol(format!("server declared dim {} then {}", s.dimension(), batch.dim)));
        }
        for rec in batch.records {
            s.insert(rec)?;
        }
    }
    Ok(store.expect("at least one batch"))
}
