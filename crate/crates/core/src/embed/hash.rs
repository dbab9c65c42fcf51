use std::hash::Hasher;

use fnv::FnvHasher;
use rayon::prelude::*;

use super::{Record, Store};
use crate::error::{Error, Result};
use crate::perturb::DocumentVariant;

pub const DEFAULT_HASH_DIMENSION: usize = 64;
pub const MIN_HASH_DIMENSION: usize = 8;

/// FNV-1a 64 of the UTF-8 bytes; identical on every platform.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_ws = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            out.push(c);
            in_ws = false;
        }
    }
    out
}

/// Character 3-gram count vector, L2-normalized.
pub fn hash_embed(variant: &DocumentVariant, dimension: usize) -> Result<Record<f32>> {
    if dimension < MIN_HASH_DIMENSION {
        return Err(Error::Validation(format!(
            "hash embedding dimension must be at least {MIN_HASH_DIMENSION}, got {dimension}"
        )));
    }
    let text = collapse_whitespace(&variant.joined().to_lowercase());
    let chars: Vec<char> = text.chars().collect();
    let mut counts = vec![0.0f64; dimension];
    let mut buf = String::new();
    for w in chars.windows(3) {
        buf.clear();
        buf.extend(w);
        counts[(stable_hash(buf.as_bytes()) % dimension as u64) as usize] += 1.0;
    }
    let n = counts.iter().map(|x| x * x).sum::<f64>().sqrt();
    let vector = if n == 0.0 {
        let mut v = vec![0.0f32; dimension];
        v[0] = 1.0;
        v
    } else {
        counts.iter().map(|x| (x / n) as f32).collect()
    };
    Ok(Record::new(&variant.doc_id, &variant.code, vector))
}

/// Embeds every variant in parallel into one store.
pub fn hash_embed_all(variants: &[DocumentVariant], dimension: usize) -> Result<Store<f32>> {
    let records = variants.par_iter().map(|v| hash_embed(v, dimension)).collect::<Result<Vec<_>>>()?;
    Store::from_records(format!("hash-{dimension}"), dimension, records)
}
