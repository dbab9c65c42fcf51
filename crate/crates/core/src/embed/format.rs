//! On-disk store formats.
//!
//! NBRV layout (all integers little-endian):
//!
//! ```text
//! "NBRV" | u32 version=1 | u32 dim | u32 count
//! count × ( u16 len | doc_id | u16 len | code | dim × f32 )
//! [ u16 len | model name ]
//! ```
//!
//! The trailing model name is optional; readers that stop after `count`
//! records ignore it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Record, Store};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::scalar::Scalar;

pub const NBRV_MAGIC: [u8; 4] = *b"NBRV";
pub const NBRV_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreFormat {
    Nbrv,
    Jsonl,
}

impl StoreFormat {
    /// `.jsonl` selects JSONL; everything else is NBRV.
    pub fn from_path(path: &Path) -> StoreFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("jsonl") => StoreFormat::Jsonl,
            _ => StoreFormat::Nbrv,
        }
    }
}

fn push_str(out: &mut Vec<u8>, s: &str, what: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| Error::Format(format!("{what} longer than 65535 bytes: {s:?}")))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

/// Serializes to NBRV; vectors are narrowed to `f32`.
pub fn encode_nbrv<S: Scalar>(store: &Store<S>) -> Result<Vec<u8>> {
    let count = u32::try_from(store.len()).map_err(|_| Error::Format("too many records".into()))?;
    let dim = u32::try_from(store.dimension()).map_err(|_| Error::Format("dimension too large".into()))?;
    let mut out = Vec::with_capacity(16 + store.len() * (store.dimension() * 4 + 16));
    out.extend_from_slice(&NBRV_MAGIC);
    out.extend_from_slice(&NBRV_VERSION.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    for (k, v) in store.iter() {
        push_str(&mut out, &k.doc_id, "doc_id")?;
        push_str(&mut out, &k.code, "code")?;
        for x in v {
            out.extend_from_slice(&(x.widen() as f32).to_le_bytes());
        }
    }
    push_str(&mut out, store.model_name(), "model name")?;
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Format(format!("truncated NBRV file while reading {what} at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let n = self.u16(what)? as usize;
        let raw = self.take(n, what)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Format(format!("{what} is not valid UTF-8")))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn decode_nbrv(bytes: &[u8]) -> Result<Store<f32>> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != NBRV_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:02X?}, expected NBRV")));
    }
    let version = r.u32("version")?;
    if version != NBRV_VERSION {
        return Err(Error::Format(format!("unsupported NBRV version {version}")));
    }
    let dim = r.u32("dimension")? as usize;
    let count = r.u32("record count")? as usize;
    if dim == 0 {
        return Err(Error::Format("NBRV dimension is 0".into()));
    }
    let mut records = Vec::with_capacity(count.min(1 << 20));
    for i in 0..count {
        let doc_id = r.string("doc_id")?;
        let code = r.string("code")?;
        let raw = r.take(dim * 4, &format!("vector of record {i}"))?;
        let vector = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        records.push(Record::new(doc_id, code, vector));
    }
    let model = if r.remaining() == 0 { String::new() } else { r.string("model name")? };
    if r.remaining() != 0 {
        return Err(Error::Format(format!("{} unexpected trailing bytes", r.remaining())));
    }
    Store::from_records(model, dim, records).map_err(|e| match e {
        Error::Validation(m) => Error::Format(m),
        other => other,
    })
}

#[derive(Serialize, Deserialize)]
struct JsonRecord<S> {
    doc_id: String,
    code: String,
    vector: Vec<S>,
}

pub fn encode_jsonl<S: Scalar + Serialize>(store: &Store<S>) -> Result<String> {
    let mut out = String::new();
    for (k, v) in store.iter() {
        let line =
            serde_json::to_string(&JsonRecord { doc_id: k.doc_id.clone(), code: k.code.clone(), vector: v.to_vec() })?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Parses JSONL records; the dimension is taken from the first record.
pub fn decode_jsonl(text: &str, model_name: &str, source_label: &str) -> Result<Store<f32>> {
    let mut store: Option<Store<f32>> = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord<f32> = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: source_label.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let s = match &mut store {
            Some(s) => s,
            None => store.insert(Store::new(model_name, rec.vector.len())?),
        };
        s.insert(Record::new(rec.doc_id, rec.code, rec.vector))?;
    }
    store.ok_or_else(|| Error::Format(format!("{source_label}: JSONL store has no records")))
}

pub fn save_store<S: Scalar + Serialize>(store: &Store<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match StoreFormat::from_path(path) {
        StoreFormat::Nbrv => encode_nbrv(store)?,
        StoreFormat::Jsonl => encode_jsonl(store)?.into_bytes(),
    };
    write_atomic(path, &bytes)
}

/// Loads either format: NBRV by magic, JSONL by extension.
pub fn load_store(path: impl AsRef<Path>) -> Result<Store<f32>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(&NBRV_MAGIC) || StoreFormat::from_path(path) == StoreFormat::Nbrv {
        return decode_nbrv(&bytes).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        });
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::Format(format!("{}: not UTF-8", path.display())))?;
    let model = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    decode_jsonl(&text, model, &path.display().to_string())
}
