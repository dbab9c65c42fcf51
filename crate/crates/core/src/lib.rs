//! Textual-neighbor generation and alternative-self retrieval evaluation.
//!
//! The pipeline runs corpus → linguistic analysis → neighbor variants →
//! embeddings → task setups → metrics → report. Each stage lives in its own
//! module; the vector math is generic over [`Scalar`] so the same code paths
//! serve `f32` stores and `f64` analysis.

pub mod config;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod linguistic;
pub mod metrics;
pub mod perturb;
pub mod pipeline;
pub mod report;
pub mod retrieval;
pub mod scalar;

mod fsutil;

pub use error::{Error, Result};
pub use fsutil::write_atomic;
pub use scalar::Scalar;

pub use corpus::{Corpus, Document};
pub use linguistic::{TagClass, TaggedText, TaggedToken};
pub use perturb::{Category, DocumentVariant, NeighborSpec, Orthography, Semantics};
pub use retrieval::Key;

/// Embedding record with the storage precision used on disk.
pub type EmbeddingRecord = embed::Record<f32>;
/// Embedding store with the storage precision used on disk.
pub type EmbeddingStore = embed::Store<f32>;
/// Double-precision store, used for analysis on standardized vectors.
pub type EmbeddingStoreF64 = embed::Store<f64>;
/// Exact cosine index over `f32` vectors.
pub type VectorIndex = retrieval::Index<f32>;
/// Exact cosine index over `f64` vectors.
pub type VectorIndexF64 = retrieval::Index<f64>;
