//! Exact cosine search and evaluation task setups.

mod index;
mod tasks;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use index::{build_index, Hit, Index};
pub use tasks::{
    build_aop, build_nn_ret, build_task1, build_task2, rank_queries, ranked_dump, sample_documents, AopPair, AopSetup,
    Query, TaskId, TaskSetup, DEFAULT_AOP_SAMPLE, DEFAULT_TASK_SAMPLE,
};

/// Record identity `(doc_id, code)`, ordered by doc id then code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub doc_id: String,
    pub code: String,
}

impl Key {
    pub fn new(doc_id: impl Into<String>, code: impl Into<String>) -> Self {
        Key { doc_id: doc_id.into(), code: code.into() }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.doc_id, self.code)
    }
}
