use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::registry::{Category, NeighborSpec, Orthography, Semantics};
use super::DocumentVariant;
use crate::corpus::Document;
use crate::linguistic::tokenize_words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationStatus {
    Pass,
    BelowThreshold,
    LosslessViolation,
    /// Dissimilar classes carry no preservation bound; reported for context.
    ExpectedDissimilar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub doc_id: String,
    pub code: String,
    pub category: Category,
    pub preserved_words: usize,
    pub original_words: usize,
    pub ratio: f64,
    pub threshold: Option<f64>,
    /// Whether the case-folded word multiset is unchanged (checked for LL).
    pub lossless: Option<bool>,
    pub status: ValidationStatus,
}

fn folded_counts(title: &str, abstract_text: &str) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for w in tokenize_words(title).into_iter().chain(tokenize_words(abstract_text)) {
        *counts.entry(w.to_lowercase()).or_insert(0) += 1;
    }
    counts
}

fn non_whitespace(s: &str) -> impl Iterator<Item = char> + '_ {
    s.chars().filter(|c| !c.is_whitespace())
}

/// Word-preservation check of a variant against its category's bounds.
///
/// The ratio is the size of the multiset intersection of case-folded word
/// tokens over the original's word count, title and abstract combined.
pub fn validate_category(original: &Document, variant: &DocumentVariant, spec: &NeighborSpec) -> ValidationReport {
    let before = folded_counts(&original.title, &original.abstract_text);
    let after = folded_counts(&variant.title, &variant.abstract_text);
    let original_words: usize = before.values().sum();
    let preserved_words: usize = before.iter().map(|(w, &n)| n.min(after.get(w).copied().unwrap_or(0))).sum();
    let ratio = if original_words == 0 { 1.0 } else { preserved_words as f64 / original_words as f64 };
    let threshold = spec.semantics.min_preservation();

    let lossless = (spec.orthography == Orthography::LL).then(|| {
        let same_words = before == after;
        if spec.code == "T_A_WS" {
            same_words
                && non_whitespace(&original.title).eq(non_whitespace(&variant.title))
                && non_whitespace(&original.abstract_text).eq(non_whitespace(&variant.abstract_text))
        } else {
            same_words
        }
    });

    let status = if lossless == Some(false) {
        ValidationStatus::LosslessViolation
    } else if spec.semantics == Semantics::DS {
        ValidationStatus::ExpectedDissimilar
    } else if threshold.is_some_and(|t| ratio < t) {
        ValidationStatus::BelowThreshold
    } else {
        ValidationStatus::Pass
    };

    ValidationReport {
        doc_id: variant.doc_id.clone(),
        code: variant.code.clone(),
        category: spec.category(),
        preserved_words,
        original_words,
        ratio,
        threshold,
        lossless,
        status,
    }
}
