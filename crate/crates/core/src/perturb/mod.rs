//! Textual-neighbor generation.
//!
//! [`REGISTRY`] holds the 32 neighbor classes. [`apply_neighbor`] turns an
//! analyzed document plus a code into a [`DocumentVariant`]; every random
//! choice is drawn from the stream of [`SeedContext`]`(global_seed, doc id,
//! code)`, so output never depends on processing order.

mod ops;
mod registry;
mod seed;
mod validate;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ops::{
    add_noun, delete_by_tag, delete_chars_from_nouns, delete_noun_phrases, delete_quantile, delete_random_words,
    keep_only_nouns, noun_char_deletions, perturb_whitespace, quantile_bounds, random_deletion_count,
    reorder_sentences, replace_adjectives_with_antonyms, uppercase_by_tag, NounSource, PhraseMode, ReorderMode,
    MAX_APPENDED_NOUNS, RANDOM_DELETION_FRACTION, WHITESPACE_FRACTION, WHITESPACE_RUN,
};
pub use registry::{
    all_codes, category_of, codes_in, expand_codes, export_registry, lookup, registry, Category, FieldTransform,
    NeighborSpec, Orthography, RegistryEntry, Semantics, CODE_TITLE, CODE_TITLE_ABSTRACT, REGISTRY,
};
pub use seed::{sampling_rng, SeedContext};
pub use validate::{validate_category, ValidationReport, ValidationStatus};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::linguistic::{analyze, AntonymLexicon, LexiconTagger, PreTagged, TaggedText};

/// Separator placed between title and abstract whenever the two fields are
/// joined into one string.
pub const FIELD_SEPARATOR: &str = ". ";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DocumentVariant {
    pub doc_id: String,
    pub code: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

impl DocumentVariant {
    /// Title and abstract joined with [`FIELD_SEPARATOR`].
    pub fn joined(&self) -> String {
        join_fields(&self.title, &self.abstract_text)
    }
}

pub fn join_fields(title: &str, abstract_text: &str) -> String {
    format!("{title}{FIELD_SEPARATOR}{abstract_text}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedDocument {
    pub doc: Document,
    pub title: TaggedText,
    pub abstract_text: TaggedText,
}

/// Produces tagged fields for a document.
pub trait Annotator: Send + Sync {
    fn annotate(&self, doc: &Document) -> Result<AnalyzedDocument>;
}

impl Annotator for LexiconTagger {
    fn annotate(&self, doc: &Document) -> Result<AnalyzedDocument> {
        Ok(AnalyzedDocument {
            doc: doc.clone(),
            title: analyze(&doc.title, self),
            abstract_text: analyze(&doc.abstract_text, self),
        })
    }
}

impl Annotator for PreTagged {
    /// Supplied tags when the id is known, otherwise tokenization plus the
    /// pass-through tagger.
    fn annotate(&self, doc: &Document) -> Result<AnalyzedDocument> {
        let (title, abstract_text) = match self.get(&doc.id) {
            Some((t, a)) => (t.clone(), a.clone()),
            None => (analyze(&doc.title, self), analyze(&doc.abstract_text, self)),
        };
        Ok(AnalyzedDocument { doc: doc.clone(), title, abstract_text })
    }
}

fn apply_field(
    transform: FieldTransform,
    raw: &str,
    tagged: &TaggedText,
    analyzed: &AnalyzedDocument,
    seed: &SeedContext,
    rng: &mut rand_chacha::ChaCha8Rng,
    lexicon: &AntonymLexicon,
) -> String {
    use FieldTransform as F;
    let out = match transform {
        F::Preserve => return raw.to_string(),
        F::Delete => return String::new(),
        F::Whitespace => unreachable!("whitespace transform is applied jointly"),
        F::AddNoun { source } => {
            return add_noun(raw, &analyzed.title, &analyzed.abstract_text, source, seed);
        }
        F::DeleteTag { class } => delete_by_tag(tagged, class),
        F::DeleteRandomWords => delete_random_words(tagged, RANDOM_DELETION_FRACTION, seed),
        F::DeleteNounPhrases { mode } => delete_noun_phrases(tagged, mode),
        F::DeleteQuantile { quantile } => delete_quantile(tagged, quantile),
        F::Reorder { mode } => reorder_sentences(tagged, mode, seed),
        F::Uppercase { class, invert } => uppercase_by_tag(tagged, class, invert),
        F::DeleteNounChars => delete_chars_from_nouns(tagged, rng),
        F::KeepOnlyNouns => keep_only_nouns(tagged),
        F::ReplaceAntonyms => replace_adjectives_with_antonyms(tagged, lexicon),
    };
    out.detokenize()
}

/// Builds the variant for `code`, one of the 32 registry codes or the
/// reserved `T` / `T+A`.
pub fn apply_neighbor(
    analyzed: &AnalyzedDocument,
    code: &str,
    global_seed: u64,
    lexicon: &AntonymLexicon,
) -> Result<DocumentVariant> {
    let doc = &analyzed.doc;
    let variant = |title: String, abstract_text: String| DocumentVariant {
        doc_id: doc.id.clone(),
        code: code.to_string(),
        title,
        abstract_text,
    };
    match code {
        CODE_TITLE => return Ok(variant(doc.title.clone(), String::new())),
        CODE_TITLE_ABSTRACT => return Ok(variant(doc.title.clone(), doc.abstract_text.clone())),
        _ => {}
    }
    let spec = lookup(code)?;
    let seed = SeedContext::new(global_seed, doc.id.clone(), code);

    if spec.title_transform == FieldTransform::Whitespace {
        let joined = join_fields(&doc.title, &doc.abstract_text);
        let dot = doc.title.len();
        let (out, mark) = ops::perturb_whitespace_marked(&joined, Some(dot), &seed);
        let dot_out = mark.expect("separator offset is a char boundary");
        let title = out[..dot_out].to_string();
        let abstract_text = out[dot_out + FIELD_SEPARATOR.len()..].to_string();
        return Ok(variant(title, abstract_text));
    }

    let mut rng = seed.rng();
    let title = apply_field(spec.title_transform, &doc.title, &analyzed.title, analyzed, &seed, &mut rng, lexicon);
    let abstract_text = apply_field(
        spec.abstract_transform,
        &doc.abstract_text,
        &analyzed.abstract_text,
        analyzed,
        &seed,
        &mut rng,
        lexicon,
    );
    Ok(variant(title, abstract_text))
}

/// Tagger, lexicon and seed bundled for corpus-wide generation.
pub struct Perturber {
    annotator: Box<dyn Annotator>,
    lexicon: AntonymLexicon,
    global_seed: u64,
}

impl Perturber {
    pub fn new(annotator: Box<dyn Annotator>, lexicon: AntonymLexicon, global_seed: u64) -> Self {
        Perturber { annotator, lexicon, global_seed }
    }

    /// Bundled tagger and starter antonym lexicon.
    pub fn with_defaults(global_seed: u64) -> Self {
        Self::new(Box::new(LexiconTagger::bundled()), AntonymLexicon::starter(), global_seed)
    }

    pub fn annotate(&self, doc: &Document) -> Result<AnalyzedDocument> {
        self.annotator.annotate(doc)
    }

    pub fn lexicon(&self) -> &AntonymLexicon {
        &self.lexicon
    }

    pub fn apply(&self, doc: &Document, code: &str) -> Result<DocumentVariant> {
        apply_neighbor(&self.annotate(doc)?, code, self.global_seed, &self.lexicon)
    }

    /// Variants for every document × code, documents in corpus order and
    /// codes in the given order. Parallel over documents.
    pub fn generate(&self, corpus: &Corpus, codes: &[&str]) -> Result<Vec<DocumentVariant>> {
        for code in codes {
            if *code != CODE_TITLE && *code != CODE_TITLE_ABSTRACT {
                lookup(code)?;
            }
        }
        let per_doc: Vec<Vec<DocumentVariant>> = corpus
            .documents
            .par_iter()
            .map(|doc| {
                let analyzed = self.annotate(doc)?;
                codes
                    .iter()
                    .map(|code| apply_neighbor(&analyzed, code, self.global_seed, &self.lexicon))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(per_doc.into_iter().flatten().collect())
    }
}

/// The reserved codes followed by `codes`.
pub fn with_reserved<'a>(codes: &[&'a str]) -> Vec<&'a str> {
    let mut out = vec![CODE_TITLE, CODE_TITLE_ABSTRACT];
    out.extend(codes.iter().filter(|c| **c != CODE_TITLE && **c != CODE_TITLE_ABSTRACT));
    out
}

pub fn variants_to_jsonl(variants: &[DocumentVariant]) -> String {
    let mut buf = Vec::new();
    for v in variants {
        serde_json::to_writer(&mut buf, v).expect("variant serializes");
        buf.write_all(b"\n").expect("write to vec");
    }
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn write_variants(path: impl AsRef<Path>, variants: &[DocumentVariant]) -> Result<()> {
    fsutil::write_atomic(path.as_ref(), variants_to_jsonl(variants).as_bytes())
}

pub fn parse_variants(text: &str, source_label: &str) -> Result<Vec<DocumentVariant>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::Parse {
                path: source_label.to_string(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_variants(path: impl AsRef<Path>) -> Result<Vec<DocumentVariant>> {
    let path = path.as_ref();
    parse_variants(&fsutil::read_to_string(path)?, &path.display().to_string())
}
