//! Title/abstract corpora in line-delimited JSON.
//!
//! One object per line with exactly the fields `id`, `title` and `abstract`.
//! Text is kept byte-for-byte; no Unicode normalization is applied.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::linguistic;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, title: impl Into<String>, abstract_text: impl Into<String>) -> Self {
        Document { id: id.into(), title: title.into(), abstract_text: abstract_text.into() }
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Validation("document id must be non-empty".into()));
        }
        if linguistic::word_count(&self.title) == 0 {
            return Err(Error::EmptyTitle(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub domain_tag: String,
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus from in-memory documents, enforcing the same checks as
    /// [`load_corpus`].
    pub fn from_documents(name: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            doc.validate()?;
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus { name: name.into(), domain_tag: String::new(), documents })
    }

    pub fn parse(name: &str, source_label: &str, text: &str) -> Result<Self> {
        let mut documents = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let doc: Document = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: source_label.to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
            doc.validate()?;
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateId(doc.id));
            }
            documents.push(doc);
        }
        Ok(Corpus { name: name.to_string(), domain_tag: String::new(), documents })
    }

    pub fn with_domain(mut self, domain_tag: impl Into<String>) -> Self {
        self.domain_tag = domain_tag.into();
        self
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }

    /// Serializes back to the line format, one LF-terminated record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            out.push_str(&serde_json::to_string(doc).expect("document serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn load_corpus(path: impl AsRef<Path>, name: &str) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fsutil::read_to_string(path)?;
    Corpus::parse(name, &path.display().to_string(), &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub count: usize,
    pub mean_title_len: f64,
    pub mean_abstract_len: f64,
    pub empty_abstracts: usize,
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::Validation(format!("corpus {:?} is empty", corpus.name)));
    }
    let n = corpus.len() as f64;
    let (mut title_words, mut abstract_words, mut empty) = (0usize, 0usize, 0usize);
    for doc in &corpus.documents {
        title_words += linguistic::word_count(&doc.title);
        let a = linguistic::word_count(&doc.abstract_text);
        if a == 0 {
            empty += 1;
        }
        abstract_words += a;
    }
    Ok(CorpusStats {
        count: corpus.len(),
        mean_title_len: title_words as f64 / n,
        mean_abstract_len: abstract_words as f64 / n,
        empty_abstracts: empty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, title: &str, abs: &str) -> String {
        serde_json::to_string(&Document::new(id, title, abs)).unwrap()
    }

    #[test]
    fn loads_in_order() {
        let text = [line("a", "T a", "x"), line("b", "T b", "y"), line("c", "T c", "z")].join("\n");
        let corpus = Corpus::parse("t", "mem", &text).unwrap();
        assert_eq!(corpus.ids(), ["a", "b", "c"]);
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let text = [line("a", "One", ""), line("a", "Two", "")].join("\n");
        match Corpus::parse("t", "mem", &text) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "a"),
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn missing_abstract_reports_line() {
        let text = format!("{}\n{}", line("a", "One", ""), r#"{"id":"b","title":"Two"}"#);
        match Corpus::parse("t", "mem", &text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn extra_field_is_a_parse_error() {
        let text = r#"{"id":"a","title":"One","abstract":"","venue":"ACL"}"#;
        assert!(matches!(Corpus::parse("t", "mem", text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn punctuation_only_title_is_empty() {
        let text = line("q", " ... ", "body");
        match Corpus::parse("t", "mem", &text) {
            Err(Error::EmptyTitle(id)) => assert_eq!(id, "q"),
            other => panic!("expected empty-title error, got {other:?}"),
        }
    }

    #[test]
    fn stats_count_word_tokens() {
        let corpus = Corpus::from_documents("t", vec![Document::new("a", "A B", "C D E")]).unwrap();
        let s = corpus_stats(&corpus).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.mean_title_len, 2.0);
        assert_eq!(s.mean_abstract_len, 3.0);
    }

    #[test]
    fn stats_mean_abstract_and_empty_flag() {
        let corpus = Corpus::from_documents(
            "t",
            vec![
                Document::new("a", "x", "one two, three four."),
                Document::new("b", "y", "1 2 3 4 5 6"),
                Document::new("c", "z", ""),
            ],
        )
        .unwrap();
        let s = corpus_stats(&corpus).unwrap();
        assert!((s.mean_abstract_len - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.empty_abstracts, 1);
    }

    #[test]
    fn empty_corpus_stats_error() {
        let corpus = Corpus::parse("t", "mem", "").unwrap();
        assert!(corpus_stats(&corpus).is_err());
    }
}
