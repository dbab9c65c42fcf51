//! Part-of-speech taggers.
//!
//! # Model file format (`nbr-tagger`, version 1)
//!
//! UTF-8 text, one tab-separated record per line. Blank lines and lines
//! starting with `#` are ignored. The first record must be the header
//! `nbr-tagger<TAB>1`. Remaining records:
//!
//! | record | fields | meaning |
//! | ------ | ------ | ------- |
//! | `lex` | word, tags | known word; comma-separated tags, most likely first |
//! | `suffix` | suffix, tag | unknown-word guess; longest matching suffix wins |
//! | `rule` | from, to, condition, value | contextual retag, applied in file order |
//!
//! Rule conditions are `PREVTAG`, `NEXTTAG`, `PREVWORD`, `NEXTWORD` and
//! `PREV1OR2TAG`. A rule retags a known word only when `to` is one of the
//! word's lexicon tags; unknown words may be retagged freely.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::is_punct_token;
use super::{Sentence, TaggedText, TaggedToken};
use crate::error::{Error, Result};
use crate::fsutil;

const BUNDLED_MODEL: &str = include_str!("../../data/tagger-en-v1.tsv");
const MODEL_MAGIC: &str = "nbr-tagger";
const MODEL_VERSION: &str = "1";

pub trait Tagger: Send + Sync {
    /// One Penn tag per input token.
    fn tag(&self, tokens: &[&str]) -> Vec<String>;
}

/// Tags a token sequence; returns an empty list for empty input.
pub fn tag_tokens(tokens: &[&str], tagger: &dyn Tagger) -> Vec<String> {
    if tokens.is_empty() {
        return Vec::new();
    }
    tagger.tag(tokens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Condition {
    PrevTag(String),
    NextTag(String),
    PrevWord(String),
    NextWord(String),
    Prev1Or2Tag(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Rule {
    from: String,
    to: String,
    condition: Condition,
}

/// Lexicon lookup with suffix guessing and contextual retag rules.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: HashMap<String, Vec<String>>,
    suffixes: Vec<(String, String)>,
    rules: Vec<Rule>,
}

impl LexiconTagger {
    pub fn bundled() -> Self {
        Self::from_model_str(BUNDLED_MODEL).expect("bundled tagger model is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_model_str(&fsutil::read_to_string(path.as_ref())?)
    }

    pub fn from_model_str(text: &str) -> Result<Self> {
        let mut lexicon = HashMap::new();
        let mut suffixes = Vec::new();
        let mut rules = Vec::new();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| Error::Format(format!("tagger model line {}: {msg}", idx + 1));
            if !saw_header {
                if fields != [MODEL_MAGIC, MODEL_VERSION] {
                    return Err(bad("expected header `nbr-tagger<TAB>1`"));
                }
                saw_header = true;
                continue;
            }
            match fields.as_slice() {
                ["lex", word, tags] => {
                    let tags: Vec<String> = tags.split(',').map(str::to_string).collect();
                    if tags.iter().any(|t| t.is_empty()) {
                        return Err(bad("empty tag"));
                    }
                    lexicon.insert(word.to_string(), tags);
                }
                ["suffix", suffix, tag] => suffixes.push((suffix.to_string(), tag.to_string())),
                ["rule", from, to, cond, value] => {
                    let value = value.to_string();
                    let condition = match *cond {
                        "PREVTAG" => Condition::PrevTag(value),
                        "NEXTTAG" => Condition::NextTag(value),
                        "PREVWORD" => Condition::PrevWord(value),
                        "NEXTWORD" => Condition::NextWord(value),
                        "PREV1OR2TAG" => Condition::Prev1Or2Tag(value),
                        other => return Err(bad(&format!("unknown rule condition {other:?}"))),
                    };
                    rules.push(Rule { from: from.to_string(), to: to.to_string(), condition });
                }
                _ => return Err(bad("unrecognized record")),
            }
        }
        if !saw_header {
            return Err(Error::Format("tagger model has no header".into()));
        }
        // Stable sort keeps file order among equal lengths.
        suffixes.sort_by_key(|s| std::cmp::Reverse(s.0.chars().count()));
        Ok(LexiconTagger { lexicon, suffixes, rules })
    }

    fn lookup(&self, token: &str) -> Option<&[String]> {
        self.lexicon.get(token).or_else(|| self.lexicon.get(&token.to_lowercase())).map(Vec::as_slice)
    }

    fn guess_unknown(&self, token: &str, sentence_initial: bool) -> String {
        let first_upper = token.chars().next().is_some_and(char::is_uppercase);
        if first_upper && !sentence_initial {
            return "NNP".into();
        }
        if token.chars().filter(|c| c.is_alphabetic()).count() > 1
            && token.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
        {
            return "NNP".into();
        }
        if token.contains('-') {
            return "JJ".into();
        }
        let lower = token.to_lowercase();
        for (suffix, tag) in &self.suffixes {
            if lower.len() > suffix.len() + 1 && lower.ends_with(suffix.as_str()) {
                return tag.clone();
            }
        }
        "NN".into()
    }

    fn initial_tag(&self, token: &str, position: usize) -> (String, Option<&[String]>) {
        if is_punct_token(token) {
            return (punct_tag(token).to_string(), None);
        }
        if is_number(token) {
            return ("CD".into(), None);
        }
        let first_upper = token.chars().next().is_some_and(char::is_uppercase);
        if let Some(tags) = self.lookup(token) {
            let tag = &tags[0];
            // Capitalized common nouns mid-sentence read as proper nouns.
            if first_upper && position > 0 && !self.lexicon.contains_key(token) {
                match tag.as_str() {
                    "NN" => return ("NNP".into(), None),
                    "NNS" => return ("NNPS".into(), None),
                    _ => {}
                }
            }
            return (tag.clone(), Some(tags));
        }
        (self.guess_unknown(token, position == 0), None)
    }

    fn condition_holds(cond: &Condition, i: usize, tokens: &[&str], tags: &[String]) -> bool {
        let lower = |j: usize| tokens[j].to_lowercase();
        match cond {
            Condition::PrevTag(t) => i > 0 && tags[i - 1] == *t,
            Condition::NextTag(t) => i + 1 < tags.len() && tags[i + 1] == *t,
            Condition::PrevWord(w) => i > 0 && lower(i - 1) == *w,
            Condition::NextWord(w) => i + 1 < tokens.len() && lower(i + 1) == *w,
            Condition::Prev1Or2Tag(t) => (i > 0 && tags[i - 1] == *t) || (i > 1 && tags[i - 2] == *t),
        }
    }
}

impl Tagger for LexiconTagger {
    fn tag(&self, tokens: &[&str]) -> Vec<String> {
        let (mut tags, allowed): (Vec<String>, Vec<Option<&[String]>>) =
            tokens.iter().enumerate().map(|(i, t)| self.initial_tag(t, i)).unzip();
        for rule in &self.rules {
            for i in 0..tags.len() {
                if tags[i] != rule.from {
                    continue;
                }
                if let Some(set) = allowed[i] {
                    if !set.contains(&rule.to) {
                        continue;
                    }
                }
                if Self::condition_holds(&rule.condition, i, tokens, &tags) {
                    tags[i] = rule.to.clone();
                }
            }
        }
        tags
    }
}

fn is_number(token: &str) -> bool {
    token.chars().any(|c| c.is_ascii_digit())
        && token.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/' | ':' | '%' | '+'))
}

fn punct_tag(token: &str) -> &'static str {
    match token {
        "." | "!" | "?" => ".",
        "," => ",",
        ":" | ";" | "-" | "--" | "\u{2013}" | "\u{2014}" | "\u{2026}" => ":",
        "(" | "[" | "{" => "-LRB-",
        ")" | "]" | "}" => "-RRB-",
        "\u{201c}" | "`" | "``" => "``",
        "\"" | "\u{201d}" | "'" | "''" | "\u{2019}" => "''",
        "$" => "$",
        "#" => "#",
        _ => "SYM",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreTaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
}

impl PreTaggedSentence {
    pub fn from_sentence(sentence: &[TaggedToken]) -> Self {
        PreTaggedSentence {
            tokens: sentence.iter().map(|t| t.surface.clone()).collect(),
            tags: sentence.iter().map(|t| t.tag.clone()).collect(),
        }
    }

    fn to_sentence(&self, doc_id: &str) -> Result<Sentence> {
        if self.tokens.len() != self.tags.len() {
            return Err(Error::Validation(format!(
                "pre-tagged document {doc_id:?}: {} tokens but {} tags",
                self.tokens.len(),
                self.tags.len()
            )));
        }
        if self.tokens.iter().any(|t| t.is_empty()) {
            return Err(Error::Validation(format!("pre-tagged document {doc_id:?}: empty token")));
        }
        Ok(self.tokens.iter().zip(&self.tags).map(|(s, t)| TaggedToken::new(s.clone(), t.clone())).collect())
    }
}

/// One line of a pre-tagged JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreTaggedDocument {
    pub id: String,
    pub title: Vec<PreTaggedSentence>,
    #[serde(rename = "abstract")]
    pub abstract_text: Vec<PreTaggedSentence>,
}

impl PreTaggedDocument {
    pub fn from_tagged(id: impl Into<String>, title: &TaggedText, abstract_text: &TaggedText) -> Self {
        let conv = |t: &TaggedText| t.sentences.iter().map(|s| PreTaggedSentence::from_sentence(s)).collect();
        PreTaggedDocument { id: id.into(), title: conv(title), abstract_text: conv(abstract_text) }
    }
}

/// Pass-through tagger over tags supplied with the input.
///
/// Documents are looked up by id. As a [`Tagger`], a token sequence that
/// matches a supplied sentence gets its supplied tags; anything else falls
/// back to the wrapped tagger.
pub struct PreTagged {
    documents: HashMap<String, (TaggedText, TaggedText)>,
    sentences: HashMap<Vec<String>, Vec<String>>,
    fallback: Box<dyn Tagger>,
}

impl PreTagged {
    pub fn new(fallback: Box<dyn Tagger>) -> Self {
        PreTagged { documents: HashMap::new(), sentences: HashMap::new(), fallback }
    }

    pub fn parse(text: &str, source_label: &str, fallback: Box<dyn Tagger>) -> Result<Self> {
        let mut out = PreTagged::new(fallback);
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: PreTaggedDocument = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: source_label.to_string(),
                line: idx + 1,
                message: e.to_string(),
            })?;
            out.insert(&doc)?;
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>, fallback: Box<dyn Tagger>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fsutil::read_to_string(path)?, &path.display().to_string(), fallback)
    }

    pub fn insert(&mut self, doc: &PreTaggedDocument) -> Result<()> {
        let convert = |sents: &[PreTaggedSentence]| -> Result<TaggedText> {
            Ok(TaggedText::from_sentences(sents.iter().map(|s| s.to_sentence(&doc.id)).collect::<Result<Vec<_>>>()?))
        };
        let title = convert(&doc.title)?;
        let abstract_text = convert(&doc.abstract_text)?;
        for s in doc.title.iter().chain(&doc.abstract_text) {
            self.sentences.insert(s.tokens.clone(), s.tags.clone());
        }
        if self.documents.insert(doc.id.clone(), (title, abstract_text)).is_some() {
            return Err(Error::DuplicateId(doc.id.clone()));
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<(&TaggedText, &TaggedText)> {
        self.documents.get(id).map(|(t, a)| (t, a))
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

impl Tagger for PreTagged {
    fn tag(&self, tokens: &[&str]) -> Vec<String> {
        let key: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
        match self.sentences.get(&key) {
            Some(tags) => tags.clone(),
            None => self.fallback.tag(tokens),
        }
    }
}
