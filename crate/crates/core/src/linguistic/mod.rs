//! Sentence segmentation, tokenization, tagging, chunking and antonyms.
//!
//! Everything a neighbor transform consumes is a [`TaggedText`]: sentences
//! of [`TaggedToken`]s carrying a Penn Treebank tag. Tags either come from a
//! [`Tagger`] or are supplied verbatim through [`PreTagged`].

mod antonym;
mod chunk;
mod tagger;
mod tokenize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use antonym::{antonym_of, AntonymLexicon};
pub use chunk::{chunk_noun_phrases, ChunkSpan};
pub use tagger::{tag_tokens, LexiconTagger, PreTagged, PreTaggedDocument, PreTaggedSentence, Tagger};
pub use tokenize::{is_punct_token, split_sentences, tokenize_words, word_count};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: String,
    pub is_word: bool,
}

impl TaggedToken {
    pub fn new(surface: impl Into<String>, tag: impl Into<String>) -> Self {
        let surface = surface.into();
        let is_word = !is_punct_token(&surface);
        TaggedToken { surface, tag: tag.into(), is_word }
    }

    pub fn in_class(&self, class: TagClass) -> bool {
        class.contains(&self.tag)
    }
}

pub type Sentence = Vec<TaggedToken>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedText {
    pub sentences: Vec<Sentence>,
}

impl TaggedText {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        TaggedText { sentences }
    }

    /// Drops sentences that became empty.
    pub fn from_sentences(sentences: impl IntoIterator<Item = Sentence>) -> Self {
        TaggedText { sentences: sentences.into_iter().filter(|s| !s.is_empty()).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.iter().all(|s| s.is_empty())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TaggedToken> {
        self.sentences.iter().flatten()
    }

    pub fn word_count(&self) -> usize {
        self.tokens().filter(|t| t.is_word).count()
    }

    /// Joins every token with a single space, sentences in order.
    pub fn detokenize(&self) -> String {
        let mut out = String::new();
        for tok in self.tokens() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&tok.surface);
        }
        out
    }

    pub fn map_tokens(&self, mut f: impl FnMut(&TaggedToken) -> Option<TaggedToken>) -> TaggedText {
        TaggedText::from_sentences(self.sentences.iter().map(|s| s.iter().filter_map(&mut f).collect::<Sentence>()))
    }
}

impl fmt::Display for TaggedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detokenize())
    }
}

pub fn sentence_word_count(sentence: &[TaggedToken]) -> usize {
    sentence.iter().filter(|t| t.is_word).count()
}

/// Coarse part-of-speech class over Penn tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TagClass {
    #[serde(rename = "ADJ")]
    Adj,
    #[serde(rename = "NN")]
    Noun,
    #[serde(rename = "VB")]
    Verb,
    #[serde(rename = "ADV")]
    Adv,
    #[serde(rename = "PR")]
    Pronoun,
    #[serde(rename = "DT")]
    Determiner,
    #[serde(rename = "NUM")]
    Number,
}

impl TagClass {
    pub const ALL: [TagClass; 7] = [
        TagClass::Adj,
        TagClass::Noun,
        TagClass::Verb,
        TagClass::Adv,
        TagClass::Pronoun,
        TagClass::Determiner,
        TagClass::Number,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TagClass::Adj => "ADJ",
            TagClass::Noun => "NN",
            TagClass::Verb => "VB",
            TagClass::Adv => "ADV",
            TagClass::Pronoun => "PR",
            TagClass::Determiner => "DT",
            TagClass::Number => "NUM",
        }
    }

    pub fn members(self) -> &'static [&'static str] {
        match self {
            TagClass::Adj => &["JJ", "JJR", "JJS"],
            TagClass::Noun => &["NN", "NNS", "NNP", "NNPS"],
            TagClass::Verb => &["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"],
            TagClass::Adv => &["RB", "RBR", "RBS"],
            TagClass::Pronoun => &["PRP", "PRP$"],
            TagClass::Determiner => &["DT"],
            TagClass::Number => &["CD"],
        }
    }

    pub fn contains(self, tag: &str) -> bool {
        self.members().contains(&tag)
    }
}

/// Segments, tokenizes and tags raw text.
pub fn analyze(text: &str, tagger: &dyn Tagger) -> TaggedText {
    let sentences: Vec<Sentence> = split_sentences(text)
        .into_iter()
        .map(|tokens| {
            let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
            let tags = tagger.tag(&refs);
            tokens.into_iter().zip(tags).map(|(surface, tag)| TaggedToken::new(surface, tag)).collect::<Sentence>()
        })
        .collect();
    TaggedText::from_sentences(sentences)
}

/// Parses `word/TAG` pairs separated by spaces into a single sentence.
/// Test and fixture helper; the last `/` separates surface from tag.
pub fn parse_slashed(text: &str) -> Sentence {
    text.split_whitespace()
        .map(|pair| {
            let (surface, tag) = pair.rsplit_once('/').unwrap_or((pair, "NN"));
            TaggedToken::new(surface, tag)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_has_no_sentences() {
        let t = analyze("", &LexiconTagger::bundled());
        assert!(t.sentences.is_empty());
    }

    #[test]
    fn single_sentence_with_final_period() {
        let t = analyze("We train deep robust embeddings using pytorch.", &LexiconTagger::bundled());
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(t.sentences[0].len(), 8);
        let last = t.sentences[0].last().unwrap();
        assert_eq!(last.surface, ".");
        assert!(!last.is_word);
    }

    #[test]
    fn three_terminals_three_sentences() {
        let t = analyze("A. B? C!", &LexiconTagger::bundled());
        assert_eq!(t.sentences.len(), 3);
    }

    #[test]
    fn tag_classes_are_disjoint_and_exact() {
        assert_eq!(TagClass::Noun.members(), ["NN", "NNS", "NNP", "NNPS"]);
        assert_eq!(TagClass::Pronoun.members(), ["PRP", "PRP$"]);
        let mut all: Vec<&str> = TagClass::ALL.iter().flat_map(|c| c.members().iter().copied()).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn slashed_parser_keeps_punctuation_flag() {
        let s = parse_slashed("NLP/NNP ./.");
        assert!(s[0].is_word);
        assert!(!s[1].is_word);
        assert_eq!(s[1].tag, ".");
    }
}
