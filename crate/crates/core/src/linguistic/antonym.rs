use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;

const STARTER_LEXICON: &str = include_str!("../../data/antonyms-en.tsv");

/// Adjective → antonym table loaded from `word<TAB>antonym` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AntonymLexicon {
    entries: HashMap<String, String>,
}

impl AntonymLexicon {
    pub fn starter() -> Self {
        Self::parse(STARTER_LEXICON).expect("starter antonym lexicon is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fsutil::read_to_string(path.as_ref())?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>().as_slice() {
                [word, antonym] if !word.is_empty() && !antonym.trim().is_empty() => {
                    entries.insert(word.to_lowercase(), antonym.trim().to_string());
                }
                _ => return Err(Error::Format(format!("antonym lexicon line {}: expected word<TAB>antonym", idx + 1))),
            }
        }
        Ok(AntonymLexicon { entries })
    }

    pub fn insert(&mut self, word: &str, antonym: &str) {
        self.entries.insert(word.to_lowercase(), antonym.to_string());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(&word.to_lowercase()).map(String::as_str)
    }
}

/// Case-insensitive lookup; `None` means the caller keeps the word.
pub fn antonym_of<'a>(word: &str, lexicon: &'a AntonymLexicon) -> Option<&'a str> {
    lexicon.get(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starter_covers_worked_example() {
        let lex = AntonymLexicon::starter();
        assert_eq!(antonym_of("common", &lex), Some("individual"));
        assert_eq!(antonym_of("deep", &lex), Some("shallow"));
        assert_eq!(antonym_of("robust", &lex), Some("frail"));
        assert_eq!(antonym_of("Deep", &lex), Some("shallow"));
        assert_eq!(antonym_of("xylophonic", &lex), None);
        assert_eq!(antonym_of("contextual", &lex), None);
    }

    #[test]
    fn malformed_line_is_rejected() {
        assert!(AntonymLexicon::parse("good\n").is_err());
        assert!(AntonymLexicon::parse("good\t\n").is_err());
        assert_eq!(AntonymLexicon::parse("# x\nGood\tbad\n").unwrap().get("good"), Some("bad"));
    }
}
