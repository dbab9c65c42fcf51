use serde::{Deserialize, Serialize};

use super::{TagClass, TaggedText, TaggedToken};

/// Half-open token range `[start, end)` within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSpan {
    pub start: usize,
    pub end: usize,
}

impl ChunkSpan {
    pub fn text(&self, sentence: &[TaggedToken]) -> String {
        sentence[self.start..self.end].iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Noun-phrase chunks per sentence under the grammar `DT? ADJ* NN+`,
/// matched greedily left to right.
pub fn chunk_noun_phrases(tagged: &TaggedText) -> Vec<Vec<ChunkSpan>> {
    tagged.sentences.iter().map(|s| chunk_sentence(s)).collect()
}

fn chunk_sentence(sentence: &[TaggedToken]) -> Vec<ChunkSpan> {
    let is = |j: usize, c: TagClass| j < sentence.len() && sentence[j].in_class(c);
    let mut spans = Vec::new();
    let mut i = 0;
    while i < sentence.len() {
        let mut j = i;
        if is(j, TagClass::Determiner) {
            j += 1;
        }
        while is(j, TagClass::Adj) {
            j += 1;
        }
        let nouns_start = j;
        while is(j, TagClass::Noun) {
            j += 1;
        }
        if j > nouns_start {
            spans.push(ChunkSpan { start: i, end: j });
            i = j;
        } else {
            i += 1;
        }
    }
    spans
}
