//! Transform primitives. Each takes tagged text (or raw text for the
//! whitespace class) and returns a new value; inputs are never mutated.

use std::collections::{HashMap, HashSet};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linguistic::{
    chunk_noun_phrases, sentence_word_count, AntonymLexicon, Sentence, TagClass, TaggedText, TaggedToken,
};

use super::seed::SeedContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReorderMode {
    Rotate,
    Shuffle,
    SortAsc,
    SortDesc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseMode {
    All,
    TopHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NounSource {
    Title,
    Abstract,
}

pub const RANDOM_DELETION_FRACTION: f64 = 0.30;
pub const WHITESPACE_FRACTION: f64 = 0.5;
/// Whitespace run lengths for a selected site, inclusive.
pub const WHITESPACE_RUN: (usize, usize) = (2, 5);
pub const MAX_APPENDED_NOUNS: usize = 4;

pub fn delete_by_tag(tagged: &TaggedText, class: TagClass) -> TaggedText {
    tagged.map_tokens(|t| (!(t.is_word && t.in_class(class))).then(|| t.clone()))
}

pub fn keep_only_nouns(tagged: &TaggedText) -> TaggedText {
    tagged.map_tokens(|t| (t.is_word && t.in_class(TagClass::Noun)).then(|| t.clone()))
}

pub fn reorder_sentences(tagged: &TaggedText, mode: ReorderMode, seed: &SeedContext) -> TaggedText {
    let mut sentences = tagged.sentences.clone();
    if sentences.len() < 2 {
        return tagged.clone();
    }
    match mode {
        ReorderMode::Rotate => sentences.rotate_left(1),
        ReorderMode::SortAsc => sentences.sort_by_key(|s| sentence_word_count(s)),
        ReorderMode::SortDesc => sentences.sort_by_key(|s| std::cmp::Reverse(sentence_word_count(s))),
        ReorderMode::Shuffle => sentences = shuffle_non_identity(&tagged.sentences, seed),
    }
    TaggedText::new(sentences)
}

/// Uniform permutation conditioned on differing from the input order.
///
/// Draws are repeated from the same seeded stream until the sentence
/// sequence changes. A sequence of identical sentences is returned as is.
fn shuffle_non_identity(sentences: &[Sentence], seed: &SeedContext) -> Vec<Sentence> {
    if sentences.windows(2).all(|w| w[0] == w[1]) {
        return sentences.to_vec();
    }
    let mut rng = seed.rng();
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    for _ in 0..64 {
        order.shuffle(&mut rng);
        let changed = order.iter().enumerate().any(|(i, &j)| sentences[i] != sentences[j]);
        if changed {
            return order.iter().map(|&j| sentences[j].clone()).collect();
        }
    }
    let mut out = sentences.to_vec();
    out.rotate_left(1);
    out
}

/// Sentence boundaries `(b1, b2)` for thirds, rounding half up.
pub fn quantile_bounds(n: usize) -> (usize, usize) {
    ((2 * n + 3) / 6, (4 * n + 3) / 6)
}

pub fn delete_quantile(tagged: &TaggedText, q: u8) -> TaggedText {
    let n = tagged.sentences.len();
    let (b1, b2) = quantile_bounds(n);
    let removed = match q {
        1 => 0..b1,
        2 => b1..b2,
        3 => b2..n,
        _ => panic!("quantile must be 1, 2 or 3, got {q}"),
    };
    TaggedText::from_sentences(
        tagged.sentences.iter().enumerate().filter(|(i, _)| !removed.contains(i)).map(|(_, s)| s.clone()),
    )
}

/// Number of word tokens removed by [`delete_random_words`] for `words` words.
pub fn random_deletion_count(words: usize, fraction: f64) -> usize {
    (fraction * words as f64).round() as usize
}

pub fn delete_random_words(tagged: &TaggedText, fraction: f64, seed: &SeedContext) -> TaggedText {
    assert!(fraction > 0.0 && fraction < 1.0, "fraction must lie in (0, 1)");
    let words = tagged.word_count();
    let remove = random_deletion_count(words, fraction);
    let mut rng = seed.rng();
    let doomed: HashSet<usize> = index::sample(&mut rng, words, remove).into_iter().collect();
    let mut word_idx = 0;
    tagged.map_tokens(|t| {
        if !t.is_word {
            return Some(t.clone());
        }
        let keep = !doomed.contains(&word_idx);
        word_idx += 1;
        keep.then(|| t.clone())
    })
}

pub fn delete_noun_phrases(tagged: &TaggedText, mode: PhraseMode) -> TaggedText {
    let chunks = chunk_noun_phrases(tagged);
    let remove_key: Option<HashSet<String>> = match mode {
        PhraseMode::All => None,
        PhraseMode::TopHalf => {
            let mut counts: HashMap<String, (usize, usize)> = HashMap::new();
            let mut order = 0;
            for (sent, spans) in tagged.sentences.iter().zip(&chunks) {
                for span in spans {
                    let key = span.text(sent).to_lowercase();
                    counts.entry(key).or_insert((0, order)).0 += 1;
                    order += 1;
                }
            }
            let mut ranked: Vec<(String, (usize, usize))> = counts.into_iter().collect();
            ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
            let top = ranked.len().div_ceil(2);
            Some(ranked.into_iter().take(top).map(|(k, _)| k).collect())
        }
    };
    TaggedText::from_sentences(tagged.sentences.iter().zip(&chunks).map(|(sent, spans)| {
        let mut drop = vec![false; sent.len()];
        for span in spans {
            let selected = match &remove_key {
                None => true,
                Some(keys) => keys.contains(&span.text(sent).to_lowercase()),
            };
            if selected {
                drop[span.start..span.end].iter_mut().for_each(|d| *d = true);
            }
        }
        sent.iter().zip(drop).filter(|(_, d)| !d).map(|(t, _)| t.clone()).collect::<Sentence>()
    }))
}

pub fn uppercase_by_tag(tagged: &TaggedText, class: TagClass, invert: bool) -> TaggedText {
    tagged.map_tokens(|t| {
        let mut t = t.clone();
        if t.is_word && t.in_class(class) != invert {
            t.surface = t.surface.to_uppercase();
        }
        Some(t)
    })
}

/// Characters deleted from a noun of `len` characters given a draw of 2 or 3.
pub fn noun_char_deletions(len: usize, draw: usize) -> usize {
    if len < 4 {
        0
    } else {
        draw.clamp(1, len - 3)
    }
}

/// Deletes 2–3 characters (at most `len - 3`) from every noun of length ≥ 4.
///
/// Draws come from `rng` in token order, so the title and abstract of one
/// document can share a stream.
pub fn delete_chars_from_nouns<R: Rng>(tagged: &TaggedText, rng: &mut R) -> TaggedText {
    tagged.map_tokens(|t| {
        let chars: Vec<char> = t.surface.chars().collect();
        if !t.is_word || !t.in_class(TagClass::Noun) || chars.len() < 4 {
            return Some(t.clone());
        }
        let k = noun_char_deletions(chars.len(), rng.random_range(2..=3));
        let doomed: HashSet<usize> = index::sample(rng, chars.len(), k).into_iter().collect();
        let surface: String = chars.iter().enumerate().filter(|(i, _)| !doomed.contains(i)).map(|(_, c)| c).collect();
        Some(TaggedToken { surface, tag: t.tag.clone(), is_word: true })
    })
}

pub fn replace_adjectives_with_antonyms(tagged: &TaggedText, lexicon: &AntonymLexicon) -> TaggedText {
    tagged.map_tokens(|t| {
        let mut t = t.clone();
        if t.is_word && t.in_class(TagClass::Adj) {
            if let Some(antonym) = lexicon.get(&t.surface) {
                t.surface = match_initial_case(&t.surface, antonym);
            }
        }
        Some(t)
    })
}

fn match_initial_case(original: &str, replacement: &str) -> String {
    let upper = original.chars().next().is_some_and(char::is_uppercase);
    let mut chars = replacement.chars();
    match chars.next() {
        Some(first) if upper => first.to_uppercase().chain(chars).collect(),
        _ => replacement.to_string(),
    }
}

/// New title text with one or more nouns added.
///
/// `Title` prepends one title noun drawn from the seeded stream; `Abstract`
/// appends the first distinct (case-folded) abstract nouns, up to four.
pub fn add_noun(
    raw_title: &str,
    title: &TaggedText,
    abstract_text: &TaggedText,
    source: NounSource,
    seed: &SeedContext,
) -> String {
    let nouns = |t: &TaggedText| -> Vec<String> {
        t.tokens().filter(|t| t.is_word && t.in_class(TagClass::Noun)).map(|t| t.surface.clone()).collect()
    };
    match source {
        NounSource::Title => {
            let candidates = nouns(title);
            if candidates.is_empty() {
                return raw_title.to_string();
            }
            let pick = seed.rng().random_range(0..candidates.len());
            format!("{} {}", candidates[pick], raw_title)
        }
        NounSource::Abstract => {
            let mut seen = HashSet::new();
            let picked: Vec<String> = nouns(abstract_text)
                .into_iter()
                .filter(|n| seen.insert(n.to_lowercase()))
                .take(MAX_APPENDED_NOUNS)
                .collect();
            if picked.is_empty() {
                return raw_title.to_string();
            }
            format!("{} {}", raw_title, picked.join(" "))
        }
    }
}

/// Replaces half of the whitespace characters (rounded down) with runs of
/// 2–5 spaces. Non-whitespace characters are untouched.
pub fn perturb_whitespace(text: &str, seed: &SeedContext) -> String {
    perturb_whitespace_marked(text, None, seed).0
}

/// As [`perturb_whitespace`], also reporting where the byte at `mark` (a
/// char boundary in `text`) lands in the output.
pub(crate) fn perturb_whitespace_marked(
    text: &str,
    mark: Option<usize>,
    seed: &SeedContext,
) -> (String, Option<usize>) {
    let ws_total = text.chars().filter(|c| c.is_whitespace()).count();
    let selected = (WHITESPACE_FRACTION * ws_total as f64).floor() as usize;
    let mut rng = seed.rng();
    let mut sites: Vec<usize> = index::sample(&mut rng, ws_total, selected).into_vec();
    sites.sort_unstable();
    let mut runs: HashMap<usize, usize> = HashMap::with_capacity(sites.len());
    for site in sites {
        runs.insert(site, rng.random_range(WHITESPACE_RUN.0..=WHITESPACE_RUN.1));
    }
    let mut out = String::with_capacity(text.len() + 4 * selected);
    let mut marked = None;
    let mut ws_idx = 0;
    for (byte, c) in text.char_indices() {
        if Some(byte) == mark {
            marked = Some(out.len());
        }
        if c.is_whitespace() {
            match runs.get(&ws_idx) {
                Some(&k) => out.extend(std::iter::repeat_n(' ', k)),
                None => out.push(c),
            }
            ws_idx += 1;
        } else {
            out.push(c);
        }
    }
    if mark == Some(text.len()) {
        marked = Some(out.len());
    }
    (out, marked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linguistic::parse_slashed;

    fn text(sents: &[&str]) -> TaggedText {
        TaggedText::new(sents.iter().map(|s| parse_slashed(s)).collect())
    }

    fn seed() -> SeedContext {
        SeedContext::new(1, "d", "c")
    }

    #[test]
    fn quantile_bounds_round_half_up() {
        assert_eq!(quantile_bounds(1), (0, 1));
        assert_eq!(quantile_bounds(2), (1, 1));
        assert_eq!(quantile_bounds(3), (1, 2));
        assert_eq!(quantile_bounds(4), (1, 3));
        assert_eq!(quantile_bounds(5), (2, 3));
        for n in 0..200usize {
            let b1 = (n as f64 / 3.0 + 0.5).floor() as usize;
            let b2 = (2.0 * n as f64 / 3.0 + 0.5).floor() as usize;
            assert_eq!(quantile_bounds(n), (b1, b2), "n={n}");
        }
    }

    #[test]
    fn single_sentence_q1_is_unchanged() {
        let t = text(&["A/DT b/NN ./."]);
        assert_eq!(delete_quantile(&t, 1), t);
    }

    #[test]
    fn one_sentence_reorders_are_identity() {
        let t = text(&["A/DT b/NN ./."]);
        for mode in [ReorderMode::Rotate, ReorderMode::Shuffle, ReorderMode::SortAsc, ReorderMode::SortDesc] {
            assert_eq!(reorder_sentences(&t, mode, &seed()), t);
        }
    }

    #[test]
    fn sort_is_stable_on_ties() {
        let t = text(&["b/NN c/NN", "a/NN", "d/NN e/NN"]);
        let asc = reorder_sentences(&t, ReorderMode::SortAsc, &seed());
        assert_eq!(asc.detokenize(), "a b c d e");
        let desc = reorder_sentences(&t, ReorderMode::SortDesc, &seed());
        assert_eq!(desc.detokenize(), "b c d e a");
    }

    #[test]
    fn shuffle_of_two_always_swaps() {
        let t = text(&["a/NN", "b/NN"]);
        for s in 0..50 {
            let out = reorder_sentences(&t, ReorderMode::Shuffle, &SeedContext::new(s, "d", "T_AShuff"));
            assert_eq!(out.detokenize(), "b a");
        }
    }

    #[test]
    fn shuffle_of_identical_sentences_is_identity() {
        let t = text(&["a/NN", "a/NN"]);
        assert_eq!(reorder_sentences(&t, ReorderMode::Shuffle, &seed()), t);
    }

    #[test]
    fn random_deletion_rounding() {
        assert_eq!(random_deletion_count(23, 0.3), 7);
        assert_eq!(random_deletion_count(1, 0.3), 0);
        assert_eq!(random_deletion_count(5, 0.3), 2);
        let t = text(&["solo/NN ./."]);
        assert_eq!(delete_random_words(&t, 0.3, &seed()), t);
    }

    #[test]
    fn random_deletion_keeps_punctuation() {
        let t = text(&["a/DT b/NN ,/, c/NN d/NN e/NN f/NN g/NN h/NN i/NN j/NN ./."]);
        let out = delete_random_words(&t, 0.3, &seed());
        assert_eq!(out.word_count(), 10 - 3);
        assert_eq!(out.tokens().filter(|t| !t.is_word).count(), 2);
        assert_eq!(out, delete_random_words(&t, 0.3, &seed()));
    }

    #[test]
    fn top_half_phrases_tie_break_by_position() {
        let t = text(&["dogs/NNS like/VBP cats/NNS and/CC birds/NNS eat/VBP worms/NNS"]);
        let out = delete_noun_phrases(&t, PhraseMode::TopHalf);
        assert_eq!(out.detokenize(), "like and birds eat worms");
    }

    #[test]
    fn top_half_prefers_frequent_phrases() {
        let t = text(&["a/DT cat/NN sees/VBZ dogs/NNS ./.", "A/DT cat/NN sleeps/VBZ ./."]);
        let out = delete_noun_phrases(&t, PhraseMode::TopHalf);
        assert_eq!(out.detokenize(), "sees dogs . sleeps .");
    }

    #[test]
    fn phrase_deletion_without_chunks_is_identity() {
        let t = text(&["We/PRP run/VBP ./."]);
        assert_eq!(delete_noun_phrases(&t, PhraseMode::All), t);
        assert_eq!(delete_noun_phrases(&t, PhraseMode::TopHalf), t);
    }

    #[test]
    fn noun_char_deletion_bounds() {
        assert_eq!(noun_char_deletions(3, 2), 0);
        assert_eq!(noun_char_deletions(4, 3), 1);
        assert_eq!(noun_char_deletions(5, 3), 2);
        assert_eq!(noun_char_deletions(6, 3), 3);
        assert_eq!(noun_char_deletions(6, 2), 2);

        let t = text(&["Code/NNP Source/NNP NLP/NNP from/IN"]);
        let mut rng = seed().rng();
        let out = delete_chars_from_nouns(&t, &mut rng);
        let toks: Vec<&str> = out.tokens().map(|t| t.surface.as_str()).collect();
        assert_eq!(toks[0].len(), 3);
        assert!(toks[1].len() == 3 || toks[1].len() == 4);
        assert_eq!(toks[2], "NLP");
        assert_eq!(toks[3], "from");
    }

    #[test]
    fn antonyms_keep_capitalization() {
        let lex = AntonymLexicon::starter();
        let t = text(&["Deep/JJ nets/NNS are/VBP contextual/JJ ./."]);
        assert_eq!(replace_adjectives_with_antonyms(&t, &lex).detokenize(), "Shallow nets are contextual .");
    }

    #[test]
    fn whitespace_counts() {
        assert_eq!(perturb_whitespace("nospace", &seed()), "nospace");
        let input = "a b c d e";
        let out = perturb_whitespace(input, &seed());
        assert_eq!(out.split_whitespace().collect::<Vec<_>>(), input.split_whitespace().collect::<Vec<_>>());
        let runs: Vec<usize> =
            out.split(|c: char| !c.is_whitespace()).filter(|r| !r.is_empty()).map(str::len).collect();
        assert_eq!(runs.iter().filter(|&&r| r > 1).count(), 2);
        assert!(runs.iter().all(|&r| r == 1 || (2..=5).contains(&r)));
    }

    #[test]
    fn add_noun_from_abstract_limits_to_distinct() {
        let title = text(&["Deep/JJ Nets/NNS"]);
        let abs = text(&["models/NNS and/CC Models/NNS and/CC data/NNS"]);
        let out = add_noun("Deep Nets", &title, &abs, NounSource::Abstract, &seed());
        assert_eq!(out, "Deep Nets models data");
        let none = text(&["We/PRP run/VBP"]);
        assert_eq!(add_noun("Deep Nets", &none, &none, NounSource::Title, &seed()), "Deep Nets");
    }
}
