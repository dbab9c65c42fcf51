#![allow(dead_code)]

use std::path::PathBuf;

use nbr_core::linguistic::{AntonymLexicon, LexiconTagger, PreTagged};
use nbr_core::perturb::Perturber;
use nbr_core::{Corpus, Document};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn example_corpus() -> Corpus {
    nbr_core::corpus::load_corpus(fixture("example_corpus.jsonl"), "example").unwrap()
}

pub fn example_document() -> Document {
    example_corpus().documents.remove(0)
}

/// Perturber fed with the hand-assigned tags of the example document.
pub fn example_perturber(seed: u64) -> Perturber {
    let tags = PreTagged::load(fixture("example_tags.jsonl"), Box::new(LexiconTagger::bundled())).unwrap();
    Perturber::new(Box::new(tags), AntonymLexicon::starter(), seed)
}

const NOUNS: &[&str] = &[
    "model",
    "models",
    "network",
    "networks",
    "graph",
    "graphs",
    "embedding",
    "embeddings",
    "representation",
    "data",
    "method",
    "accuracy",
    "benchmark",
    "task",
    "tasks",
    "language",
    "text",
    "system",
    "paper",
    "approach",
    "corpus",
    "document",
    "documents",
    "retrieval",
    "query",
    "queries",
    "learning",
    "classifier",
    "dataset",
    "datasets",
    "performance",
    "attention",
    "transformer",
    "encoder",
    "decoder",
    "framework",
    "BERT",
    "NLP",
    "GPU",
    "baseline",
    "baselines",
    "feature",
    "features",
    "sentence",
    "sentences",
    "token",
];
const ADJS: &[&str] = &[
    "deep",
    "robust",
    "common",
    "novel",
    "efficient",
    "sparse",
    "large",
    "small",
    "simple",
    "new",
    "neural",
    "strong",
    "fast",
    "accurate",
    "semantic",
    "contextual",
    "scientific",
    "better",
    "best",
    "difficult",
];
const VERBS: &[&str] = &[
    "propose",
    "study",
    "train",
    "improves",
    "evaluate",
    "show",
    "use",
    "present",
    "achieves",
    "introduce",
    "is",
    "are",
    "outperforms",
    "learn",
    "based",
    "using",
    "trained",
    "reduces",
    "captures",
];
const FUNCS: &[&str] = &[
    "the",
    "a",
    "an",
    "this",
    "these",
    "we",
    "it",
    "they",
    "our",
    "in",
    "on",
    "for",
    "of",
    "with",
    "from",
    "to",
    "by",
    "and",
    "or",
    "that",
    "which",
    "significantly",
    "often",
    "also",
    "very",
    "not",
];
const NUMS: &[&str] = &["3", "12", "2.5", "100", "two", "1,000", "95%"];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).unwrap()
}

fn word(rng: &mut ChaCha8Rng) -> String {
    let r: f64 = rng.random();
    let w = if r < 0.32 {
        pick(rng, NOUNS)
    } else if r < 0.47 {
        pick(rng, ADJS)
    } else if r < 0.62 {
        pick(rng, VERBS)
    } else if r < 0.96 {
        pick(rng, FUNCS)
    } else {
        pick(rng, NUMS)
    };
    w.to_string()
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(4..18);
    let mut words: Vec<String> = (0..n).map(|_| word(rng)).collect();
    words[0] = capitalize(&words[0]);
    if n > 6 && rng.random_bool(0.3) {
        let at = rng.random_range(2..n - 2);
        words[at].push(',');
    }
    if n > 8 && rng.random_bool(0.15) {
        let at = rng.random_range(1..n - 3);
        words[at] = format!("({}", words[at]);
        words[at + 1].push(')');
    }
    let end = match rng.random_range(0..20) {
        0 => "?",
        1 => "!",
        _ => ".",
    };
    words.last_mut().unwrap().push_str(end);
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            out.push(if rng.random_bool(0.03) { '\t' } else { ' ' });
        }
        out.push_str(w);
    }
    out
}

pub fn random_document(rng: &mut ChaCha8Rng, id: &str) -> Document {
    let tn = rng.random_range(3..11);
    let title: Vec<String> = (0..tn)
        .map(|_| {
            let w = if rng.random_bool(0.55) { pick(rng, NOUNS) } else { pick(rng, ADJS) };
            if rng.random_bool(0.6) {
                capitalize(w)
            } else {
                w.to_string()
            }
        })
        .collect();
    let sn = rng.random_range(1..7);
    let abs: Vec<String> = (0..sn).map(|_| sentence(rng)).collect();
    Document::new(id, title.join(" "), abs.join(" "))
}

pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..n).map(|i| random_document(&mut rng, &format!("d{i:04}"))).collect();
    Corpus::from_documents(format!("synthetic-{seed}"), docs).unwrap()
}

/// Splits detokenized text back into its tokens.
pub fn tokens(s: &str) -> Vec<&str> {
    s.split(' ').filter(|t| !t.is_empty()).collect()
}
