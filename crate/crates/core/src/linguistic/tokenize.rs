/// Abbreviations whose trailing period stays attached to the word and never
/// ends a sentence. Compared lowercase.
const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "al.", "vs.", "cf.", "fig.", "figs.", "eq.", "eqs.", "sec.", "tab.", "dr.", "mr.", "mrs.",
    "ms.", "prof.", "no.", "vol.", "approx.", "resp.", "i.i.d.", "u.s.", "st.", "jr.", "inc.", "ltd.", "co.",
];

const TERMINALS: [char; 3] = ['.', '!', '?'];

fn is_punct_char(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// True when the token consists solely of punctuation characters.
pub fn is_punct_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_punct_char)
}

fn is_abbreviation(s: &str) -> bool {
    let lower = s.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Splits one whitespace-delimited chunk into tokens: leading and trailing
/// punctuation become single-character tokens, inner punctuation stays.
fn tokenize_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    while start < chars.len() && is_punct_char(chars[start]) {
        out.push(chars[start].to_string());
        start += 1;
    }
    if start == chars.len() {
        return;
    }
    let mut end = chars.len();
    let mut trailing = Vec::new();
    loop {
        let core: String = chars[start..end].iter().collect();
        if is_abbreviation(&core) || end == start || !is_punct_char(chars[end - 1]) {
            break;
        }
        trailing.push(chars[end - 1].to_string());
        end -= 1;
    }
    out.push(chars[start..end].iter().collect());
    out.extend(trailing.into_iter().rev());
}

fn starts_sentence(chunk: &str) -> bool {
    chunk.chars().find(|c| c.is_alphanumeric()).map(|c| c.is_uppercase() || c.is_ascii_digit()).unwrap_or(false)
}

/// Tokenizes `text` and groups tokens into sentences.
///
/// A sentence ends after a chunk whose trailing punctuation run contains
/// `.`, `!` or `?`, when the next chunk begins with an uppercase letter or a
/// digit. Listed abbreviations never end a sentence.
pub fn split_sentences(text: &str) -> Vec<Vec<String>> {
    let chunks: Vec<&str> = text.split_whitespace().collect();
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for (i, chunk) in chunks.iter().enumerate() {
        let before = current.len();
        tokenize_chunk(chunk, &mut current);
        let ends_with_terminal = current[before..]
            .iter()
            .rev()
            .take_while(|t| is_punct_token(t))
            .any(|t| t.chars().any(|c| TERMINALS.contains(&c)));
        let boundary = match chunks.get(i + 1) {
            Some(next) => ends_with_terminal && starts_sentence(next),
            None => true,
        };
        if boundary && !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }
    sentences
}

/// Word tokens of `text` (punctuation tokens excluded), in order.
pub fn tokenize_words(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut tokens);
    }
    tokens.retain(|t| !is_punct_token(t));
    tokens
}

pub fn word_count(text: &str) -> usize {
    tokenize_words(text).len()
}
