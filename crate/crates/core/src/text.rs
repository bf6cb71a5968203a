//! Shared text utilities: answer normalization, word/sentence segmentation
//! over character offsets.

/// A word together with its character span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Split `text` into whitespace-delimited words, keeping character offsets.
pub fn words(text: &str) -> Vec<Word> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word {
                    text: text[s..i].to_string(),
                    start: s,
                    end: i,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Word {
            text: text[s..].to_string(),
            start: s,
            end: text.len(),
        });
    }
    out
}

/// Lowercase and strip punctuation and leading articles ("a", "an", "the").
///
/// This is the answer-match normalization used by the question-filtering
/// step and by lexical overlap scoring. Inner whitespace is collapsed.
pub fn normalize_answer(text: &str) -> String {
    let lowered = text.to_lowercase();
    let depunct: String = lowered
        .chars()
        .map(|c| if c.is_ascii_punctuation() { ' ' } else { c })
        .collect();
    let mut toks: Vec<&str> = depunct.split_whitespace().collect();
    while let Some(first) = toks.first() {
        if matches!(*first, "a" | "an" | "the") {
            toks.remove(0);
        } else {
            break;
        }
    }
    toks.join(" ")
}

/// Normalize a single word: lowercase and trim outer punctuation.
pub fn normalize_word(text: &str) -> String {
    text.trim_matches(|c: char| c.is_ascii_punctuation())
        .to_lowercase()
}

/// Normalized word tokens of a longer text, empty tokens dropped.
pub fn normalized_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .collect()
}

/// Sentence boundaries as character ranges. A sentence ends after `.`, `!`
/// or `?` followed by whitespace or end of text.
pub fn sentence_ranges(text: &str) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut start = 0usize;
    let bytes = text.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if matches!(c, '.' | '!' | '?') {
            let next = i + 1;
            if next >= bytes.len() || (bytes[next] as char).is_whitespace() {
                ranges.push((start, next));
                // skip whitespace to next sentence start
                let mut j = next;
                while j < bytes.len() && (bytes[j] as char).is_whitespace() {
                    j += 1;
                }
                start = j;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    if start < text.len() {
        ranges.push((start, text.len()));
    }
    ranges
}

/// The sentence range containing character position `pos`.
pub fn sentence_containing(text: &str, pos: usize) -> (usize, usize) {
    for (s, e) in sentence_ranges(text) {
        if pos >= s && pos < e {
            return (s, e);
        }
    }
    (0, text.len())
}

/// Token-level F1 between two normalized answer strings.
pub fn token_f1(a: &str, b: &str) -> f64 {
    let ta: Vec<&str> = a.split_whitespace().collect();
    let tb: Vec<&str> = b.split_whitespace().collect();
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let mut counts = std::collections::HashMap::new();
    for t in &ta {
        *counts.entry(*t).or_insert(0usize) += 1;
    }
    let mut overlap = 0usize;
    for t in &tb {
        if let Some(c) = counts.get_mut(*t) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / tb.len() as f64;
    let r = overlap as f64 / ta.len() as f64;
    2.0 * p * r / (p + r)
}
