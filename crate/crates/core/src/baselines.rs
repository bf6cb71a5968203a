//! Exact-match baseline and ingestion of externally produced token-level
//! factuality scores, with token-to-span conversion.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotate::CandidateSpan;
use crate::corpus::{AnnotatedPair, Dataset, Token};
use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSource {
    Em,
    External,
}

/// Token-level factuality scores for one pair, keyed by token index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenScoreSet {
    pub pair_id: String,
    pub scores: BTreeMap<usize, f64>,
    pub source: ScoreSource,
}

/// Exact-match scores for one pair plus the summary-level fraction.
#[derive(Debug, Clone)]
pub struct EmResult {
    pub token_scores: TokenScoreSet,
    pub summary_score: f64,
}

fn document_word_set(document: &str) -> HashSet<String> {
    text::normalized_words(document).into_iter().collect()
}

/// Token scores 1 when the normalized token occurs as a whole word in
/// the document; summary score is the factual fraction over the
/// selected tokens. Pairs selecting zero tokens score 1 with a warning.
pub fn em_scores(pair: &AnnotatedPair, em_tokens: &[&Token]) -> EmResult {
    let doc_words = document_word_set(&pair.document);
    let mut scores = BTreeMap::new();
    let mut factual = 0usize;
    for tok in em_tokens {
        let index = pair
            .tokens
            .iter()
            .position(|t| std::ptr::eq(t, *tok))
            .expect("em token belongs to pair");
        let hit = doc_words.contains(&text::normalize_word(&tok.text));
        scores.insert(index, f64::from(u8::from(hit)));
        factual += usize::from(hit);
    }
    let summary_score = if em_tokens.is_empty() {
        eprintln!(
            "warning: pair {} selected no EM tokens, summary score defaults to 1",
            pair.pair_id
        );
        1.0
    } else {
        factual as f64 / em_tokens.len() as f64
    };
    EmResult {
        token_scores: TokenScoreSet {
            pair_id: pair.pair_id.clone(),
            scores,
            source: ScoreSource::Em,
        },
        summary_score,
    }
}

/// Outcome of token-to-span conversion, with a counter for spans that
/// overlapped no scored token and inherited the factual label.
#[derive(Debug, Clone, Default)]
pub struct SpanConversion {
    pub span_scores: BTreeMap<String, f64>,
    pub unscored_spans: usize,
}

/// Span score = min over overlapping tokens of the binarized token
/// score (threshold: score < t means non-factual). A span overlapping
/// no scored token gets 1.
pub fn token_scores_to_span_scores(
    token_scores: &TokenScoreSet,
    spans: &[CandidateSpan],
    pair: &AnnotatedPair,
    binarize_threshold: f64,
) -> Result<SpanConversion> {
    let mut out = SpanConversion::default();
    for span in spans {
        if span.end > pair.summary.len() {
            return Err(Error::Invariant {
                pair_id: pair.pair_id.clone(),
                message: format!("span {} outside summary", span.span_id),
            });
        }
        let mut any = false;
        let mut label = 1.0f64;
        for (&index, &score) in &token_scores.scores {
            let tok = pair.tokens.get(index).ok_or_else(|| Error::Alignment {
                pair_id: pair.pair_id.clone(),
                index,
                message: "score index beyond token list".into(),
            })?;
            if tok.overlaps(span.start, span.end) {
                any = true;
                if score < binarize_threshold {
                    label = 0.0;
                }
            }
        }
        if !any {
            out.unscored_spans += 1;
        }
        out.span_scores.insert(span.span_id.clone(), label);
    }
    Ok(out)
}

/// External token-score record: one JSON object per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalScoreRecord {
    pub pair_id: String,
    pub scores: Vec<f64>,
    pub token_digests: Vec<String>,
}

pub fn token_digest(token_text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(token_text.as_bytes());
    let out = hasher.finalize();
    out.iter().take(4).map(|b| format!("{b:02x}")).collect()
}

/// Load external token scores, verifying pair ids, token counts, score
/// range, and token-text digests.
pub fn load_external_token_scores(
    path: impl AsRef<Path>,
    dataset: &Dataset,
) -> Result<Vec<TokenScoreSet>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExternalScoreRecord =
            serde_json::from_str(&line).map_err(|e| Error::Malformed {
                line: idx + 1,
                message: e.to_string(),
            })?;
        let pair = dataset.pair(&rec.pair_id)?;
        if rec.scores.len() != pair.tokens.len() {
            return Err(Error::Alignment {
                pair_id: rec.pair_id.clone(),
                index: rec.scores.len().min(pair.tokens.len()),
                message: format!(
                    "{} scores for {} tokens",
                    rec.scores.len(),
                    pair.tokens.len()
                ),
            });
        }
        if rec.token_digests.len() != pair.tokens.len() {
            return Err(Error::Alignment {
                pair_id: rec.pair_id.clone(),
                index: rec.token_digests.len().min(pair.tokens.len()),
                message: "digest count mismatch".into(),
            });
        }
        for (i, (digest, tok)) in rec.token_digests.iter().zip(&pair.tokens).enumerate() {
            if *digest != token_digest(&tok.text) {
                return Err(Error::Alignment {
                    pair_id: rec.pair_id.clone(),
                    index: i,
                    message: format!("token digest mismatch at '{}'", tok.text),
                });
            }
        }
        for (i, &score) in rec.scores.iter().enumerate() {
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::Alignment {
                    pair_id: rec.pair_id.clone(),
                    index: i,
                    message: format!("score {score} outside [0, 1]"),
                });
            }
        }
        out.push(TokenScoreSet {
            pair_id: rec.pair_id,
            scores: rec.scores.into_iter().enumerate().collect(),
            source: ScoreSource::External,
        });
    }
    Ok(out)
}

/// Export helper for producing aligned external-score files.
pub fn external_record(pair: &AnnotatedPair, scores: Vec<f64>) -> ExternalScoreRecord {
    ExternalScoreRecord {
        pair_id: pair.pair_id.clone(),
        token_digests: pair.tokens.iter().map(|t| token_digest(&t.text)).collect(),
        scores,
    }
}
