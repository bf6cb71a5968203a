//! Converters from the CLIFF and GD21 public annotation releases into
//! the native JSONL record format.
//!
//! Both releases label summaries at the word level; character offsets are
//! recovered by matching words left-to-right against the summary string
//! (or by space-joining when only the word list is given).

use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use crate::corpus::{AnnotatedPair, Dataset, ErrorType, PosTag, Token};
use crate::error::{Error, Result};

/// One record of the CLIFF word-level release.
///
/// `word_labels` values: "correct", "extrinsic", "intrinsic",
/// "world_knowledge". `pos` is optional; missing tags become "other".
#[derive(Debug, Deserialize)]
pub struct CliffRecord {
    pub id: String,
    #[serde(default)]
    pub model: String,
    pub document: String,
    #[serde(default)]
    pub summary: Option<String>,
    pub summary_words: Vec<String>,
    pub word_labels: Vec<String>,
    #[serde(default)]
    pub pos: Option<Vec<String>>,
}

/// One record of the GD21 word-level release. `labels`: 1 = factual.
#[derive(Debug, Deserialize)]
pub struct Gd21Record {
    pub id: String,
    #[serde(default)]
    pub model: String,
    #[serde(rename = "article")]
    pub document: String,
    #[serde(default)]
    pub summary: Option<String>,
    pub words: Vec<String>,
    pub labels: Vec<u8>,
    #[serde(default)]
    pub error_types: Option<Vec<String>>,
    #[serde(default)]
    pub pos: Option<Vec<String>>,
}

fn parse_pos(tag: &str) -> PosTag {
    match tag {
        "noun" | "NOUN" => PosTag::Noun,
        "proper-noun" | "PROPN" => PosTag::ProperNoun,
        "number" | "NUM" => PosTag::Number,
        "adjective" | "ADJ" => PosTag::Adjective,
        "pronoun" | "PRON" => PosTag::Pronoun,
        "verb" | "VERB" => PosTag::Verb,
        "auxiliary" | "AUX" => PosTag::Auxiliary,
        "adposition" | "ADP" => PosTag::Adposition,
        "punctuation" | "PUNCT" => PosTag::Punctuation,
        "particle" | "PART" => PosTag::Particle,
        _ => PosTag::Other,
    }
}

fn parse_error_type(label: &str, line: usize) -> Result<ErrorType> {
    match label {
        "correct" | "none" => Ok(ErrorType::None),
        "extrinsic" => Ok(ErrorType::Extrinsic),
        "intrinsic" => Ok(ErrorType::Intrinsic),
        "world_knowledge" | "world knowledge" => Ok(ErrorType::WorldKnowledge),
        other => Err(Error::Malformed {
            line,
            message: format!("unknown word label '{other}'"),
        }),
    }
}

/// Align `words` against `summary`, returning (start, end) per word.
fn align_words(summary: &str, words: &[String], line: usize) -> Result<Vec<(usize, usize)>> {
    let mut offsets = Vec::with_capacity(words.len());
    let mut cursor = 0usize;
    for word in words {
        match summary[cursor..].find(word.as_str()) {
            Some(rel) => {
                let start = cursor + rel;
                offsets.push((start, start + word.len()));
                cursor = start + word.len();
            }
            None => {
                return Err(Error::Malformed {
                    line,
                    message: format!("word '{word}' not found in summary after offset {cursor}"),
                })
            }
        }
    }
    Ok(offsets)
}

fn build_pair(
    pair_id: String,
    dataset_name: &str,
    model: String,
    document: String,
    summary: Option<String>,
    words: &[String],
    errors: Vec<ErrorType>,
    pos: Option<&Vec<String>>,
    line: usize,
) -> Result<AnnotatedPair> {
    if let Some(pos) = pos {
        if pos.len() != words.len() {
            return Err(Error::Malformed {
                line,
                message: format!("{} POS tags for {} words", pos.len(), words.len()),
            });
        }
    }
    let summary = summary.unwrap_or_else(|| words.join(" "));
    let offsets = align_words(&summary, words, line)?;
    let tokens = words
        .iter()
        .zip(&offsets)
        .zip(&errors)
        .enumerate()
        .map(|(i, ((word, &(start, end)), &error_type))| Token {
            text: word.clone(),
            start,
            end,
            pos: pos.map_or(PosTag::Other, |p| parse_pos(&p[i])),
            label: u8::from(error_type == ErrorType::None),
            error_type,
        })
        .collect();
    let pair = AnnotatedPair {
        pair_id,
        dataset_name: dataset_name.to_string(),
        model_name: model,
        document,
        summary,
        tokens,
    };
    pair.validate()?;
    Ok(pair)
}

/// Convert a CLIFF release file (JSONL) into a native dataset.
pub fn convert_cliff(path: impl AsRef<Path>, dataset_name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut pairs = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CliffRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if rec.word_labels.len() != rec.summary_words.len() {
            return Err(Error::Malformed {
                line: line_no,
                message: format!(
                    "{} labels for {} words",
                    rec.word_labels.len(),
                    rec.summary_words.len()
                ),
            });
        }
        let errors = rec
            .word_labels
            .iter()
            .map(|l| parse_error_type(l, line_no))
            .collect::<Result<Vec<_>>>()?;
        pairs.push(build_pair(
            rec.id,
            dataset_name,
            rec.model,
            rec.document,
            rec.summary,
            &rec.summary_words,
            errors,
            rec.pos.as_ref(),
            line_no,
        )?);
    }
    Ok(Dataset {
        name: dataset_name.to_string(),
        pairs,
    })
}

/// Convert a GD21 release file (JSONL) into a native dataset.
///
/// GD21 labels are binary; non-factual words without an error-type column
/// are recorded as extrinsic, the dominant class for XSum summaries.
pub fn convert_gd21(path: impl AsRef<Path>, dataset_name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut pairs = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Gd21Record = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if rec.labels.len() != rec.words.len() {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("{} labels for {} words", rec.labels.len(), rec.words.len()),
            });
        }
        let errors = match &rec.error_types {
            Some(types) => {
                if types.len() != rec.words.len() {
                    return Err(Error::Malformed {
                        line: line_no,
                        message: format!(
                            "{} error types for {} words",
                            types.len(),
                            rec.words.len()
                        ),
                    });
                }
                types
                    .iter()
                    .map(|t| parse_error_type(t, line_no))
                    .collect::<Result<Vec<_>>>()?
            }
            None => rec
                .labels
                .iter()
                .map(|&l| {
                    if l == 1 {
                        ErrorType::None
                    } else {
                        ErrorType::Extrinsic
                    }
                })
                .collect(),
        };
        pairs.push(build_pair(
            rec.id,
            dataset_name,
            rec.model,
            rec.document,
            rec.summary,
            &rec.words,
            errors,
            rec.pos.as_ref(),
            line_no,
        )?);
    }
    Ok(Dataset {
        name: dataset_name.to_string(),
        pairs,
    })
}
