//! Annotated factuality datasets: loading, gold-label derivation, splits,
//! and dataset statistics.
//!
//! The native format is one JSON object per line (see [`PairRecord`]).
//! Converters from the CLIFF and GD21 public releases live in
//! [`convert`].

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod convert;

/// Coarse part-of-speech tagset. These are the eleven categories the
/// reports break ignored tokens down by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosTag {
    Noun,
    ProperNoun,
    Number,
    Adjective,
    Pronoun,
    Verb,
    Auxiliary,
    Adposition,
    Punctuation,
    Particle,
    Other,
}

impl PosTag {
    /// Tags selected by the exact-match baseline.
    pub fn is_em_selected(self) -> bool {
        matches!(
            self,
            PosTag::Noun | PosTag::ProperNoun | PosTag::Number | PosTag::Adjective | PosTag::Pronoun
        )
    }

    /// Content categories used for inherited-error matching.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            PosTag::Noun
                | PosTag::ProperNoun
                | PosTag::Number
                | PosTag::Adjective
                | PosTag::Verb
                | PosTag::Pronoun
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            PosTag::Noun => "noun",
            PosTag::ProperNoun => "proper-noun",
            PosTag::Number => "number",
            PosTag::Adjective => "adjective",
            PosTag::Pronoun => "pronoun",
            PosTag::Verb => "verb",
            PosTag::Auxiliary => "auxiliary",
            PosTag::Adposition => "adposition",
            PosTag::Punctuation => "punctuation",
            PosTag::Particle => "particle",
            PosTag::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorType {
    None,
    Extrinsic,
    Intrinsic,
    WorldKnowledge,
}

impl ErrorType {
    /// World-knowledge errors are folded into the extrinsic class in all
    /// analyses; storage keeps them distinct.
    pub fn as_analysis_extrinsic(self) -> bool {
        matches!(self, ErrorType::Extrinsic | ErrorType::WorldKnowledge)
    }
}

/// A summary token with character offsets and gold factuality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub pos: PosTag,
    /// 1 = factual.
    pub label: u8,
    pub error_type: ErrorType,
}

impl Token {
    pub fn is_factual(&self) -> bool {
        self.label == 1
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start < end && start < self.end
    }
}

/// A (document, summary) pair with token-level gold labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotatedPair {
    pub pair_id: String,
    #[serde(rename = "dataset")]
    pub dataset_name: String,
    #[serde(rename = "model")]
    pub model_name: String,
    pub document: String,
    pub summary: String,
    pub tokens: Vec<Token>,
}

impl AnnotatedPair {
    /// Validate token offsets, ordering, and label/error-type consistency.
    pub fn validate(&self) -> Result<()> {
        let mut prev_end = 0usize;
        for tok in &self.tokens {
            if tok.start >= tok.end || tok.end > self.summary.len() {
                return Err(Error::Invariant {
                    pair_id: self.pair_id.clone(),
                    message: format!(
                        "token '{}' has invalid offsets [{}, {})",
                        tok.text, tok.start, tok.end
                    ),
                });
            }
            if tok.start < prev_end {
                return Err(Error::Invariant {
                    pair_id: self.pair_id.clone(),
                    message: format!("token '{}' overlaps or is out of order", tok.text),
                });
            }
            prev_end = tok.end;
            let slice = &self.summary[tok.start..tok.end];
            if slice != tok.text {
                return Err(Error::Invariant {
                    pair_id: self.pair_id.clone(),
                    message: format!(
                        "token text '{}' does not match summary substring '{}' at [{}, {})",
                        tok.text, slice, tok.start, tok.end
                    ),
                });
            }
            let consistent = (tok.label == 1) == (tok.error_type == ErrorType::None);
            if !consistent {
                return Err(Error::Invariant {
                    pair_id: self.pair_id.clone(),
                    message: format!(
                        "token '{}' label {} inconsistent with error type {:?}",
                        tok.text, tok.label, tok.error_type
                    ),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub pairs: Vec<AnnotatedPair>,
}

impl Dataset {
    pub fn pair(&self, pair_id: &str) -> Result<&AnnotatedPair> {
        self.pairs
            .iter()
            .find(|p| p.pair_id == pair_id)
            .ok_or_else(|| Error::UnknownPair(pair_id.to_string()))
    }
}

/// Native record schema, one JSON object per line.
pub type PairRecord = AnnotatedPair;

/// Load a native-format JSONL dataset, validating every record.
pub fn load_dataset(path: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let reader = std::io::BufReader::new(file);
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: AnnotatedPair = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: idx + 1,
            message: e.to_string(),
        })?;
        pair.validate().map_err(|e| Error::Malformed {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(pair.pair_id.clone()) {
            return Err(Error::Malformed {
                line: idx + 1,
                message: format!("duplicate pair_id {}", pair.pair_id),
            });
        }
        pairs.push(pair);
    }
    if pairs.is_empty() {
        eprintln!("warning: dataset {name} loaded from {} is empty", path.display());
    }
    Ok(Dataset {
        name: name.to_string(),
        pairs,
    })
}

/// Write a dataset in the native JSONL format.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for pair in &dataset.pairs {
        out.push_str(&serde_json::to_string(pair).expect("pair serializes"));
        out.push('\n');
    }
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

/// Summary-level gold label: 1 iff every token is factual.
pub fn derive_summary_gold(pair: &AnnotatedPair) -> Result<u8> {
    if pair.tokens.is_empty() {
        return Err(Error::Empty(format!("pair {} has no tokens", pair.pair_id)));
    }
    Ok(u8::from(pair.tokens.iter().all(Token::is_factual)))
}

/// Span-level gold label: 1 iff every token overlapping [start, end) is
/// factual. Errors if the span overlaps no token.
pub fn derive_span_gold(start: usize, end: usize, pair: &AnnotatedPair) -> Result<u8> {
    let mut any = false;
    let mut all_factual = true;
    for tok in &pair.tokens {
        if tok.overlaps(start, end) {
            any = true;
            all_factual &= tok.is_factual();
        }
    }
    if !any {
        return Err(Error::Invariant {
            pair_id: pair.pair_id.clone(),
            message: format!("span [{start}, {end}) overlaps no annotated token"),
        });
    }
    Ok(u8::from(all_factual))
}

/// Seeded shuffle then halve. Validation gets the larger half when the
/// count is odd.
pub fn split_dataset(dataset: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    if dataset.pairs.len() < 2 {
        return Err(Error::Empty(format!(
            "dataset {} has fewer than 2 pairs",
            dataset.name
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = dataset.pairs.clone();
    pairs.shuffle(&mut rng);
    let mid = pairs.len().div_ceil(2);
    let test = pairs.split_off(mid);
    Ok((
        Dataset {
            name: format!("{}-val", dataset.name),
            pairs,
        },
        Dataset {
            name: format!("{}-test", dataset.name),
            pairs: test,
        },
    ))
}

/// Dataset statistics at summary, span, and token granularity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub dataset: String,
    pub total_summaries: usize,
    pub pct_non_factual_summaries: f64,
    pub avg_spans_per_summary: f64,
    pub pct_non_factual_spans: f64,
    pub avg_tokens_per_summary: f64,
    pub pct_non_factual_tokens: f64,
    /// Share of non-factual tokens lying outside every candidate span.
    pub pct_ignored_non_factual: f64,
    /// POS breakdown of the ignored non-factual tokens, percentages
    /// summing to 100 over the ignored set.
    pub ignored_pos_breakdown: BTreeMap<String, f64>,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// Compute per-dataset statistics. `spans` holds the candidate span
/// character ranges per pair, aligned by index with `dataset.pairs`.
pub fn dataset_stats(dataset: &Dataset, spans: &[Vec<(usize, usize)>]) -> Result<StatsReport> {
    if dataset.pairs.is_empty() {
        eprintln!("warning: dataset_stats on empty dataset {}", dataset.name);
        return Ok(StatsReport {
            dataset: dataset.name.clone(),
            total_summaries: 0,
            pct_non_factual_summaries: 0.0,
            avg_spans_per_summary: 0.0,
            pct_non_factual_spans: 0.0,
            avg_tokens_per_summary: 0.0,
            pct_non_factual_tokens: 0.0,
            pct_ignored_non_factual: 0.0,
            ignored_pos_breakdown: BTreeMap::new(),
        });
    }
    let n = dataset.pairs.len();
    let mut nf_summaries = 0usize;
    let mut total_spans = 0usize;
    let mut nf_spans = 0usize;
    let mut total_tokens = 0usize;
    let mut nf_tokens = 0usize;
    let mut ignored_nf = 0usize;
    let mut ignored_pos: BTreeMap<String, usize> = BTreeMap::new();
    for (pair, pair_spans) in dataset.pairs.iter().zip(spans) {
        if derive_summary_gold(pair)? == 0 {
            nf_summaries += 1;
        }
        total_spans += pair_spans.len();
        for &(s, e) in pair_spans {
            if derive_span_gold(s, e, pair)? == 0 {
                nf_spans += 1;
            }
        }
        total_tokens += pair.tokens.len();
        for tok in &pair.tokens {
            if tok.is_factual() {
                continue;
            }
            nf_tokens += 1;
            let covered = pair_spans.iter().any(|&(s, e)| tok.overlaps(s, e));
            if !covered {
                ignored_nf += 1;
                *ignored_pos.entry(tok.pos.name().to_string()).or_insert(0) += 1;
            }
        }
    }
    let ignored_pos_breakdown = ignored_pos
        .into_iter()
        .map(|(k, v)| (k, pct(v, ignored_nf)))
        .collect();
    Ok(StatsReport {
        dataset: dataset.name.clone(),
        total_summaries: n,
        pct_non_factual_summaries: pct(nf_summaries, n),
        avg_spans_per_summary: total_spans as f64 / n as f64,
        pct_non_factual_spans: pct(nf_spans, total_spans),
        avg_tokens_per_summary: total_tokens as f64 / n as f64,
        pct_non_factual_tokens: pct(nf_tokens, total_tokens),
        pct_ignored_non_factual: pct(ignored_nf, nf_tokens),
        ignored_pos_breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{pair_from_words, W};

    #[test]
    fn summary_gold_all_factual() {
        let pair = pair_from_words(
            "p1",
            "doc",
            &[W::noun("cats"), W::verb("sleep")],
        );
        assert_eq!(derive_summary_gold(&pair).unwrap(), 1);
    }

    #[test]
    fn summary_gold_single_error() {
        let pair = pair_from_words(
            "p1",
            "doc",
            &[W::noun("cats"), W::verb("sleep").extrinsic()],
        );
        assert_eq!(derive_summary_gold(&pair).unwrap(), 0);
        let all_bad = pair_from_words(
            "p2",
            "doc",
            &[W::noun("cats").extrinsic(), W::verb("sleep").extrinsic()],
        );
        assert_eq!(derive_summary_gold(&all_bad).unwrap(), 0);
    }

    #[test]
    fn summary_gold_empty_errors() {
        let pair = AnnotatedPair {
            pair_id: "p".into(),
            dataset_name: "d".into(),
            model_name: "m".into(),
            document: String::new(),
            summary: String::new(),
            tokens: vec![],
        };
        assert!(derive_summary_gold(&pair).is_err());
    }

    #[test]
    fn span_gold_cases() {
        // "John Smith lied" with "lied" extrinsic
        let pair = pair_from_words(
            "p1",
            "doc",
            &[W::propn("John"), W::propn("Smith"), W::verb("lied").extrinsic()],
        );
        // span over "John Smith"
        assert_eq!(derive_span_gold(0, 10, &pair).unwrap(), 1);
        // span over "Smith lied"
        assert_eq!(derive_span_gold(5, 15, &pair).unwrap(), 0);
        // span exactly "lied"
        assert_eq!(derive_span_gold(11, 15, &pair).unwrap(), 0);
        // span overlapping no token
        assert!(derive_span_gold(15, 16, &pair).is_err());
    }

    #[test]
    fn split_is_deterministic_partition() {
        let pairs: Vec<AnnotatedPair> = (0..46)
            .map(|i| pair_from_words(&format!("p{i}"), "doc", &[W::noun("cats")]))
            .collect();
        let ds = Dataset {
            name: "d".into(),
            pairs,
        };
        let (val, test) = split_dataset(&ds, 7).unwrap();
        assert_eq!(val.pairs.len(), 23);
        assert_eq!(test.pairs.len(), 23);
        let mut ids: Vec<&str> = val
            .pairs
            .iter()
            .chain(&test.pairs)
            .map(|p| p.pair_id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 46);
        let (val2, test2) = split_dataset(&ds, 7).unwrap();
        let as_ids = |d: &Dataset| d.pairs.iter().map(|p| p.pair_id.clone()).collect::<Vec<_>>();
        assert_eq!(as_ids(&val), as_ids(&val2));
        assert_eq!(as_ids(&test), as_ids(&test2));
    }

    #[test]
    fn split_odd_sizes() {
        let pairs: Vec<AnnotatedPair> = (0..3)
            .map(|i| pair_from_words(&format!("p{i}"), "doc", &[W::noun("cats")]))
            .collect();
        let ds = Dataset {
            name: "d".into(),
            pairs,
        };
        let (val, test) = split_dataset(&ds, 0).unwrap();
        assert_eq!(val.pairs.len(), 2);
        assert_eq!(test.pairs.len(), 1);
    }

    #[test]
    fn stats_basic_fixture() {
        let factual = pair_from_words("p1", "doc", &[W::noun("cats"), W::verb("sleep")]);
        let broken = pair_from_words(
            "p2",
            "doc",
            &[W::noun("cats"), W::verb("fly").extrinsic()],
        );
        let ds = Dataset {
            name: "d".into(),
            pairs: vec![factual, broken],
        };
        // only span: "cats" in each summary
        let spans = vec![vec![(0, 4)], vec![(0, 4)]];
        let stats = dataset_stats(&ds, &spans).unwrap();
        assert_eq!(stats.total_summaries, 2);
        assert!((stats.pct_non_factual_summaries - 50.0).abs() < 1e-9);
        // the extrinsic verb lies outside every span
        assert!((stats.pct_ignored_non_factual - 100.0).abs() < 1e-9);
        assert!((stats.ignored_pos_breakdown["verb"] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn stats_ignored_fraction_half() {
        // one non-factual verb outside spans, one non-factual proper noun inside
        let pair = pair_from_words(
            "p1",
            "doc",
            &[W::propn("Mars").extrinsic(), W::verb("fell").extrinsic()],
        );
        let ds = Dataset {
            name: "d".into(),
            pairs: vec![pair],
        };
        let spans = vec![vec![(0, 4)]];
        let stats = dataset_stats(&ds, &spans).unwrap();
        assert!((stats.pct_ignored_non_factual - 50.0).abs() < 1e-9);
    }

    #[test]
    fn load_rejects_offset_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let rec = r#"{"pair_id":"p1","dataset":"d","model":"m","document":"x","summary":"cats sleep","tokens":[{"text":"dogs","start":0,"end":4,"pos":"noun","label":1,"error_type":"none"}]}"#;
        std::fs::write(&path, rec).unwrap();
        let err = load_dataset(&path, "d").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn load_roundtrip_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.jsonl");
        let ds = Dataset {
            name: "d".into(),
            pairs: vec![
                pair_from_words("p1", "doc one", &[W::noun("cats")]),
                pair_from_words("p2", "doc two", &[W::noun("dogs")]),
            ],
        };
        save_dataset(&ds, &path).unwrap();
        let loaded = load_dataset(&path, "d").unwrap();
        assert_eq!(loaded.pairs.len(), 2);

        let empty = dir.path().join("empty.jsonl");
        std::fs::write(&empty, "").unwrap();
        let loaded = load_dataset(&empty, "d").unwrap();
        assert!(loaded.pairs.is_empty());
    }
}
