//! The five-step span-based factuality metric: candidate spans in,
//! span- and summary-level verdicts out.
//!
//! Two scoring conventions are supported. QE-style averages lexical
//! overlap, a semantic scorer, and the answerability probability into
//! [0, 1] and keeps several questions per span. QAFE-style uses a
//! learned answer scorer in [0, 5] and scores unanswerable spans 0.
//! Spans whose questions are all discarded during filtering receive a
//! sentinel above the maximum score (1.0 QE, 6.0 QAFE), encoding "no
//! error detected".

use serde::{Deserialize, Serialize};

use crate::annotate::CandidateSpan;
use crate::backends::{Answer, Question, QuestionAnswerer, QuestionGenerator};
use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::exec;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricStyle {
    Qe,
    Qafe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnanswerableRule {
    ScoreZero,
    UseComponents,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricConfig {
    pub style: MetricStyle,
    pub filtered_span_sentinel: f64,
    pub unanswerable_rule: UnanswerableRule,
    pub score_range: (f64, f64),
}

impl MetricConfig {
    pub fn qe() -> Self {
        MetricConfig {
            style: MetricStyle::Qe,
            filtered_span_sentinel: 1.0,
            unanswerable_rule: UnanswerableRule::UseComponents,
            score_range: (0.0, 1.0),
        }
    }

    pub fn qafe() -> Self {
        MetricConfig {
            style: MetricStyle::Qafe,
            filtered_span_sentinel: 6.0,
            unanswerable_rule: UnanswerableRule::ScoreZero,
            score_range: (0.0, 5.0),
        }
    }
}

/// Pluggable answer-similarity scorer (semantic or learned). Scores must
/// stay within the range the scorer declares.
pub trait AnswerScorer: Send + Sync {
    fn id(&self) -> &str;
    fn range(&self) -> (f64, f64);
    fn score(&self, predicted_text: &str, expected_text: &str) -> f64;
}

/// Character-trigram Dice similarity in [0, 1]; stands in for an
/// embedding-based scorer at desk scale.
#[derive(Debug, Default, Clone)]
pub struct TrigramScorer;

impl AnswerScorer for TrigramScorer {
    fn id(&self) -> &str {
        "trigram-dice"
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn score(&self, predicted_text: &str, expected_text: &str) -> f64 {
        let grams = |s: &str| -> std::collections::HashSet<Vec<char>> {
            let padded: Vec<char> = format!("  {s} ").chars().collect();
            padded.windows(3).map(|w| w.to_vec()).collect()
        };
        let a = grams(&text::normalize_answer(predicted_text));
        let b = grams(&text::normalize_answer(expected_text));
        if a.is_empty() && b.is_empty() {
            return 1.0;
        }
        let inter = a.intersection(&b).count();
        2.0 * inter as f64 / (a.len() + b.len()) as f64
    }
}

/// Token-F1 rescaled to [0, 5]; stands in for a learned answer-match
/// regressor at desk scale.
#[derive(Debug, Default, Clone)]
pub struct ScaledOverlapScorer;

impl AnswerScorer for ScaledOverlapScorer {
    fn id(&self) -> &str {
        "scaled-overlap"
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 5.0)
    }

    fn score(&self, predicted_text: &str, expected_text: &str) -> f64 {
        5.0 * text::token_f1(
            &text::normalize_answer(predicted_text),
            &text::normalize_answer(expected_text),
        )
    }
}

/// The scorers a metric config draws on.
pub struct Scorers {
    pub semantic: Box<dyn AnswerScorer>,
    pub learned: Box<dyn AnswerScorer>,
}

impl Default for Scorers {
    fn default() -> Self {
        Scorers {
            semantic: Box::new(TrigramScorer),
            learned: Box::new(ScaledOverlapScorer),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanStatus {
    Scored,
    Filtered,
    Unanswerable,
    Errored,
}

/// Everything the pipeline did for one question: filtering answer from
/// the summary, document answer, and per-question score.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub question: Question,
    pub kept: bool,
    pub summary_answer: Answer,
    #[serde(default)]
    pub document_answer: Option<Answer>,
    #[serde(default)]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanVerdict {
    pub span_id: String,
    pub pair_id: String,
    pub start: usize,
    pub end: usize,
    pub gold_label: u8,
    pub score: f64,
    pub status: SpanStatus,
    pub questions: Vec<QuestionRecord>,
    #[serde(default)]
    pub error: Option<String>,
}

impl SpanVerdict {
    pub fn question_ids_used(&self) -> Vec<&str> {
        self.questions
            .iter()
            .filter(|q| q.kept)
            .map(|q| q.question.question_id.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryVerdict {
    pub pair_id: String,
    pub score: f64,
    pub span_verdicts: Vec<SpanVerdict>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub pairs_scored: usize,
    pub pairs_excluded: usize,
    pub spans_scored: usize,
    pub spans_filtered: usize,
    pub spans_unanswerable: usize,
    pub spans_errored: usize,
    pub questions_generated: usize,
    pub questions_kept: usize,
}

impl RunReport {
    pub fn total_spans(&self) -> usize {
        self.spans_scored + self.spans_filtered + self.spans_unanswerable + self.spans_errored
    }
}

/// Step 3: keep a question iff the summary-context answer matches the
/// target span after normalization.
pub fn filter_questions(
    span: &CandidateSpan,
    questions: Vec<Question>,
    qa: &dyn QuestionAnswerer,
    summary: &str,
) -> Result<Vec<(Question, Answer, bool)>> {
    let want = text::normalize_answer(&span.text);
    let mut out = Vec::with_capacity(questions.len());
    for question in questions {
        let answer = qa
            .answer(&question, summary)
            .map_err(|e| Error::Backend(format!("{} ({e})", question.question_id)))?;
        let kept = !answer.unanswerable && text::normalize_answer(&answer.text) == want;
        out.push((question, answer, kept));
    }
    Ok(out)
}

/// Step 5 per question: similarity between the predicted answer and the
/// expected span under the configured convention.
pub fn compare_answers(
    predicted: &Answer,
    expected: &CandidateSpan,
    config: &MetricConfig,
    scorers: &Scorers,
) -> Result<f64> {
    let check = |value: f64, (lo, hi): (f64, f64), id: &str| -> Result<f64> {
        if value < lo - 1e-9 || value > hi + 1e-9 {
            return Err(Error::Backend(format!(
                "scorer {id} produced {value} outside [{lo}, {hi}]"
            )));
        }
        Ok(value.clamp(lo, hi))
    };
    match config.style {
        MetricStyle::Qe => {
            let overlap = text::token_f1(
                &text::normalize_answer(&predicted.text),
                &text::normalize_answer(&expected.text),
            );
            let semantic = check(
                scorers.semantic.score(&predicted.text, &expected.text),
                scorers.semantic.range(),
                scorers.semantic.id(),
            )?;
            Ok((overlap + semantic + predicted.answerable_prob) / 3.0)
        }
        MetricStyle::Qafe => {
            if predicted.unanswerable && config.unanswerable_rule == UnanswerableRule::ScoreZero {
                return Ok(0.0);
            }
            check(
                scorers.learned.score(&predicted.text, &expected.text),
                scorers.learned.range(),
                scorers.learned.id(),
            )
        }
    }
}

/// Steps 4-5 for one span, after filtering.
pub fn score_span(
    span: &CandidateSpan,
    pair_id: &str,
    filtered: Vec<(Question, Answer, bool)>,
    qa: &dyn QuestionAnswerer,
    document: &str,
    config: &MetricConfig,
    scorers: &Scorers,
) -> SpanVerdict {
    let mut records: Vec<QuestionRecord> = Vec::with_capacity(filtered.len());
    let mut kept_scores = Vec::new();
    let mut kept_any = false;
    let mut all_unanswerable = true;
    let mut error = None;

    for (question, summary_answer, kept) in filtered {
        let mut record = QuestionRecord {
            question,
            kept,
            summary_answer,
            document_answer: None,
            score: None,
        };
        if kept && error.is_none() {
            kept_any = true;
            match qa.answer(&record.question, document) {
                Ok(doc_answer) => {
                    all_unanswerable &= doc_answer.unanswerable;
                    match compare_answers(&doc_answer, span, config, scorers) {
                        Ok(s) => {
                            kept_scores.push(s);
                            record.score = Some(s);
                        }
                        Err(e) => error = Some(e.to_string()),
                    }
                    record.document_answer = Some(doc_answer);
                }
                Err(e) => error = Some(format!("{}: {e}", record.question.question_id)),
            }
        }
        records.push(record);
    }

    let base = SpanVerdict {
        span_id: span.span_id.clone(),
        pair_id: pair_id.to_string(),
        start: span.start,
        end: span.end,
        gold_label: span.gold_label,
        score: 0.0,
        status: SpanStatus::Errored,
        questions: records,
        error: None,
    };

    if let Some(message) = error {
        return SpanVerdict {
            error: Some(message),
            ..base
        };
    }
    if !kept_any {
        return SpanVerdict {
            score: config.filtered_span_sentinel,
            status: SpanStatus::Filtered,
            ..base
        };
    }
    let score = kept_scores.iter().sum::<f64>() / kept_scores.len() as f64;
    let status = if config.style == MetricStyle::Qafe && all_unanswerable {
        SpanStatus::Unanswerable
    } else {
        SpanStatus::Scored
    };
    SpanVerdict {
        score,
        status,
        ..base
    }
}

/// Summary score: arithmetic mean of span scores, sentinels included.
/// Errored spans are excluded; a pair with only errored spans yields
/// None and is excluded upstream.
pub fn score_summary(pair_id: &str, span_verdicts: Vec<SpanVerdict>) -> Option<SummaryVerdict> {
    let usable: Vec<f64> = span_verdicts
        .iter()
        .filter(|v| v.status != SpanStatus::Errored)
        .map(|v| v.score)
        .collect();
    if usable.is_empty() {
        return None;
    }
    let score = usable.iter().sum::<f64>() / usable.len() as f64;
    Some(SummaryVerdict {
        pair_id: pair_id.to_string(),
        score,
        span_verdicts,
    })
}

/// Execute the full metric over a dataset. `spans` is aligned by index
/// with `dataset.pairs`. Pairs run in parallel; output order follows
/// input order, so runs are deterministic for replay/stub backends.
pub fn run_pipeline(
    dataset: &Dataset,
    spans: &[Vec<CandidateSpan>],
    qg: &dyn QuestionGenerator,
    qa: &dyn QuestionAnswerer,
    config: &MetricConfig,
    scorers: &Scorers,
) -> Result<(Vec<SummaryVerdict>, RunReport)> {
    if spans.len() != dataset.pairs.len() {
        return Err(Error::Config(format!(
            "{} span lists for {} pairs",
            spans.len(),
            dataset.pairs.len()
        )));
    }
    let indexed: Vec<usize> = (0..dataset.pairs.len()).collect();
    let per_pair: Vec<Result<Option<SummaryVerdict>>> = exec::map_slice(&indexed, |&i| {
        let pair = &dataset.pairs[i];
        let mut verdicts = Vec::with_capacity(spans[i].len());
        for span in &spans[i] {
            let questions = qg.generate(span, &pair.summary)?;
            let filtered = filter_questions(span, questions, qa, &pair.summary)?;
            verdicts.push(score_span(
                span,
                &pair.pair_id,
                filtered,
                qa,
                &pair.document,
                config,
                scorers,
            ));
        }
        if verdicts.is_empty() {
            eprintln!(
                "warning: pair {} has no candidate spans, excluded",
                pair.pair_id
            );
            return Ok(None);
        }
        Ok(score_summary(&pair.pair_id, verdicts))
    });

    let mut out = Vec::new();
    let mut report = RunReport::default();
    for result in per_pair {
        match result? {
            Some(verdict) => {
                for sv in &verdict.span_verdicts {
                    match sv.status {
                        SpanStatus::Scored => report.spans_scored += 1,
                        SpanStatus::Filtered => report.spans_filtered += 1,
                        SpanStatus::Unanswerable => report.spans_unanswerable += 1,
                        SpanStatus::Errored => report.spans_errored += 1,
                    }
                    report.questions_generated += sv.questions.len();
                    report.questions_kept += sv.questions.iter().filter(|q| q.kept).count();
                }
                report.pairs_scored += 1;
                out.push(verdict);
            }
            None => report.pairs_excluded += 1,
        }
    }
    Ok((out, report))
}

/// Serialize verdicts one JSON object per line.
pub fn write_verdicts(verdicts: &[SummaryVerdict], path: impl AsRef<std::path::Path>) -> Result<()> {
    let mut out = String::new();
    for v in verdicts {
        out.push_str(&serde_json::to_string(v).expect("verdict serializes"));
        out.push('\n');
    }
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

pub fn read_verdicts(path: impl AsRef<std::path::Path>) -> Result<Vec<SummaryVerdict>> {
    use std::io::BufRead;
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::Malformed {
                line: idx + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(out)
}
