//! Error analysis over pipeline verdicts: inherited-error detection in
//! generated questions, factual-span accuracy grouped by inheritance
//! category, question statistics, and evaluation restricted to the
//! common subset of spans every metric actually scored.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::backends::Question;
use crate::corpus::{derive_summary_gold, AnnotatedPair, Dataset, ErrorType};
use crate::error::{Error, Result};
use crate::eval::{self, F1Report, ScoredItem};
use crate::pipeline::{SpanStatus, SpanVerdict, SummaryVerdict};
use crate::text;

/// Inheritance category of one question. Extrinsic takes precedence:
/// a question inheriting both kinds of error counts as extrinsic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InheritedCategory {
    Extrinsic,
    OnlyIntrinsic,
    None,
}

impl InheritedCategory {
    pub fn name(self) -> &'static str {
        match self {
            InheritedCategory::Extrinsic => "extrinsic",
            InheritedCategory::OnlyIntrinsic => "only_intrinsic",
            InheritedCategory::None => "none",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InheritedToken {
    pub question_token: String,
    pub summary_token_index: usize,
    pub summary_token_text: String,
    pub error_type: ErrorType,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InheritedErrorReport {
    pub question_id: String,
    pub inherited_tokens: Vec<InheritedToken>,
    pub category: InheritedCategory,
}

/// A question token inherits a summary token when their normalized
/// texts match, the summary token is annotated non-factual, and its POS
/// is a content category. Function words and punctuation are excluded
/// so copied determiners do not saturate the statistic.
pub fn detect_inherited_errors(question: &Question, pair: &AnnotatedPair) -> InheritedErrorReport {
    let mut inherited = Vec::new();
    let mut seen = BTreeSet::new();
    for word in question.text.split_whitespace() {
        let norm = text::normalize_word(word);
        if norm.is_empty() {
            continue;
        }
        for (index, tok) in pair.tokens.iter().enumerate() {
            if tok.is_factual() || !tok.pos.is_content() {
                continue;
            }
            if text::normalize_word(&tok.text) == norm && seen.insert((norm.clone(), index)) {
                inherited.push(InheritedToken {
                    question_token: norm.clone(),
                    summary_token_index: index,
                    summary_token_text: tok.text.clone(),
                    error_type: tok.error_type,
                });
            }
        }
    }
    let category = if inherited.iter().any(|t| t.error_type.as_analysis_extrinsic()) {
        InheritedCategory::Extrinsic
    } else if inherited.is_empty() {
        InheritedCategory::None
    } else {
        InheritedCategory::OnlyIntrinsic
    };
    InheritedErrorReport {
        question_id: question.question_id.clone(),
        inherited_tokens: inherited,
        category,
    }
}

/// Worst-case category over all of a span's generated questions; spans
/// with no questions fall in the none group.
pub fn span_category(verdict: &SpanVerdict, pair: &AnnotatedPair) -> InheritedCategory {
    verdict
        .questions
        .iter()
        .map(|q| detect_inherited_errors(&q.question, pair).category)
        .min()
        .unwrap_or(InheritedCategory::None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InheritedRates {
    /// All generated questions over non-factual summaries.
    pub questions_total: usize,
    pub extrinsic_pct: f64,
    pub only_intrinsic_pct: f64,
    pub none_pct: f64,
    /// Alternative denominator: questions that survived filtering.
    pub kept_questions_total: usize,
    pub kept_extrinsic_pct: f64,
    pub kept_only_intrinsic_pct: f64,
    pub note: Option<String>,
}

fn pct(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

/// Percentage of questions inheriting extrinsic / only intrinsic errors,
/// restricted to summaries containing at least one non-factual span.
/// The primary denominator is all generated questions; the count over
/// surviving questions is reported alongside.
pub fn inherited_error_rates(
    verdicts: &[SummaryVerdict],
    dataset: &Dataset,
) -> Result<InheritedRates> {
    let mut total = 0usize;
    let mut extrinsic = 0usize;
    let mut intrinsic = 0usize;
    let mut kept_total = 0usize;
    let mut kept_extrinsic = 0usize;
    let mut kept_intrinsic = 0usize;
    for sv in verdicts {
        let pair = dataset.pair(&sv.pair_id)?;
        if derive_summary_gold(pair)? == 1 {
            continue;
        }
        for span in &sv.span_verdicts {
            for q in &span.questions {
                let cat = detect_inherited_errors(&q.question, pair).category;
                total += 1;
                kept_total += usize::from(q.kept);
                match cat {
                    InheritedCategory::Extrinsic => {
                        extrinsic += 1;
                        kept_extrinsic += usize::from(q.kept);
                    }
                    InheritedCategory::OnlyIntrinsic => {
                        intrinsic += 1;
                        kept_intrinsic += usize::from(q.kept);
                    }
                    InheritedCategory::None => {}
                }
            }
        }
    }
    let note = if total == 0 {
        Some("no questions over non-factual summaries".into())
    } else {
        None
    };
    Ok(InheritedRates {
        questions_total: total,
        extrinsic_pct: pct(extrinsic, total),
        only_intrinsic_pct: pct(intrinsic, total),
        none_pct: pct(total - extrinsic - intrinsic, total),
        kept_questions_total: kept_total,
        kept_extrinsic_pct: pct(kept_extrinsic, kept_total),
        kept_only_intrinsic_pct: pct(kept_intrinsic, kept_total),
        note,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub category: InheritedCategory,
    pub spans: usize,
    pub correct: usize,
    pub pct_correct: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactualSpanAccuracy {
    pub groups: Vec<GroupAccuracy>,
    pub omitted_groups: Vec<InheritedCategory>,
}

/// Among gold-factual spans from all summaries, the fraction predicted
/// factual (score ≥ threshold), grouped by the worst inherited-error
/// category among each span's questions. Empty groups are omitted and
/// listed in the report.
pub fn factual_span_accuracy_by_group(
    verdicts: &[SummaryVerdict],
    dataset: &Dataset,
    threshold: f64,
) -> Result<FactualSpanAccuracy> {
    let mut counts: BTreeMap<InheritedCategory, (usize, usize)> = BTreeMap::new();
    for sv in verdicts {
        let pair = dataset.pair(&sv.pair_id)?;
        for span in &sv.span_verdicts {
            if span.gold_label != 1 || span.status == SpanStatus::Errored {
                continue;
            }
            let cat = span_category(span, pair);
            let entry = counts.entry(cat).or_default();
            entry.0 += 1;
            entry.1 += usize::from(!eval::predict_non_factual(span.score, threshold));
        }
    }
    let mut groups = Vec::new();
    let mut omitted = Vec::new();
    for cat in [
        InheritedCategory::Extrinsic,
        InheritedCategory::OnlyIntrinsic,
        InheritedCategory::None,
    ] {
        match counts.get(&cat) {
            Some(&(spans, correct)) => groups.push(GroupAccuracy {
                category: cat,
                spans,
                correct,
                pct_correct: pct(correct, spans),
            }),
            None => omitted.push(cat),
        }
    }
    Ok(FactualSpanAccuracy {
        groups,
        omitted_groups: omitted,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionStats {
    pub questions: usize,
    pub summaries: usize,
    pub avg_question_len: f64,
    pub avg_questions_per_summary: f64,
}

/// Mean question length in whitespace tokens and mean generated
/// questions per summary.
pub fn question_stats(verdicts: &[SummaryVerdict]) -> QuestionStats {
    let mut questions = 0usize;
    let mut words = 0usize;
    for sv in verdicts {
        for span in &sv.span_verdicts {
            for q in &span.questions {
                questions += 1;
                words += q.question.text.split_whitespace().count();
            }
        }
    }
    QuestionStats {
        questions,
        summaries: verdicts.len(),
        avg_question_len: if questions == 0 {
            0.0
        } else {
            words as f64 / questions as f64
        },
        avg_questions_per_summary: if verdicts.is_empty() {
            0.0
        } else {
            questions as f64 / verdicts.len() as f64
        },
    }
}

/// A QA metric entering the common-subset comparison. Its scored spans
/// (status = scored) intersect into the shared subset.
pub struct QaSystem<'a> {
    pub name: &'a str,
    pub verdicts: &'a [SummaryVerdict],
    pub threshold: f64,
}

/// A baseline scoring every span directly, keyed by span id.
pub struct BaselineSystem<'a> {
    pub name: &'a str,
    pub span_scores: &'a BTreeMap<String, f64>,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetSystemReport {
    pub name: String,
    pub f1: F1Report,
    pub auc: Option<f64>,
    pub bottom_half_auc: Option<f64>,
    pub top_half_auc: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommonSubsetReport {
    pub universe_size: usize,
    pub subset_size: usize,
    pub systems: Vec<SubsetSystemReport>,
    /// Summaries in the bottom half by gold error rate (ties included).
    pub bottom_half_pairs: Vec<String>,
}

struct SpanUniverse {
    /// span_id -> (pair_id, gold)
    spans: BTreeMap<String, (String, u8)>,
}

fn universe_of(verdicts: &[SummaryVerdict]) -> SpanUniverse {
    let mut spans = BTreeMap::new();
    for sv in verdicts {
        for span in &sv.span_verdicts {
            spans.insert(span.span_id.clone(), (sv.pair_id.clone(), span.gold_label));
        }
    }
    SpanUniverse { spans }
}

/// Split summaries at the median gold error rate (fraction of
/// non-factual spans); ties at the median fall in the bottom half.
fn bottom_half_pairs(universe: &SpanUniverse) -> BTreeSet<String> {
    let mut rates: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (pair_id, gold) in universe.spans.values() {
        let entry = rates.entry(pair_id).or_default();
        entry.0 += usize::from(*gold == 0);
        entry.1 += 1;
    }
    let mut list: Vec<(&str, f64)> = rates
        .iter()
        .map(|(&pid, &(nf, n))| (pid, nf as f64 / n as f64))
        .collect();
    list.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite rate").then(a.0.cmp(b.0)));
    if list.is_empty() {
        return BTreeSet::new();
    }
    let median = list[(list.len() - 1) / 2].1;
    list.iter()
        .filter(|(_, rate)| *rate <= median)
        .map(|(pid, _)| pid.to_string())
        .collect()
}

fn auc_of(items: &[ScoredItem]) -> Option<f64> {
    eval::roc_curve(items).ok().map(|r| r.auc)
}

/// Restrict evaluation to the spans every QA metric scored (status =
/// scored, no filtering or unanswerable sentinel involved), recompute
/// span-level F1 and AUC for each system there, and additionally report
/// AUC on the bottom/top halves of summaries by gold error rate.
pub fn common_subset_eval(
    qa_systems: &[QaSystem<'_>],
    baselines: &[BaselineSystem<'_>],
) -> Result<CommonSubsetReport> {
    let first = qa_systems
        .first()
        .ok_or_else(|| Error::Empty("common_subset_eval needs at least one QA system".into()))?;
    let universe = universe_of(first.verdicts);
    for sys in &qa_systems[1..] {
        let other = universe_of(sys.verdicts);
        if other.spans != universe.spans {
            return Err(Error::MismatchedItems(format!(
                "system {} scores a different span universe than {}",
                sys.name, first.name
            )));
        }
    }

    let mut subset: BTreeSet<String> = universe.spans.keys().cloned().collect();
    let mut scores: Vec<BTreeMap<&str, f64>> = Vec::with_capacity(qa_systems.len());
    for sys in qa_systems {
        let mut by_id = BTreeMap::new();
        for sv in sys.verdicts {
            for span in &sv.span_verdicts {
                if span.status == SpanStatus::Scored {
                    by_id.insert(span.span_id.as_str(), span.score);
                } else {
                    subset.remove(&span.span_id);
                }
            }
        }
        scores.push(by_id);
    }
    if subset.is_empty() {
        return Err(Error::Empty("common subset of scored spans is empty".into()));
    }

    let bottom = bottom_half_pairs(&universe);
    let items_for = |get: &dyn Fn(&str) -> Option<f64>, name: &str| -> Result<Vec<ScoredItem>> {
        subset
            .iter()
            .map(|span_id| {
                let (pair_id, gold) = &universe.spans[span_id];
                let score = get(span_id).ok_or_else(|| {
                    Error::MismatchedItems(format!("system {name} missing span {span_id}"))
                })?;
                Ok(ScoredItem::new(span_id.clone(), score, *gold, pair_id.clone()))
            })
            .collect()
    };

    let mut systems = Vec::new();
    let mut report_system = |name: &str, items: Vec<ScoredItem>, threshold: f64| -> Result<()> {
        let (bottom_items, top_items): (Vec<_>, Vec<_>) = items
            .iter()
            .cloned()
            .partition(|i| bottom.contains(&i.pair_id));
        systems.push(SubsetSystemReport {
            name: name.to_string(),
            f1: eval::evaluate_f1(&items, threshold)?,
            auc: auc_of(&items),
            bottom_half_auc: auc_of(&bottom_items),
            top_half_auc: auc_of(&top_items),
        });
        Ok(())
    };
    for (sys, by_id) in qa_systems.iter().zip(&scores) {
        let items = items_for(&|id| by_id.get(id).copied(), sys.name)?;
        report_system(sys.name, items, sys.threshold)?;
    }
    for base in baselines {
        let items = items_for(&|id| base.span_scores.get(id).copied(), base.name)?;
        report_system(base.name, items, base.threshold)?;
    }
    Ok(CommonSubsetReport {
        universe_size: universe.spans.len(),
        subset_size: subset.len(),
        systems,
        bottom_half_pairs: bottom.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{extract_candidate_spans, RuleAnnotator};
    use crate::backends::{Provenance, QuestionGenerator};
    use crate::backends::stub::StubBackend;
    use crate::pipeline::QuestionRecord;
    use crate::testutil::{pair_from_words, W};

    fn matchbox_pair() -> AnnotatedPair {
        pair_from_words(
            "m1",
            "I have been collecting matchbox labels since I was a child .",
            &[
                W::pron("I"),
                W::aux("have"),
                W::aux("been"),
                W::verb("collecting"),
                W::noun("matchbox"),
                W::noun("labels"),
                W::adp("for"),
                W::num("15").extrinsic(),
                W::noun("years").extrinsic(),
            ],
        )
    }

    fn question(text: &str) -> Question {
        Question {
            question_id: "q1".into(),
            text: text.into(),
            target_span_id: "m1:0-1".into(),
            provenance: Provenance::Stub,
        }
    }

    #[test]
    fn inherits_extrinsic_tokens() {
        let pair = matchbox_pair();
        let rep = detect_inherited_errors(
            &question("What have I been collecting for 15 years ?"),
            &pair,
        );
        assert_eq!(rep.category, InheritedCategory::Extrinsic);
        let toks: Vec<&str> = rep
            .inherited_tokens
            .iter()
            .map(|t| t.question_token.as_str())
            .collect();
        assert_eq!(toks, vec!["15", "years"]);
    }

    #[test]
    fn no_shared_non_factual_token_is_none() {
        let pair = matchbox_pair();
        let rep = detect_inherited_errors(&question("What have I been collecting ?"), &pair);
        assert_eq!(rep.category, InheritedCategory::None);
        assert!(rep.inherited_tokens.is_empty());
    }

    #[test]
    fn extrinsic_dominates_intrinsic() {
        let pair = pair_from_words(
            "p",
            "doc .",
            &[
                W::noun("cat").intrinsic(),
                W::noun("dog").extrinsic(),
            ],
        );
        let rep = detect_inherited_errors(&question("Was the cat near the dog ?"), &pair);
        assert_eq!(rep.category, InheritedCategory::Extrinsic);
    }

    #[test]
    fn only_intrinsic_category() {
        let pair = pair_from_words("p", "doc .", &[W::noun("cat").intrinsic()]);
        let rep = detect_inherited_errors(&question("Where is the cat ?"), &pair);
        assert_eq!(rep.category, InheritedCategory::OnlyIntrinsic);
    }

    #[test]
    fn factual_summary_never_inherits() {
        let pair = pair_from_words(
            "p",
            "The cat sat on the mat in 2019 .",
            &[W::noun("cat"), W::verb("sat"), W::num("2019")],
        );
        for text in ["Where did the cat sit ?", "When cat 2019 ?", "cat sat 2019"] {
            let rep = detect_inherited_errors(&question(text), &pair);
            assert_eq!(rep.category, InheritedCategory::None);
        }
    }

    #[test]
    fn function_words_do_not_count() {
        // non-factual determiner/adposition tokens are not content POS
        let pair = pair_from_words("p", "doc .", &[W::adp("for").extrinsic(), W::noun("cake")]);
        let rep = detect_inherited_errors(&question("What is for dinner ?"), &pair);
        assert_eq!(rep.category, InheritedCategory::None);
    }

    fn verdict(
        pair_id: &str,
        span_id: &str,
        gold: u8,
        score: f64,
        status: SpanStatus,
        q_texts: &[(&str, bool)],
    ) -> SpanVerdict {
        SpanVerdict {
            span_id: span_id.into(),
            pair_id: pair_id.into(),
            start: 0,
            end: 1,
            gold_label: gold,
            score,
            status,
            questions: q_texts
                .iter()
                .enumerate()
                .map(|(i, (t, kept))| QuestionRecord {
                    question: Question {
                        question_id: format!("{span_id}#q{i}"),
                        text: (*t).to_string(),
                        target_span_id: span_id.into(),
                        provenance: Provenance::Stub,
                    },
                    kept: *kept,
                    summary_answer: crate::backends::Answer {
                        text: "x".into(),
                        start: None,
                        end: None,
                        answerable_prob: 1.0,
                        unanswerable: false,
                    },
                    document_answer: None,
                    score: None,
                })
                .collect(),
            error: None,
        }
    }

    fn dataset_of(pairs: Vec<AnnotatedPair>) -> Dataset {
        Dataset {
            name: "d".into(),
            pairs,
        }
    }

    #[test]
    fn rates_on_planted_fixture() {
        let pair = matchbox_pair();
        let ds = dataset_of(vec![pair]);
        let verdicts = vec![SummaryVerdict {
            pair_id: "m1".into(),
            score: 0.5,
            span_verdicts: vec![verdict(
                "m1",
                "m1:0-1",
                0,
                0.5,
                SpanStatus::Scored,
                &[
                    ("What have I been collecting for 15 years ?", true),
                    ("What labels ?", false),
                ],
            )],
        }];
        let rates = inherited_error_rates(&verdicts, &ds).unwrap();
        assert_eq!(rates.questions_total, 2);
        assert!((rates.extrinsic_pct - 50.0).abs() < 1e-12);
        assert_eq!(rates.kept_questions_total, 1);
        assert!((rates.kept_extrinsic_pct - 100.0).abs() < 1e-12);
        assert!(
            (rates.extrinsic_pct + rates.only_intrinsic_pct + rates.none_pct - 100.0).abs()
                < 1e-9
        );
    }

    #[test]
    fn rates_skip_factual_summaries() {
        let pair = pair_from_words("f1", "cat .", &[W::noun("cat")]);
        let ds = dataset_of(vec![pair]);
        let verdicts = vec![SummaryVerdict {
            pair_id: "f1".into(),
            score: 1.0,
            span_verdicts: vec![verdict(
                "f1",
                "f1:0-3",
                1,
                1.0,
                SpanStatus::Scored,
                &[("What ?", true)],
            )],
        }];
        let rates = inherited_error_rates(&verdicts, &ds).unwrap();
        assert_eq!(rates.questions_total, 0);
        assert!(rates.note.is_some());
    }

    #[test]
    fn accuracy_groups_worst_case() {
        let pair = matchbox_pair();
        let ds = dataset_of(vec![pair]);
        let verdicts = vec![SummaryVerdict {
            pair_id: "m1".into(),
            score: 0.5,
            span_verdicts: vec![
                // factual span with an error-free and an inheriting question:
                // grouped extrinsic (worst case), predicted non-factual -> wrong
                verdict(
                    "m1",
                    "m1:a",
                    1,
                    0.1,
                    SpanStatus::Scored,
                    &[("What labels ?", true), ("For 15 years what ?", true)],
                ),
                // factual span, clean question, predicted factual -> right
                verdict("m1", "m1:b", 1, 0.9, SpanStatus::Scored, &[("What ?", true)]),
                // non-factual span is outside this table
                verdict("m1", "m1:c", 0, 0.1, SpanStatus::Scored, &[("Q ?", true)]),
            ],
        }];
        let acc = factual_span_accuracy_by_group(&verdicts, &ds, 0.5).unwrap();
        let ext = acc
            .groups
            .iter()
            .find(|g| g.category == InheritedCategory::Extrinsic)
            .unwrap();
        assert_eq!((ext.spans, ext.correct), (1, 0));
        let none = acc
            .groups
            .iter()
            .find(|g| g.category == InheritedCategory::None)
            .unwrap();
        assert_eq!((none.spans, none.correct), (1, 1));
        assert_eq!(acc.omitted_groups, vec![InheritedCategory::OnlyIntrinsic]);
    }

    #[test]
    fn question_stats_basic() {
        let verdicts = vec![SummaryVerdict {
            pair_id: "p".into(),
            score: 1.0,
            span_verdicts: vec![verdict(
                "p",
                "p:s",
                1,
                1.0,
                SpanStatus::Scored,
                &[("one two three four", true), ("a b c d e f", true)],
            )],
        }];
        let stats = question_stats(&verdicts);
        assert_eq!(stats.questions, 2);
        assert!((stats.avg_question_len - 5.0).abs() < 1e-12);
        assert!((stats.avg_questions_per_summary - 2.0).abs() < 1e-12);
        let empty = question_stats(&[]);
        assert_eq!(empty.questions, 0);
        assert_eq!(empty.avg_question_len, 0.0);
    }

    fn two_pair_verdicts(filter_one: bool) -> Vec<SummaryVerdict> {
        vec![
            SummaryVerdict {
                pair_id: "p0".into(),
                score: 0.8,
                span_verdicts: vec![
                    verdict("p0", "p0:a", 1, 0.9, SpanStatus::Scored, &[]),
                    verdict(
                        "p0",
                        "p0:b",
                        0,
                        if filter_one { 1.0 } else { 0.2 },
                        if filter_one {
                            SpanStatus::Filtered
                        } else {
                            SpanStatus::Scored
                        },
                        &[],
                    ),
                ],
            },
            SummaryVerdict {
                pair_id: "p1".into(),
                score: 0.5,
                span_verdicts: vec![
                    verdict("p1", "p1:a", 0, 0.1, SpanStatus::Scored, &[]),
                    verdict("p1", "p1:b", 1, 0.8, SpanStatus::Scored, &[]),
                ],
            },
        ]
    }

    #[test]
    fn common_subset_full_set_matches_evaluate() {
        let v = two_pair_verdicts(false);
        let sys = QaSystem {
            name: "qa",
            verdicts: &v,
            threshold: 0.5,
        };
        let report = common_subset_eval(&[sys], &[]).unwrap();
        assert_eq!(report.subset_size, report.universe_size);
        let items: Vec<ScoredItem> = v
            .iter()
            .flat_map(|sv| {
                sv.span_verdicts.iter().map(|s| {
                    ScoredItem::new(s.span_id.clone(), s.score, s.gold_label, s.pair_id.clone())
                })
            })
            .collect();
        let direct = eval::evaluate_f1(&items, 0.5).unwrap();
        assert_eq!(report.systems[0].f1.f1, direct.f1);
        assert_eq!(report.systems[0].f1.confusion.total(), direct.confusion.total());
    }

    #[test]
    fn filtering_shrinks_subset() {
        let full = two_pair_verdicts(false);
        let filtered = two_pair_verdicts(true);
        let systems = [
            QaSystem {
                name: "a",
                verdicts: &full,
                threshold: 0.5,
            },
            QaSystem {
                name: "b",
                verdicts: &filtered,
                threshold: 0.5,
            },
        ];
        let scores: BTreeMap<String, f64> = [
            ("p0:a".to_string(), 1.0),
            ("p0:b".to_string(), 0.0),
            ("p1:a".to_string(), 0.0),
            ("p1:b".to_string(), 1.0),
        ]
        .into();
        let base = BaselineSystem {
            name: "em",
            span_scores: &scores,
            threshold: 0.5,
        };
        let report = common_subset_eval(&systems, &[base]).unwrap();
        assert_eq!(report.universe_size, 4);
        assert_eq!(report.subset_size, 3);
        assert_eq!(report.systems.len(), 3);
        for sys in &report.systems {
            assert_eq!(sys.f1.confusion.total(), 3);
        }
    }

    #[test]
    fn mismatched_universe_rejected() {
        let a = two_pair_verdicts(false);
        let mut b = two_pair_verdicts(false);
        b[0].span_verdicts[0].span_id = "p0:other".into();
        let systems = [
            QaSystem {
                name: "a",
                verdicts: &a,
                threshold: 0.5,
            },
            QaSystem {
                name: "b",
                verdicts: &b,
                threshold: 0.5,
            },
        ];
        assert!(common_subset_eval(&systems, &[]).is_err());
    }

    /// Window monotonicity: widening the stub generator's context window
    /// never loses an inherited token.
    #[test]
    fn inherited_count_monotone_in_window() {
        let pair = matchbox_pair();
        let annotator = RuleAnnotator::new();
        let spans = extract_candidate_spans(&pair, &annotator).unwrap();
        assert!(!spans.is_empty());
        for span in &spans {
            let mut last = 0usize;
            for w in 1..8 {
                let stub = StubBackend::new(1, Some(w), 0.5);
                let qs = stub.generate(span, &pair.summary).unwrap();
                let count = detect_inherited_errors(&qs[0], &pair).inherited_tokens.len();
                assert!(
                    count >= last,
                    "span {} window {w}: {count} < {last}",
                    span.span_id
                );
                last = count;
            }
        }
    }
}
