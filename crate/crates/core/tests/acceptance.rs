//! Acceptance gate. Each test covers one numbered criterion and prints
//! a single pass/fail line (visible with `cargo test -- --nocapture`).
//! Criterion 10 (integration against full converted corpora and real
//! model replay caches) is optional and intentionally skipped here.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcl_core::analysis::{detect_inherited_errors, InheritedCategory};
use fcl_core::annotate::extract_candidate_spans;
use fcl_core::backends::stub::StubBackend;
use fcl_core::backends::QuestionGenerator;
use fcl_core::corpus::{
    derive_span_gold, derive_summary_gold, AnnotatedPair, ErrorType, PosTag, Token,
};
use fcl_core::eval::{
    candidate_thresholds, paired_bootstrap, roc_curve, tune_threshold, ScoredItem,
};
use fcl_core::fixtures::{fixture_dataset, fixture_human_records, fixture_spans};
use fcl_core::humanqg::{
    build_question_sets, oracle_select, parse_span_id, select_configuration, LengthMode,
};
use fcl_core::pipeline::{
    filter_questions, run_pipeline, score_span, MetricConfig, Scorers, SpanStatus,
};

struct Gate {
    n: u32,
    desc: &'static str,
    passed: bool,
}

impl Gate {
    fn new(n: u32, desc: &'static str) -> Self {
        Gate {
            n,
            desc,
            passed: false,
        }
    }
    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Gate {
    fn drop(&mut self) {
        let status = if self.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2}: {status} — {}", self.n, self.desc);
    }
}

fn random_items(rng: &mut ChaCha8Rng, n: usize, grid: u32) -> Vec<ScoredItem> {
    (0..n)
        .map(|i| {
            ScoredItem::new(
                format!("i{i}"),
                f64::from(rng.gen_range(0..grid)) / f64::from(grid - 1),
                rng.gen_range(0..2),
                format!("p{}", i / 3),
            )
        })
        .collect()
}

#[test]
fn criterion_01_auc_oracle() {
    let gate = Gate::new(1, "roc_curve AUC equals the O(n^2) pair-count oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.gen_range(10..=200);
        // coarse grid forces tied scores
        let grid = rng.gen_range(3..8);
        let items = random_items(&mut rng, n, grid);
        let pos: Vec<f64> = items.iter().filter(|i| i.gold == 0).map(|i| i.score).collect();
        let neg: Vec<f64> = items.iter().filter(|i| i.gold == 1).map(|i| i.score).collect();
        if pos.is_empty() || neg.is_empty() {
            continue;
        }
        let mut oracle = 0.0;
        for &p in &pos {
            for &q in &neg {
                if p < q {
                    oracle += 1.0;
                } else if p == q {
                    oracle += 0.5;
                }
            }
        }
        oracle /= (pos.len() * neg.len()) as f64;
        let auc = roc_curve(&items).unwrap().auc;
        assert!(
            (auc - oracle).abs() < 1e-12,
            "instance {checked}: auc {auc} vs oracle {oracle}"
        );
        checked += 1;
    }
    gate.pass();
}

#[test]
fn criterion_02_threshold_oracle() {
    let gate = Gate::new(2, "tune_threshold equals an exhaustive candidate sweep");
    // independent F1 implementation for the oracle sweep
    fn f1_at(items: &[ScoredItem], t: f64) -> f64 {
        let (mut tp, mut fp, mut fnn) = (0.0, 0.0, 0.0);
        for i in items {
            let pred = i.score < t;
            let gold = i.gold == 0;
            if pred && gold {
                tp += 1.0;
            } else if pred {
                fp += 1.0;
            } else if gold {
                fnn += 1.0;
            }
        }
        if tp == 0.0 {
            0.0
        } else {
            2.0 * tp / (2.0 * tp + fp + fnn)
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.gen_range(5..120);
        let grid = rng.gen_range(3..10);
        let items = random_items(&mut rng, n, grid);
        if !items.iter().any(|i| i.gold == 0) {
            continue;
        }
        // oracle: recompute candidates from sorted distinct scores
        let mut scores: Vec<f64> = items.iter().map(|i| i.score).collect();
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        scores.dedup();
        let mut cands = vec![scores[0] - 1.0];
        cands.extend(scores.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        cands.push(scores[scores.len() - 1] + 1.0);
        let (mut best_t, mut best_f1) = (cands[0], -1.0);
        for &t in &cands {
            let f1 = f1_at(&items, t);
            if f1 > best_f1 {
                best_f1 = f1;
                best_t = t;
            }
        }
        let (t, f1) = tune_threshold(&items).unwrap();
        assert_eq!(t, best_t, "instance {checked}");
        assert!((f1 - best_f1.max(0.0)).abs() < 1e-12, "instance {checked}");
        checked += 1;
    }
    gate.pass();
}

#[test]
fn criterion_03_pipeline_determinism() {
    let gate = Gate::new(
        3,
        "fixture pipeline runs are bit-identical; summary = mean of span scores",
    );
    let dataset = fixture_dataset();
    assert!(dataset.pairs.len() >= 20);
    let spans = fixture_spans(&dataset).unwrap();
    let backend = StubBackend::new(3, None, 0.3);
    let config = MetricConfig::qe();
    let scorers = Scorers::default();
    let run = || {
        let (verdicts, _) =
            run_pipeline(&dataset, &spans, &backend, &backend, &config, &scorers).unwrap();
        let mut buf = String::new();
        for v in &verdicts {
            buf.push_str(&serde_json::to_string(v).unwrap());
            buf.push('\n');
        }
        (verdicts, buf)
    };
    let (verdicts, dump_a) = run();
    let (_, dump_b) = run();
    assert_eq!(dump_a, dump_b, "verdict dumps differ between runs");
    for sv in &verdicts {
        let usable: Vec<f64> = sv
            .span_verdicts
            .iter()
            .filter(|s| s.status != SpanStatus::Errored)
            .map(|s| s.score)
            .collect();
        let mean = usable.iter().sum::<f64>() / usable.len() as f64;
        assert!(
            (sv.score - mean).abs() < 1e-12,
            "pair {}: {} vs mean {mean}",
            sv.pair_id,
            sv.score
        );
    }
    gate.pass();
}

#[test]
fn criterion_04_sentinel_conformance() {
    let gate = Gate::new(
        4,
        "filtered spans take the style sentinel; QAFE unanswerable spans score 0",
    );
    let dataset = fixture_dataset();
    let spans = fixture_spans(&dataset).unwrap();
    let scorers = Scorers::default();

    let mut qafe_filtered = 0usize;
    let mut qafe_unanswerable = 0usize;
    for window in [Some(1), Some(2), Some(3), None] {
        let backend = StubBackend::new(1, window, 0.3);
        let config = MetricConfig::qafe();
        let (verdicts, _) =
            run_pipeline(&dataset, &spans, &backend, &backend, &config, &scorers).unwrap();
        for sv in verdicts.iter().flat_map(|v| &v.span_verdicts) {
            match sv.status {
                SpanStatus::Filtered => {
                    qafe_filtered += 1;
                    assert_eq!(sv.score, 6.0, "span {}", sv.span_id);
                }
                SpanStatus::Unanswerable => {
                    qafe_unanswerable += 1;
                    assert_eq!(sv.score, 0.0, "span {}", sv.span_id);
                }
                _ => {}
            }
        }
    }
    assert!(qafe_filtered > 0, "no filtered spans exercised");
    assert!(qafe_unanswerable > 0, "no unanswerable spans exercised");

    let backend = StubBackend::new(3, Some(1), 0.3);
    let config = MetricConfig::qe();
    let (verdicts, _) =
        run_pipeline(&dataset, &spans, &backend, &backend, &config, &scorers).unwrap();
    let mut qe_filtered = 0usize;
    for sv in verdicts.iter().flat_map(|v| &v.span_verdicts) {
        if sv.status == SpanStatus::Filtered {
            qe_filtered += 1;
            assert_eq!(sv.score, 1.0, "span {}", sv.span_id);
        }
    }
    assert!(qe_filtered > 0, "no QE filtered spans exercised");
    gate.pass();
}

#[test]
fn criterion_05_gold_derivation_property() {
    let gate = Gate::new(5, "gold derivation matches token overlap on 1000 random pairs");
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..1000 {
        let n = rng.gen_range(1..12);
        let mut tokens = Vec::new();
        let mut cursor = 0usize;
        for t in 0..n {
            let len = rng.gen_range(1..6);
            let factual = rng.gen_bool(0.6);
            tokens.push(Token {
                text: "x".repeat(len),
                start: cursor,
                end: cursor + len,
                pos: PosTag::Noun,
                label: u8::from(factual),
                error_type: if factual {
                    ErrorType::None
                } else if rng.gen_bool(0.5) {
                    ErrorType::Extrinsic
                } else {
                    ErrorType::Intrinsic
                },
            });
            cursor += len;
            if t + 1 < n {
                cursor += 1;
            }
        }
        let summary: String = {
            let mut s = " ".repeat(cursor);
            for tok in &tokens {
                s.replace_range(tok.start..tok.end, &tok.text);
            }
            s
        };
        let pair = AnnotatedPair {
            pair_id: format!("prop{case}"),
            dataset_name: "prop".into(),
            model_name: "m".into(),
            document: "doc".into(),
            summary,
            tokens: tokens.clone(),
        };
        pair.validate().unwrap();
        let expected = u8::from(!tokens.iter().any(|t| t.label == 0));
        assert_eq!(derive_summary_gold(&pair).unwrap(), expected, "case {case}");
        // random span over the summary
        let start = rng.gen_range(0..pair.summary.len());
        let end = rng.gen_range(start + 1..=pair.summary.len());
        let overlap_nf = tokens
            .iter()
            .any(|t| t.label == 0 && t.start < end && start < t.end);
        let overlaps_any = tokens.iter().any(|t| t.start < end && start < t.end);
        match derive_span_gold(start, end, &pair) {
            Ok(gold) => {
                assert!(overlaps_any, "case {case}: gold for token-free span");
                assert_eq!(gold, u8::from(!overlap_nf), "case {case}");
            }
            Err(_) => assert!(!overlaps_any, "case {case}: error despite overlap"),
        }
    }
    gate.pass();
}

#[test]
fn criterion_06_inherited_error_mechanism() {
    let gate = Gate::new(
        6,
        "factual span flips to non-factual only when its question inherits the planted error",
    );
    let dataset = fixture_dataset();
    let pair = dataset.pair("fx-m0").unwrap();
    let spans = extract_candidate_spans(
        pair,
        &fcl_core::annotate::RuleAnnotator::new(),
    )
    .unwrap();
    let target = spans
        .iter()
        .find(|s| s.text == "matchbox labels")
        .expect("fixture span");
    assert_eq!(target.gold_label, 1);
    let config = MetricConfig::qe();
    let scorers = Scorers::default();

    let score_with = |window: Option<usize>| {
        let backend = StubBackend::new(1, window, 0.3);
        let questions = backend.generate(target, &pair.summary).unwrap();
        let category = detect_inherited_errors(&questions[0], pair).category;
        let filtered = filter_questions(target, questions, &backend, &pair.summary).unwrap();
        let verdict = score_span(
            target,
            &pair.pair_id,
            filtered,
            &backend,
            &pair.document,
            &config,
            &scorers,
        );
        (category, verdict.score)
    };

    // full window: the question copies the planted "15 years"
    let (cat_full, score_full) = score_with(None);
    assert_eq!(cat_full, InheritedCategory::Extrinsic);
    // narrow window: the question stays clean
    let (cat_narrow, score_narrow) = score_with(Some(1));
    assert_eq!(cat_narrow, InheritedCategory::None);
    // inherited error drives the factual span below threshold
    let threshold = 0.5;
    assert!(
        score_full < threshold,
        "inheriting question should misclassify the factual span (score {score_full})"
    );
    assert!(
        score_narrow >= threshold,
        "clean question should keep the span factual (score {score_narrow})"
    );
    gate.pass();
}

#[test]
fn criterion_07_length_monotonicity() {
    let gate = Gate::new(
        7,
        "% questions with inherited errors is nondecreasing in the context window",
    );
    let dataset = fixture_dataset();
    let spans = fixture_spans(&dataset).unwrap();
    let mut last_pct = 0.0f64;
    let windows: Vec<Option<usize>> = (1..=8).map(Some).chain([None]).collect();
    for window in windows {
        let backend = StubBackend::new(1, window, 0.3);
        let mut total = 0usize;
        let mut inherited = 0usize;
        for (pair, list) in dataset.pairs.iter().zip(&spans) {
            if derive_summary_gold(pair).unwrap() == 1 {
                continue;
            }
            for span in list {
                for q in backend.generate(span, &pair.summary).unwrap() {
                    total += 1;
                    inherited += usize::from(
                        detect_inherited_errors(&q, pair).category != InheritedCategory::None,
                    );
                }
            }
        }
        assert!(total > 0);
        let pct = 100.0 * inherited as f64 / total as f64;
        assert!(
            pct + 1e-9 >= last_pct,
            "window {window:?}: {pct}% < {last_pct}%"
        );
        last_pct = pct;
    }
    assert!(last_pct > 0.0, "no inheritance observed at the full window");
    gate.pass();
}

#[test]
fn criterion_08_oracle_dominance() {
    let gate = Gate::new(
        8,
        "oracle mode dominates short/long/intermediate at every threshold",
    );
    let dataset = fixture_dataset();
    let records = fixture_human_records(&dataset).unwrap();
    let (sets, _) = build_question_sets(records, &dataset).unwrap();
    let qa = StubBackend::new(1, None, 0.3);
    let config = MetricConfig::qe();
    let scorers = Scorers::default();

    // score every human question individually through steps 3-5
    let mut per_mode: BTreeMap<&str, Vec<ScoredItem>> = BTreeMap::new();
    for set in sets.iter().filter(|s| !s.discarded) {
        let (pair_id, start, end) = parse_span_id(&set.span_id).unwrap();
        let pair = dataset.pair(&pair_id).unwrap();
        let span = fcl_core::annotate::CandidateSpan {
            span_id: set.span_id.clone(),
            start,
            end,
            text: pair.summary[start..end].to_string(),
            kind: fcl_core::annotate::SpanKind::NP,
            gold_label: derive_span_gold(start, end, pair).unwrap(),
        };
        let mut scores = BTreeMap::new();
        for q in set.all_questions() {
            let filtered =
                filter_questions(&span, vec![q.clone()], &qa, &pair.summary).unwrap();
            let verdict = score_span(
                &span,
                &pair_id,
                filtered,
                &qa,
                &pair.document,
                &config,
                &scorers,
            );
            assert_ne!(verdict.status, SpanStatus::Errored);
            scores.insert(q.question_id.clone(), verdict.score);
        }
        let push = |map: &mut BTreeMap<&str, Vec<ScoredItem>>, mode: &'static str, s: f64| {
            map.entry(mode).or_default().push(ScoredItem::new(
                set.span_id.clone(),
                s,
                span.gold_label,
                pair_id.clone(),
            ));
        };
        push(&mut per_mode, "short", scores[&set.shortest().unwrap().question_id]);
        push(&mut per_mode, "long", scores[&set.longest().unwrap().question_id]);
        let inter = select_configuration(set, LengthMode::Intermediate, 17).unwrap();
        push(
            &mut per_mode,
            "intermediate",
            inter.iter().map(|q| scores[&q.question_id]).sum::<f64>() / inter.len() as f64,
        );
        let oq = oracle_select(set, &scores, span.gold_label).unwrap();
        push(&mut per_mode, "oracle", scores[&oq.question_id]);
    }

    let correct_at = |items: &[ScoredItem], t: f64| {
        items
            .iter()
            .filter(|i| (i.score < t) == (i.gold == 0))
            .count()
    };
    let oracle_items = &per_mode["oracle"];
    let mut thresholds = Vec::new();
    for items in per_mode.values() {
        thresholds.extend(candidate_thresholds(items));
    }
    let mut strict = false;
    for &t in &thresholds {
        let oracle_correct = correct_at(oracle_items, t);
        for (mode, items) in &per_mode {
            if *mode == "oracle" {
                continue;
            }
            let mode_correct = correct_at(items, t);
            assert!(
                oracle_correct >= mode_correct,
                "threshold {t}: oracle {oracle_correct} < {mode} {mode_correct}"
            );
            strict |= oracle_correct > mode_correct;
        }
    }
    assert!(strict, "oracle never strictly better than any fixed mode");
    gate.pass();
}

#[test]
fn criterion_09_bootstrap_sanity() {
    let gate = Gate::new(
        9,
        "bootstrap: identity p = 1, perfect vs coin p < 0.05, seed-deterministic",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let golds: Vec<u8> = (0..200).map(|_| rng.gen_range(0..2)).collect();
    let perfect: Vec<ScoredItem> = golds
        .iter()
        .enumerate()
        .map(|(i, &g)| ScoredItem::new(format!("i{i}"), f64::from(g), g, "p"))
        .collect();
    let coin: Vec<ScoredItem> = golds
        .iter()
        .enumerate()
        .map(|(i, &g)| ScoredItem::new(format!("i{i}"), f64::from(rng.gen_range(0..2)), g, "p"))
        .collect();
    assert_eq!(
        paired_bootstrap(&perfect, 0.5, &perfect, 0.5, 1000, 1).unwrap(),
        1.0
    );
    let p1 = paired_bootstrap(&perfect, 0.5, &coin, 0.5, 2000, 99).unwrap();
    let p2 = paired_bootstrap(&perfect, 0.5, &coin, 0.5, 2000, 99).unwrap();
    assert!(p1 < 0.05, "p = {p1}");
    assert_eq!(p1, p2);
    gate.pass();
}

#[test]
fn criterion_10_integration_optional() {
    // Requires full converted corpora plus replay caches of real model
    // outputs, which are not shipped with the repository.
    println!("criterion 10: SKIP — optional integration check (needs external corpora and replay caches)");
}
