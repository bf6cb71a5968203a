//! Property tests for the text, evaluation, and scoring invariants.

use proptest::prelude::*;

use fcl_core::eval::{candidate_thresholds, evaluate_f1, roc_curve, ScoredItem};
use fcl_core::text;

fn score_strategy() -> impl Strategy<Value = f64> {
    // coarse grid so ties occur often
    (0u32..12).prop_map(|v| f64::from(v) / 11.0)
}

fn items_strategy(max: usize) -> impl Strategy<Value = Vec<ScoredItem>> {
    prop::collection::vec((score_strategy(), 0u8..2), 1..max).prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(i, (score, gold))| {
                ScoredItem::new(format!("i{i}"), score, gold, format!("p{}", i / 3))
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn normalize_answer_is_idempotent(s in "\\PC{0,40}") {
        let once = text::normalize_answer(&s);
        prop_assert_eq!(text::normalize_answer(&once), once);
    }

    #[test]
    fn token_f1_is_symmetric_and_bounded(a in "[a-z ]{0,30}", b in "[a-z ]{0,30}") {
        let ab = text::token_f1(&a, &b);
        let ba = text::token_f1(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        // identical strings always match perfectly (empty == empty included)
        prop_assert!((text::token_f1(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sentence_ranges_cover_text(s in "[a-zA-Z .!?]{1,60}") {
        let ranges = text::sentence_ranges(&s);
        let mut cursor = 0usize;
        for (start, end) in &ranges {
            prop_assert!(*start >= cursor);
            prop_assert!(start < end && *end <= s.len());
            cursor = *end;
        }
    }

    #[test]
    fn threshold_candidates_count(items in items_strategy(40)) {
        let mut scores: Vec<f64> = items.iter().map(|i| i.score).collect();
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        scores.dedup();
        prop_assert_eq!(candidate_thresholds(&items).len(), scores.len() + 1);
    }

    #[test]
    fn roc_points_are_monotone(items in items_strategy(60)) {
        let pos = items.iter().filter(|i| i.gold == 0).count();
        prop_assume!(pos > 0 && pos < items.len());
        let roc = roc_curve(&items).unwrap();
        prop_assert_eq!(*roc.points.first().unwrap(), (0.0, 0.0));
        prop_assert_eq!(*roc.points.last().unwrap(), (1.0, 1.0));
        for w in roc.points.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
        prop_assert!((0.0..=1.0).contains(&roc.auc));
    }

    #[test]
    fn confusion_counts_partition_items(items in items_strategy(60), t in score_strategy()) {
        let report = evaluate_f1(&items, t).unwrap();
        prop_assert_eq!(report.confusion.total(), items.len());
        let p = report.precision;
        let r = report.recall;
        let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        prop_assert!((report.f1 - f1).abs() < 1e-12);
    }
}
