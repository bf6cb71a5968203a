//! Binary evaluation of factuality scores: best-F1 threshold tuning,
//! pooled and per-pair-macro F1, ROC/AUC with tie handling, threshold
//! sweeps, and paired bootstrap significance tests.
//!
//! The positive class is "non-factual" throughout. All systems emit
//! higher-is-more-factual scores, so an item is predicted non-factual
//! iff its score falls below the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item_id: String,
    pub score: f64,
    /// 1 = factual; the positive (target) class is gold = 0.
    pub gold: u8,
    pub pair_id: String,
}

impl ScoredItem {
    pub fn new(item_id: impl Into<String>, score: f64, gold: u8, pair_id: impl Into<String>) -> Self {
        ScoredItem {
            item_id: item_id.into(),
            score,
            gold,
            pair_id: pair_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    Pooled,
    PerPairMacro,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Predicted non-factual iff score < threshold.
pub fn predict_non_factual(score: f64, threshold: f64) -> bool {
    score < threshold
}

pub fn confusion(items: &[ScoredItem], threshold: f64) -> Confusion {
    let mut c = Confusion::default();
    for item in items {
        let pred_nf = predict_non_factual(item.score, threshold);
        let gold_nf = item.gold == 0;
        match (pred_nf, gold_nf) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    c
}

/// Candidate thresholds: midpoints between adjacent distinct scores plus
/// sentinels below the minimum and above the maximum.
pub fn candidate_thresholds(items: &[ScoredItem]) -> Vec<f64> {
    let mut scores: Vec<f64> = items.iter().map(|i| i.score).collect();
    scores.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    scores.dedup();
    if scores.is_empty() {
        return vec![0.0];
    }
    let mut out = Vec::with_capacity(scores.len() + 1);
    out.push(scores[0] - 1.0);
    for pair in scores.windows(2) {
        out.push((pair[0] + pair[1]) / 2.0);
    }
    out.push(scores[scores.len() - 1] + 1.0);
    out
}

/// Best-F1 threshold on a validation set; F1 ties break toward the
/// smallest threshold. Without any non-factual item the threshold is
/// the below-minimum sentinel (predict everything factual).
pub fn tune_threshold(items: &[ScoredItem]) -> Result<(f64, f64)> {
    if items.is_empty() {
        return Err(Error::Empty("tune_threshold on empty validation set".into()));
    }
    let candidates = candidate_thresholds(items);
    if !items.iter().any(|i| i.gold == 0) {
        eprintln!("warning: validation set has no non-factual items; sentinel threshold used");
        return Ok((candidates[0], 0.0));
    }
    let mut best_t = candidates[0];
    let mut best_f1 = -1.0;
    for &t in &candidates {
        let f1 = confusion(items, t).f1();
        if f1 > best_f1 {
            best_f1 = f1;
            best_t = t;
        }
    }
    Ok((best_t, best_f1.max(0.0)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct F1Report {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub macro_f1: f1_macro::MacroF1,
    pub confusion: Confusion,
    /// (pair_id, pair F1) for the per-pair breakdown.
    pub per_pair: Vec<(String, f64)>,
}

mod f1_macro {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, Clone, Copy, Serialize, Deserialize)]
    pub struct MacroF1 {
        pub value: f64,
        pub pairs: usize,
        pub degenerate_pairs: usize,
    }
}

/// Pooled and per-pair-macro F1 of the non-factual class at a fixed
/// threshold. Degenerate pairs (no gold positives, no predicted
/// positives) score 1.0 under the macro averaging.
pub fn evaluate_f1(items: &[ScoredItem], threshold: f64) -> Result<F1Report> {
    if items.is_empty() {
        return Err(Error::Empty("evaluate_f1 on empty test set".into()));
    }
    let pooled = confusion(items, threshold);
    let mut pair_ids: Vec<&str> = items.iter().map(|i| i.pair_id.as_str()).collect();
    pair_ids.sort_unstable();
    pair_ids.dedup();
    let mut per_pair = Vec::with_capacity(pair_ids.len());
    let mut degenerate = 0usize;
    for pid in &pair_ids {
        let subset: Vec<ScoredItem> = items
            .iter()
            .filter(|i| i.pair_id == *pid)
            .cloned()
            .collect();
        let c = confusion(&subset, threshold);
        let pair_f1 = if c.tp + c.fp + c.fn_ == 0 {
            degenerate += 1;
            1.0
        } else {
            c.f1()
        };
        per_pair.push((pid.to_string(), pair_f1));
    }
    let macro_value = per_pair.iter().map(|(_, f)| f).sum::<f64>() / per_pair.len() as f64;
    Ok(F1Report {
        threshold,
        precision: pooled.precision(),
        recall: pooled.recall(),
        f1: pooled.f1(),
        macro_f1: f1_macro::MacroF1 {
            value: macro_value,
            pairs: per_pair.len(),
            degenerate_pairs: degenerate,
        },
        confusion: pooled,
        per_pair,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RocCurve {
    /// (FPR, TPR) points from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC over distinct score values, all tied items advancing in a single
/// step (ties therefore appear as straight diagonal segments). AUC by
/// the trapezoid rule; equals the Mann-Whitney statistic with ties
/// counted one half.
pub fn roc_curve(items: &[ScoredItem]) -> Result<RocCurve> {
    let positives = items.iter().filter(|i| i.gold == 0).count();
    let negatives = items.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Empty(
            "roc_curve needs at least one item of each class".into(),
        ));
    }
    let mut sorted: Vec<(f64, bool)> = items.iter().map(|i| (i.score, i.gold == 0)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < sorted.len() {
        let score = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == score {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    let mut auc = 0.0;
    for w in points.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        auc += (x2 - x1) * (y1 + y2) / 2.0;
    }
    Ok(RocCurve { points, auc })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision/recall/F1 over every candidate threshold, plot-ready.
pub fn threshold_sweep(items: &[ScoredItem]) -> Result<Vec<SweepRow>> {
    if items.is_empty() {
        return Err(Error::Empty("threshold_sweep on empty set".into()));
    }
    let mut rows = Vec::new();
    let mut last_recall = 0.0f64;
    for t in candidate_thresholds(items) {
        let c = confusion(items, t);
        let recall = c.recall();
        debug_assert!(recall + 1e-12 >= last_recall, "recall must be monotone in t");
        last_recall = recall;
        rows.push(SweepRow {
            threshold: t,
            precision: c.precision(),
            recall,
            f1: c.f1(),
        });
    }
    Ok(rows)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Paired bootstrap over items scored by two systems at fixed
/// thresholds. Items are resampled by id with replacement; p is the
/// fraction of resamples in which the observed winner fails to win
/// (one-sided on the observed direction; identical observed F1 yields
/// p = 1 by convention). Deterministic given the seed; resamples use
/// per-index derived seeds so parallel execution cannot perturb them.
pub fn paired_bootstrap(
    items_a: &[ScoredItem],
    threshold_a: f64,
    items_b: &[ScoredItem],
    threshold_b: f64,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if items_a.len() != items_b.len() {
        return Err(Error::MismatchedItems(format!(
            "{} vs {} items",
            items_a.len(),
            items_b.len()
        )));
    }
    let mut a_sorted: Vec<&ScoredItem> = items_a.iter().collect();
    let mut b_sorted: Vec<&ScoredItem> = items_b.iter().collect();
    a_sorted.sort_by(|x, y| x.item_id.cmp(&y.item_id));
    b_sorted.sort_by(|x, y| x.item_id.cmp(&y.item_id));
    for (x, y) in a_sorted.iter().zip(&b_sorted) {
        if x.item_id != y.item_id {
            return Err(Error::MismatchedItems(format!(
                "item {} missing from one system",
                x.item_id
            )));
        }
        if x.gold != y.gold {
            return Err(Error::MismatchedItems(format!(
                "gold disagreement on item {}",
                x.item_id
            )));
        }
    }
    let n = a_sorted.len();
    if n == 0 {
        return Err(Error::Empty("paired_bootstrap on empty item set".into()));
    }
    // per-item binarized outcomes
    let golds: Vec<bool> = a_sorted.iter().map(|i| i.gold == 0).collect();
    let preds_a: Vec<bool> = a_sorted
        .iter()
        .map(|i| predict_non_factual(i.score, threshold_a))
        .collect();
    let preds_b: Vec<bool> = b_sorted
        .iter()
        .map(|i| predict_non_factual(i.score, threshold_b))
        .collect();

    let f1_of = |indices: &[usize], preds: &[bool]| -> f64 {
        let mut c = Confusion::default();
        for &i in indices {
            match (preds[i], golds[i]) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c.f1()
    };
    let all: Vec<usize> = (0..n).collect();
    let observed = f1_of(&all, &preds_a) - f1_of(&all, &preds_b);
    if observed == 0.0 {
        return Ok(1.0);
    }
    let a_wins = observed > 0.0;

    let losses = exec::map_range(resamples, |r| {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng =
            rand_chacha::ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (r as u64).wrapping_mul(0x9e3779b97f4a7c15)));
        let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let delta = f1_of(&indices, &preds_a) - f1_of(&indices, &preds_b);
        let winner_won = if a_wins { delta > 0.0 } else { delta < 0.0 };
        usize::from(!winner_won)
    });
    Ok(losses.iter().sum::<usize>() as f64 / resamples as f64)
}
