//! Exact AU-ROC and AU-PR on scored binary sets.
//!
//! AU-ROC is the Mann-Whitney statistic `P(score+ > score-) + 1/2 P(tie)`
//! computed by sorting. AU-PR uses the average-precision step formulation
//! (no trapezoidal interpolation between PR points), with tied scores
//! processed as one block. Brute-force counterparts used as test oracles
//! live in [`brute_force_oracle`].

use crate::error::{Error, Result};

/// Scored binary examples. Both metrics need at least one positive; AU-ROC
/// also needs at least one negative.
#[derive(Clone, Debug, Default)]
pub struct ScoredSet {
    pairs: Vec<(f64, bool)>,
}

impl ScoredSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, bool)>) -> Self {
        ScoredSet {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn push(&mut self, score: f64, label: bool) {
        self.pairs.push((score, label));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.pairs.iter().filter(|(_, y)| *y).count()
    }

    fn check_two_classes(&self) -> Result<(usize, usize)> {
        let pos = self.positives();
        let neg = self.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::UndefinedMetric(format!(
                "need both classes, got {pos} positives and {neg} negatives"
            )));
        }
        Ok((pos, neg))
    }

    /// Sorted descending by score; ties keep input order (irrelevant to
    /// both metrics since ties are block-processed).
    fn sorted_desc(&self) -> Vec<(f64, bool)> {
        let mut v = self.pairs.clone();
        v.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores must not be NaN"));
        v
    }
}

/// Area under the ROC curve via the rank statistic, O(n log n).
pub fn auroc(s: &ScoredSet) -> Result<f64> {
    let (pos, neg) = s.check_two_classes()?;
    let sorted = s.sorted_desc();
    // Walk tie blocks; within a block each positive sees every previously
    // counted negative as a win and half of the block's negatives as ties.
    let mut wins = 0.0f64;
    let mut negs_seen = 0usize;
    let mut i = 0;
    let n = sorted.len();
    while i < n {
        let mut j = i;
        let mut block_pos = 0usize;
        let mut block_neg = 0usize;
        while j < n && sorted[j].0 == sorted[i].0 {
            if sorted[j].1 {
                block_pos += 1;
            } else {
                block_neg += 1;
            }
            j += 1;
        }
        // Negatives ranked strictly below this block (seen later in the
        // descending sweep) are wins; handle them by counting negatives
        // seen so far as losses instead: each positive in the block beats
        // all negatives that come after it.
        wins += block_pos as f64 * (neg - negs_seen - block_neg) as f64;
        wins += block_pos as f64 * block_neg as f64 * 0.5;
        negs_seen += block_neg;
        i = j;
    }
    Ok(wins / (pos as f64 * neg as f64))
}

/// Area under the precision-recall curve in the average-precision step
/// formulation: sum of `(R_k - R_{k-1}) * P_k` over descending score
/// thresholds, tied scores moving across the threshold together.
pub fn aupr(s: &ScoredSet) -> Result<f64> {
    let pos = s.positives();
    if pos == 0 {
        return Err(Error::UndefinedMetric("no positives in set".into()));
    }
    let sorted = s.sorted_desc();
    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0;
    let n = sorted.len();
    while i < n {
        let mut j = i;
        let mut block_tp = 0usize;
        while j < n && sorted[j].0 == sorted[i].0 {
            if sorted[j].1 {
                block_tp += 1;
            }
            j += 1;
        }
        let prev_recall = tp as f64 / pos as f64;
        tp += block_tp;
        seen += j - i;
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / seen as f64;
        ap += (recall - prev_recall) * precision;
        i = j;
    }
    Ok(ap)
}

/// Quadratic-time reference implementations: AU-ROC by enumerating every
/// positive-negative pair, AU-PR by an explicit threshold-by-threshold
/// sweep. Exists solely to cross-check the fast paths.
pub fn brute_force_oracle(s: &ScoredSet) -> Result<(f64, f64)> {
    if s.len() > 1000 {
        return Err(Error::input(
            "brute-force oracle capped at 1000 examples".into(),
        ));
    }
    let (pos, neg) = s.check_two_classes()?;
    let mut wins = 0.0;
    for &(sp, yp) in &s.pairs {
        if !yp {
            continue;
        }
        for &(sn, yn) in &s.pairs {
            if yn {
                continue;
            }
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    let roc = wins / (pos as f64 * neg as f64);

    // Every distinct score is a threshold; classify score >= t as positive.
    let mut thresholds: Vec<f64> = s.pairs.iter().map(|(x, _)| *x).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).expect("scores must not be NaN"));
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &t in &thresholds {
        let tp = s.pairs.iter().filter(|(x, y)| *x >= t && *y).count();
        let fp = s.pairs.iter().filter(|(x, y)| *x >= t && !*y).count();
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok((roc, ap))
}
