//! Confusion counts, threshold metrics, and rank-based ROC AUC.

use crate::error::{Error, Result};

pub const METRIC_NAMES: [&str; 5] = ["accuracy", "precision", "recall", "f1", "auc"];

/// Binary confusion counts; class 1 (preterm) is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
}

impl MetricSet {
    pub fn as_array(&self) -> [f64; 5] {
        [self.accuracy, self.precision, self.recall, self.f1, self.auc]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        METRIC_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| self.as_array()[i])
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            what: "prediction vector",
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    let mut c = ConfusionCounts {
        true_pos: 0,
        true_neg: 0,
        false_pos: 0,
        false_neg: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::Validation(format!(
                "labels must be 0 or 1, got true={t} pred={p}"
            )));
        }
        match (t, p) {
            (1, 1) => c.true_pos += 1,
            (0, 0) => c.true_neg += 1,
            (0, 1) => c.false_pos += 1,
            _ => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// Accuracy, precision, recall, and F1 from counts, with the provided
/// AUC attached. Degenerate precision/recall denominators yield 0 with
/// a warning; F1 is 0 when precision + recall is 0.
pub fn metrics(c: &ConfusionCounts, auc: f64) -> Result<MetricSet> {
    if c.total() == 0 {
        return Err(Error::Validation("no samples to score".into()));
    }
    if !(0.0..=1.0).contains(&auc) {
        return Err(Error::Validation(format!("auc {auc} outside [0, 1]")));
    }
    let (tp, tn, fp, fng) = (
        c.true_pos as f64,
        c.true_neg as f64,
        c.false_pos as f64,
        c.false_neg as f64,
    );
    let accuracy = (tp + tn) / (tp + tn + fp + fng);
    let precision = if tp + fp == 0.0 {
        log::warn!("no positive predictions; precision defaults to 0");
        0.0
    } else {
        tp / (tp + fp)
    };
    let recall = if tp + fng == 0.0 {
        log::warn!("no positive samples; recall defaults to 0");
        0.0
    } else {
        tp / (tp + fng)
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricSet {
        accuracy,
        precision,
        recall,
        f1,
        auc,
    })
}

/// Mann-Whitney AUC over average ranks; ties contribute one half.
pub fn roc_auc(scores: &[f64], y_true: &[u8]) -> Result<f64> {
    if scores.len() != y_true.len() {
        return Err(Error::LengthMismatch {
            what: "score vector",
            expected: y_true.len(),
            actual: scores.len(),
        });
    }
    let n = scores.len();
    let n_pos = y_true.iter().filter(|&&y| y == 1).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation(
            "AUC undefined: both classes must be present".into(),
        ));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Validation("AUC undefined on NaN scores".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg_rank;
        }
        i = j + 1;
    }
    let rank_sum: f64 = (0..n).filter(|&i| y_true[i] == 1).map(|i| ranks[i]).sum();
    let n_pos = n_pos as f64;
    let n_neg = n_neg as f64;
    Ok((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}
