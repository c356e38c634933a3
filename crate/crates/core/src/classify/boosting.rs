//! Gradient boosting on the logistic loss with shallow regression trees
//! and per-leaf Newton steps.

use crate::classify::tree::{assign_leaf_values, grow_regression_tree, TreeNode};
use ndarray::ArrayView2;

const HESSIAN_GUARD: f64 = 1e-12;
const PROB_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct GbModel {
    pub(crate) n_features: usize,
    /// Initial raw score: the log-odds of the training base rate.
    pub(crate) init: f64,
    pub(crate) shrinkage: f64,
    pub(crate) trees: Vec<TreeNode>,
    /// Mean training logistic loss after each boosting round.
    pub train_loss_per_round: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn mean_logistic_loss(f: &[f64], y: &[u8]) -> f64 {
    let mut loss = 0.0;
    for (fi, &yi) in f.iter().zip(y) {
        let p = sigmoid(*fi).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        loss -= if yi == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    loss / y.len() as f64
}

impl GbModel {
    /// `rounds` regression trees of depth `max_depth` fit to logistic
    /// residuals y − p; leaf values are damped Newton steps
    /// Σ(y−p) / Σ p(1−p), scaled by `shrinkage`.
    pub(crate) fn fit(
        x: ArrayView2<'_, f64>,
        y: &[u8],
        rounds: usize,
        max_depth: usize,
        shrinkage: f64,
    ) -> GbModel {
        let n = x.nrows();
        let base_rate = y.iter().filter(|&&v| v == 1).count() as f64 / n as f64;
        let init = (base_rate / (1.0 - base_rate)).ln();
        let mut f = vec![init; n];
        let mut trees = Vec::with_capacity(rounds);
        let mut train_loss_per_round = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let mut resid = vec![0.0; n];
            let mut hess = vec![0.0; n];
            for i in 0..n {
                let p = sigmoid(f[i]);
                resid[i] = f64::from(y[i]) - p;
                hess[i] = p * (1.0 - p);
            }
            let mut tree = grow_regression_tree(x, &resid, (0..n).collect(), max_depth);
            assign_leaf_values(&mut tree, x, (0..n).collect(), &mut |rows| {
                let sh: f64 = rows.iter().map(|&i| hess[i]).sum();
                if sh < HESSIAN_GUARD {
                    0.0
                } else {
                    rows.iter().map(|&i| resid[i]).sum::<f64>() / sh
                }
            });
            for (i, fi) in f.iter_mut().enumerate() {
                *fi += shrinkage * tree.predict_row(x.row(i));
            }
            train_loss_per_round.push(mean_logistic_loss(&f, y));
            trees.push(tree);
        }
        GbModel {
            n_features: x.ncols(),
            init,
            shrinkage,
            trees,
            train_loss_per_round,
        }
    }

    /// Probability of class 1: sigmoid of the boosted raw score.
    pub(crate) fn scores(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                let z = self.init
                    + self.shrinkage
                        * self
                            .trees
                            .iter()
                            .map(|t| t.predict_row(row))
                            .sum::<f64>();
                sigmoid(z)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::Array2;

    fn blobs(seed: u64, n_per: usize, gap: f64) -> (Array2<f64>, Vec<u8>) {
        let mut rng = SplitMix64::new(seed);
        let mut x = Array2::<f64>::zeros((2 * n_per, 2));
        let mut y = Vec::with_capacity(2 * n_per);
        for i in 0..2 * n_per {
            let c = i % 2;
            let center = if c == 0 { -gap } else { gap };
            x[[i, 0]] = center + 0.5 * rng.next_gaussian();
            x[[i, 1]] = center + 0.5 * rng.next_gaussian();
            y.push(c as u8);
        }
        (x, y)
    }

    #[test]
    fn init_is_base_rate_log_odds() {
        let (x, _) = blobs(1, 10, 1.0);
        let y: Vec<u8> = (0..20).map(|i| u8::from(i < 15)).collect();
        let m = GbModel::fit(x.view(), &y, 1, 3, 0.1);
        assert!((m.init - (3.0_f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn training_loss_never_increases() {
        // overlapping blobs keep the loss nontrivial for all 100 rounds
        let (x, y) = blobs(17, 100, 0.8);
        let m = GbModel::fit(x.view(), &y, 100, 3, 0.1);
        assert_eq!(m.train_loss_per_round.len(), 100);
        for pair in m.train_loss_per_round.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "loss rose from {} to {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn separable_blobs_reach_high_confidence() {
        let (x, y) = blobs(23, 100, 3.0);
        let m = GbModel::fit(x.view(), &y, 100, 3, 0.1);
        let s = m.scores(x.view());
        let acc = s
            .iter()
            .zip(&y)
            .filter(|(s, &y)| (**s >= 0.5) == (y == 1))
            .count() as f64
            / y.len() as f64;
        assert_eq!(acc, 1.0);
        assert!(*m.train_loss_per_round.last().unwrap() < 0.1);
    }

    #[test]
    fn constant_features_keep_base_rate() {
        let x = Array2::<f64>::from_elem((10, 3), 2.0);
        let y = vec![1, 1, 1, 1, 1, 1, 0, 0, 0, 0];
        let m = GbModel::fit(x.view(), &y, 50, 3, 0.1);
        for s in m.scores(x.view()) {
            assert!((s - 0.6).abs() < 1e-12, "score {s}");
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let (x, y) = blobs(31, 40, 1.0);
        let a = GbModel::fit(x.view(), &y, 30, 3, 0.1);
        let b = GbModel::fit(x.view(), &y, 30, 3, 0.1);
        assert_eq!(a, b);
    }
}
