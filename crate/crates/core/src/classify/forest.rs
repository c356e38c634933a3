//! Random forest: bootstrapped Gini trees with per-split feature
//! subsampling, scored by averaging leaf class-1 fractions.

use crate::classify::tree::{grow_classification_tree, TreeNode};
use crate::rng::{derive_seed, SplitMix64};
use ndarray::ArrayView2;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub(crate) n_features: usize,
    pub(crate) trees: Vec<TreeNode>,
}

impl ForestModel {
    /// `n_trees` bootstrap trees, √d feature candidates per split, each
    /// tree seeded from `derive_seed(seed, tree_index)`.
    pub(crate) fn fit(
        x: ArrayView2<'_, f64>,
        y: &[u8],
        n_trees: usize,
        max_depth: usize,
        seed: u64,
    ) -> ForestModel {
        let n = x.nrows();
        let m_try = ((x.ncols() as f64).sqrt().floor() as usize).max(1);
        let trees = (0..n_trees)
            .map(|t| {
                let mut rng = SplitMix64::new(derive_seed(seed, t as u64));
                let rows: Vec<usize> = (0..n).map(|_| rng.next_below(n)).collect();
                grow_classification_tree(x, y, rows, max_depth, Some(m_try), Some(rng))
            })
            .collect();
        ForestModel {
            n_features: x.ncols(),
            trees,
        }
    }

    /// Mean of per-tree class-1 fractions.
    pub(crate) fn scores(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        let nt = self.trees.len() as f64;
        x.rows()
            .into_iter()
            .map(|row| {
                self.trees
                    .iter()
                    .map(|t| t.predict_row(row))
                    .sum::<f64>()
                    / nt
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::{array, Array2};

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
    fn unanimous_vote_scores_one() {
        let (x, y) = blobs(2, 100, 3.0);
        let m = ForestModel::fit(x.view(), &y, 100, 10, 9);
        let s = m.scores(array![[10.0, 10.0]].view());
        assert_eq!(s[0], 1.0);
        let s = m.scores(array![[-10.0, -10.0]].view());
        assert_eq!(s[0], 0.0);
    }

    #[test]
    fn forest_is_deterministic_per_seed() {
        let (x, y) = blobs(4, 50, 2.0);
        let a = ForestModel::fit(x.view(), &y, 20, 10, 7);
        let b = ForestModel::fit(x.view(), &y, 20, 10, 7);
        assert_eq!(a, b);
        let c = ForestModel::fit(x.view(), &y, 20, 10, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn trees_respect_depth_cap() {
        let (x, y) = blobs(6, 60, 0.3);
        let m = ForestModel::fit(x.view(), &y, 30, 4, 1);
        assert!(m.trees.iter().all(|t| t.depth() <= 4));
    }

    #[test]
    fn scores_stay_in_unit_interval() {
        let (x, y) = blobs(8, 60, 0.5);
        let m = ForestModel::fit(x.view(), &y, 50, 10, 3);
        for s in m.scores(x.view()) {
            assert!((0.0..=1.0).contains(&s));
        }
    }
}
