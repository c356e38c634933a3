//! CART trees shared by the decision-tree, forest, and boosting models.
//!
//! Splits are placed at midpoints between consecutive distinct feature
//! values. Ties in split gain resolve to the lowest feature index, then
//! the lowest threshold, by scanning in ascending order and accepting a
//! new best only on strictly greater gain.

use crate::rng::SplitMix64;
use ndarray::{ArrayView1, ArrayView2};

const MIN_SAMPLES_SPLIT: usize = 2;
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    /// Walks the tree; rows go left when `x[feature] <= threshold`.
    pub fn predict_row(&self, row: ArrayView1<'_, f64>) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    #[cfg(test)]
    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    #[cfg(test)]
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// How a node scores candidate splits and values its leaves.
enum Criterion<'a> {
    /// Gini impurity on binary labels; leaves hold the class-1 fraction.
    Gini { y: &'a [u8] },
    /// Sum-of-squared-error reduction on real targets; leaves hold the mean.
    Sse { t: &'a [f64] },
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    criterion: Criterion<'a>,
    max_depth: usize,
    m_try: Option<usize>,
    rng: Option<SplitMix64>,
    feature_pool: Vec<usize>,
}

impl Grower<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        match (self.m_try, &mut self.rng) {
            (Some(m), Some(rng)) if m < self.feature_pool.len() => {
                let mut idx = rng.sample_indices(&self.feature_pool, m);
                idx.sort_unstable();
                idx
            }
            _ => self.feature_pool.clone(),
        }
    }

    fn leaf_value(&self, rows: &[usize]) -> f64 {
        let n = rows.len() as f64;
        match &self.criterion {
            Criterion::Gini { y } => {
                rows.iter().filter(|&&i| y[i] == 1).count() as f64 / n
            }
            Criterion::Sse { t } => rows.iter().map(|&i| t[i]).sum::<f64>() / n,
        }
    }

    fn node_impurity(&self, rows: &[usize]) -> f64 {
        let n = rows.len() as f64;
        match &self.criterion {
            Criterion::Gini { y } => {
                let n1 = rows.iter().filter(|&&i| y[i] == 1).count() as f64;
                let p1 = n1 / n;
                let p0 = 1.0 - p1;
                1.0 - p0 * p0 - p1 * p1
            }
            Criterion::Sse { t } => {
                let sum: f64 = rows.iter().map(|&i| t[i]).sum();
                let sumsq: f64 = rows.iter().map(|&i| t[i] * t[i]).sum();
                sumsq - sum * sum / n
            }
        }
    }

    /// Best (gain, threshold) for one feature, or None when all values tie.
    fn best_split_on(&self, rows: &[usize], feature: usize) -> Option<(f64, f64)> {
        let n = rows.len();
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_unstable_by(|&a, &b| {
            self.x[[a, feature]]
                .partial_cmp(&self.x[[b, feature]])
                .unwrap()
        });
        let parent = self.node_impurity(rows);
        let mut best: Option<(f64, f64)> = None;
        match &self.criterion {
            Criterion::Gini { y } => {
                let total1 = rows.iter().filter(|&&i| y[i] == 1).count() as f64;
                let mut left_n = 0.0;
                let mut left1 = 0.0;
                for w in 0..n - 1 {
                    let i = order[w];
                    left_n += 1.0;
                    left1 += f64::from(y[i]);
                    let (v, v_next) = (self.x[[i, feature]], self.x[[order[w + 1], feature]]);
                    if v_next <= v {
                        continue;
                    }
                    let right_n = n as f64 - left_n;
                    let lp1 = left1 / left_n;
                    let rp1 = (total1 - left1) / right_n;
                    let gini_l = 1.0 - lp1 * lp1 - (1.0 - lp1) * (1.0 - lp1);
                    let gini_r = 1.0 - rp1 * rp1 - (1.0 - rp1) * (1.0 - rp1);
                    // weighted-average child impurity, same denominator as parent
                    let gain = parent - (left_n * gini_l + right_n * gini_r) / n as f64;
                    if best.is_none_or(|(g, _)| gain > g) {
                        best = Some((gain, 0.5 * (v + v_next)));
                    }
                }
            }
            Criterion::Sse { t } => {
                let total_sum: f64 = rows.iter().map(|&i| t[i]).sum();
                let total_sumsq: f64 = parent + total_sum * total_sum / n as f64;
                let mut left_n = 0.0;
                let mut left_sum = 0.0;
                let mut left_sumsq = 0.0;
                for w in 0..n - 1 {
                    let i = order[w];
                    left_n += 1.0;
                    left_sum += t[i];
                    left_sumsq += t[i] * t[i];
                    let (v, v_next) = (self.x[[i, feature]], self.x[[order[w + 1], feature]]);
                    if v_next <= v {
                        continue;
                    }
                    let right_n = n as f64 - left_n;
                    let right_sum = total_sum - left_sum;
                    let right_sumsq = total_sumsq - left_sumsq;
                    let sse_l = left_sumsq - left_sum * left_sum / left_n;
                    let sse_r = right_sumsq - right_sum * right_sum / right_n;
                    let gain = parent - sse_l - sse_r;
                    if best.is_none_or(|(g, _)| gain > g) {
                        best = Some((gain, 0.5 * (v + v_next)));
                    }
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let leaf = TreeNode::Leaf {
            value: self.leaf_value(&rows),
        };
        if depth >= self.max_depth
            || rows.len() < MIN_SAMPLES_SPLIT
            || self.node_impurity(&rows) <= MIN_GAIN
        {
            return leaf;
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in self.candidate_features() {
            if let Some((gain, threshold)) = self.best_split_on(&rows, feature) {
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, feature, threshold));
                }
            }
        }
        let Some((gain, feature, threshold)) = best else {
            return leaf;
        };
        if gain <= MIN_GAIN {
            return leaf;
        }
        let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
        for &i in &rows {
            if self.x[[i, feature]] <= threshold {
                left_rows.push(i);
            } else {
                right_rows.push(i);
            }
        }
        // midpoint of adjacent floats can round onto a value; refuse empty sides
        if left_rows.is_empty() || right_rows.is_empty() {
            return leaf;
        }
        let left = Box::new(self.grow(left_rows, depth + 1));
        let right = Box::new(self.grow(right_rows, depth + 1));
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        }
    }
}

/// Grows a binary classification tree over `rows`; leaves hold class-1
/// fractions. `m_try` with an RNG restricts each split to a random
/// feature subset (used by the forest).
pub(crate) fn grow_classification_tree(
    x: ArrayView2<'_, f64>,
    y: &[u8],
    rows: Vec<usize>,
    max_depth: usize,
    m_try: Option<usize>,
    rng: Option<SplitMix64>,
) -> TreeNode {
    let feature_pool: Vec<usize> = (0..x.ncols()).collect();
    Grower {
        x,
        criterion: Criterion::Gini { y },
        max_depth,
        m_try,
        rng,
        feature_pool,
    }
    .grow(rows, 0)
}

/// Grows a regression tree on real targets; leaves hold target means.
pub(crate) fn grow_regression_tree(
    x: ArrayView2<'_, f64>,
    targets: &[f64],
    rows: Vec<usize>,
    max_depth: usize,
) -> TreeNode {
    let feature_pool: Vec<usize> = (0..x.ncols()).collect();
    Grower {
        x,
        criterion: Criterion::Sse { t: targets },
        max_depth,
        m_try: None,
        rng: None,
        feature_pool,
    }
    .grow(rows, 0)
}

/// Replaces every leaf value with `value_of(rows_reaching_that_leaf)`,
/// routing `rows` down the existing splits. Leaves no row reaches keep
/// their value.
pub(crate) fn assign_leaf_values<F: FnMut(&[usize]) -> f64>(
    node: &mut TreeNode,
    x: ArrayView2<'_, f64>,
    rows: Vec<usize>,
    value_of: &mut F,
) {
    match node {
        TreeNode::Leaf { value } => {
            if !rows.is_empty() {
                *value = value_of(&rows);
            }
        }
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for i in rows {
                if x[[i, *feature]] <= *threshold {
                    l.push(i);
                } else {
                    r.push(i);
                }
            }
            assign_leaf_values(left, x, l, value_of);
            assign_leaf_values(right, x, r, value_of);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_threshold_split() {
        let x = array![[1.0], [2.0], [10.0], [11.0]];
        let y = vec![0u8, 0, 1, 1];
        let tree = grow_classification_tree(x.view(), &y, vec![0, 1, 2, 3], 100, None, None);
        match &tree {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 6.0);
            }
            _ => panic!("expected a split at the root"),
        }
        assert_eq!(tree.predict_row(array![0.0].view()), 0.0);
        assert_eq!(tree.predict_row(array![20.0].view()), 1.0);
        assert_eq!(tree.n_leaves(), 2);
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let x = array![[1.0], [2.0], [3.0]];
        let y = vec![1u8, 1, 1];
        let tree = grow_classification_tree(x.view(), &y, vec![0, 1, 2], 100, None, None);
        assert_eq!(tree, TreeNode::Leaf { value: 1.0 });
    }

    #[test]
    fn constant_features_leave_majority_leaf() {
        let x = array![[4.0], [4.0], [4.0], [4.0]];
        let y = vec![1u8, 1, 1, 0];
        let tree = grow_classification_tree(x.view(), &y, vec![0, 1, 2, 3], 100, None, None);
        assert_eq!(tree, TreeNode::Leaf { value: 0.75 });
    }

    #[test]
    fn depth_cap_is_respected() {
        // alternating labels force deep recursion without a cap
        let n = 64;
        let x = ndarray::Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
        let y: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let tree = grow_classification_tree(x.view(), &y, (0..n).collect(), 3, None, None);
        assert!(tree.depth() <= 3);
        assert!(tree.n_leaves() <= 8);
    }

    #[test]
    fn gain_ties_pick_lowest_feature_then_threshold() {
        // feature 1 duplicates feature 0: identical gains everywhere
        let x = array![[1.0, 1.0], [2.0, 2.0], [10.0, 10.0], [11.0, 11.0]];
        let y = vec![0u8, 0, 1, 1];
        let tree = grow_classification_tree(x.view(), &y, vec![0, 1, 2, 3], 100, None, None);
        match &tree {
            TreeNode::Split { feature, .. } => assert_eq!(*feature, 0),
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn regression_tree_fits_step_function() {
        let x = array![[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]];
        let t = vec![5.0, 5.0, 5.0, -3.0, -3.0, -3.0];
        let tree = grow_regression_tree(x.view(), &t, (0..6).collect(), 3);
        assert_eq!(tree.predict_row(array![1.5].view()), 5.0);
        assert_eq!(tree.predict_row(array![11.0].view()), -3.0);
    }

    #[test]
    fn leaf_reassignment_routes_rows() {
        let x = array![[1.0], [2.0], [10.0], [11.0]];
        let y = vec![0u8, 0, 1, 1];
        let mut tree =
            grow_classification_tree(x.view(), &y, vec![0, 1, 2, 3], 100, None, None);
        let weights = [10.0, 20.0, 1.0, 2.0];
        assign_leaf_values(&mut tree, x.view(), vec![0, 1, 2, 3], &mut |rows| {
            rows.iter().map(|&i| weights[i]).sum()
        });
        assert_eq!(tree.predict_row(array![1.0].view()), 30.0);
        assert_eq!(tree.predict_row(array![11.0].view()), 3.0);
    }

    #[test]
    fn feature_subsampling_is_deterministic() {
        let n = 40;
        let x = ndarray::Array2::from_shape_fn((n, 6), |(i, j)| ((i * 7 + j * 3) % 13) as f64);
        let y: Vec<u8> = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
        let a = grow_classification_tree(
            x.view(),
            &y,
            (0..n).collect(),
            10,
            Some(2),
            Some(SplitMix64::new(42)),
        );
        let b = grow_classification_tree(
            x.view(),
            &y,
            (0..n).collect(),
            10,
            Some(2),
            Some(SplitMix64::new(42)),
        );
        assert_eq!(a, b);
    }
}
