//! Class-balanced subsampling and stratified fold assignment.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Keeps every minority-class row and a uniform without-replacement
/// draw of equally many majority rows. Output indices are sorted
/// ascending. Balanced input is returned whole.
pub fn balanced_subsample(labels: &[u8], rng: &mut SplitMix64) -> Result<Vec<usize>> {
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Validation(
            "balanced subsampling needs both classes".into(),
        ));
    }
    let (minority, majority) = if pos.len() <= neg.len() {
        (&pos, &neg)
    } else {
        (&neg, &pos)
    };
    let mut selected = minority.clone();
    selected.extend(rng.sample_indices(majority, minority.len()));
    selected.sort_unstable();
    Ok(selected)
}

/// Stratified k-fold assignment: each class is shuffled and dealt into
/// folds; remainder rows rotate across classes so fold sizes differ by
/// at most one overall as well as per class. Fold contents are sorted
/// ascending; together they partition `0..labels.len()`.
pub fn stratified_kfold(
    labels: &[u8],
    k: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Validation(format!("need at least 2 folds, got {k}")));
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut start = 0usize;
    for class in [0u8, 1u8] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if rows.len() < k {
            return Err(Error::Validation(format!(
                "class {class} has {} rows, fewer than {k} folds",
                rows.len()
            )));
        }
        rng.shuffle(&mut rows);
        let base = rows.len() / k;
        let rem = rows.len() % k;
        let mut cursor = 0;
        for j in 0..k {
            let fold = (start + j) % k;
            let take = base + usize::from(j < rem);
            folds[fold].extend(&rows[cursor..cursor + take]);
            cursor += take;
        }
        start = (start + rem) % k;
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}
