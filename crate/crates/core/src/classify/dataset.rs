use crate::error::{Error, Result};
use crate::preprocess::WindowKind;
use ndarray::Array2;

/// Where a dataset row came from, for leakage audits and reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowProvenance {
    pub record_name: String,
    pub segment_index: usize,
    pub window_kind: WindowKind,
}

/// Feature matrix with binary labels (1 = preterm, 0 = term).
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub provenance: Vec<RowProvenance>,
    pub feature_names: Vec<String>,
}

impl LabeledDataset {
    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Checks the structural invariants: aligned lengths, finite
    /// features, binary labels.
    pub fn validate(&self) -> Result<()> {
        if self.y.len() != self.x.nrows() || self.provenance.len() != self.x.nrows() {
            return Err(Error::LengthMismatch {
                what: "dataset rows, labels and provenance",
                expected: self.x.nrows(),
                actual: self.y.len().min(self.provenance.len()),
            });
        }
        if self.feature_names.len() != self.x.ncols() {
            return Err(Error::LengthMismatch {
                what: "feature names",
                expected: self.x.ncols(),
                actual: self.feature_names.len(),
            });
        }
        for (i, row) in self.x.rows().into_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite feature `{}` in row {i} ({})",
                        self.feature_names[j], self.provenance[i].record_name
                    )));
                }
            }
        }
        if let Some(&bad) = self.y.iter().find(|&&l| l > 1) {
            return Err(Error::Validation(format!("non-binary label {bad}")));
        }
        Ok(())
    }

    /// Copies the given rows into a new dataset, in the given order.
    pub fn subset(&self, rows: &[usize]) -> LabeledDataset {
        let mut x = Array2::<f64>::zeros((rows.len(), self.n_features()));
        let mut y = Vec::with_capacity(rows.len());
        let mut provenance = Vec::with_capacity(rows.len());
        for (dst, &src) in rows.iter().enumerate() {
            x.row_mut(dst).assign(&self.x.row(src));
            y.push(self.y[src]);
            provenance.push(self.provenance[src].clone());
        }
        LabeledDataset {
            x,
            y,
            provenance,
            feature_names: self.feature_names.clone(),
        }
    }

    /// `(n_term, n_preterm)` label counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.y.iter().filter(|&&l| l == 1).count();
        (self.y.len() - ones, ones)
    }
}
