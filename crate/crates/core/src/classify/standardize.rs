//! Per-feature z-scoring with training-set statistics.

use ndarray::{Array2, ArrayView2};

/// Per-feature mean and population standard deviation, computed on the
/// training rows only. Zero-std features pass through unscaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<'_, f64>) -> Standardizer {
        let n = x.nrows() as f64;
        let d = x.ncols();
        let mut mean = vec![0.0; d];
        let mut std = vec![0.0; d];
        for j in 0..d {
            let col = x.column(j);
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean[j] = m;
            std[j] = var.sqrt();
        }
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for j in 0..self.mean.len().min(out.ncols()) {
            let (m, s) = (self.mean[j], self.std[j]);
            if s > 0.0 {
                out.column_mut(j).mapv_inplace(|v| (v - m) / s);
            }
        }
        out
    }
}
