//! Quadratic discriminant analysis with ridge-regularized class
//! covariances.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

const RIDGE_SCALE: f64 = 1e-6;
const RIDGE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QdaModel {
    pub(crate) n_features: usize,
    pub(crate) log_priors: [f64; 2],
    pub(crate) means: [Array1<f64>; 2],
    /// Lower-triangular Cholesky factors of the regularized covariances.
    pub(crate) chol: [Array2<f64>; 2],
    pub(crate) log_dets: [f64; 2],
}

/// Lower-triangular L with A = L·Lᵀ; fails on non-positive-definite input.
pub(crate) fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let d = a.nrows();
    let mut l = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Numeric(format!(
                        "covariance not positive definite at pivot {i}"
                    )));
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Solves L·y = v by forward substitution.
fn forward_solve(l: &Array2<f64>, v: &Array1<f64>) -> Array1<f64> {
    let d = v.len();
    let mut y = Array1::<f64>::zeros(d);
    for i in 0..d {
        let mut s = v[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    y
}

impl QdaModel {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[u8]) -> Result<QdaModel> {
        let d = x.ncols();
        let n = x.nrows() as f64;
        let mut means: [Array1<f64>; 2] = [Array1::zeros(d), Array1::zeros(d)];
        let mut chol: [Array2<f64>; 2] = [Array2::zeros((d, d)), Array2::zeros((d, d))];
        let mut log_priors = [0.0; 2];
        let mut log_dets = [0.0; 2];
        for c in 0..2u8 {
            let rows: Vec<usize> = (0..x.nrows()).filter(|&i| y[i] == c).collect();
            let nc = rows.len() as f64;
            log_priors[c as usize] = (nc / n).ln();
            let mut mean = Array1::<f64>::zeros(d);
            for &i in &rows {
                mean += &x.row(i);
            }
            mean /= nc;
            let mut cov = Array2::<f64>::zeros((d, d));
            for &i in &rows {
                let diff = &x.row(i) - &mean;
                for p in 0..d {
                    for q in 0..=p {
                        cov[[p, q]] += diff[p] * diff[q];
                    }
                }
            }
            cov /= nc - 1.0;
            for p in 0..d {
                for q in 0..p {
                    cov[[q, p]] = cov[[p, q]];
                }
            }
            let trace: f64 = (0..d).map(|p| cov[[p, p]]).sum();
            let ridge = (RIDGE_SCALE * trace / d as f64).max(RIDGE_FLOOR);
            for p in 0..d {
                cov[[p, p]] += ridge;
            }
            let l = cholesky(&cov)?;
            log_dets[c as usize] = 2.0 * (0..d).map(|p| l[[p, p]].ln()).sum::<f64>();
            means[c as usize] = mean;
            chol[c as usize] = l;
        }
        Ok(QdaModel {
            n_features: d,
            log_priors,
            means,
            chol,
            log_dets,
        })
    }

    fn discriminant(&self, c: usize, row: ArrayView1<'_, f64>) -> f64 {
        let diff = &row - &self.means[c];
        let y = forward_solve(&self.chol[c], &diff);
        let maha = y.iter().map(|v| v * v).sum::<f64>();
        self.log_priors[c] - 0.5 * self.log_dets[c] - 0.5 * maha
    }

    /// Posterior probability of class 1.
    pub(crate) fn scores(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                let a0 = self.discriminant(0, row);
                let a1 = self.discriminant(1, row);
                1.0 / (1.0 + (a0 - a1).exp())
            })
            .collect()
    }

    /// Σ_c reconstructed from its Cholesky factor (regularized form).
    #[cfg(test)]
    pub(crate) fn covariance(&self, c: usize) -> Array2<f64> {
        self.chol[c].dot(&self.chol[c].t())
    }
}
