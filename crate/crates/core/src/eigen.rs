//! Symmetric eigendecomposition via the cyclic Jacobi method.
//!
//! Sizes here are small (the autocorrelation lag, 50 by default), where
//! Jacobi is simple, robust and plenty fast, and its output is
//! deterministic for identical input.

use crate::error::{Error, Result};
use ndarray::Array2;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
///
/// `eigenvalues` are ascending; column `i` of `eigenvectors` pairs with
/// `eigenvalues[i]`. Columns are orthonormal; signs are unspecified.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<f64>,
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[[i, j]] * a[[i, j]];
            }
        }
    }
    sum.sqrt()
}

/// Decomposes a symmetric matrix into ascending eigenvalues and
/// orthonormal eigenvectors.
pub fn symmetric_eigen(m: &Array2<f64>) -> Result<EigenBasis> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            actual: m.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::Validation("empty matrix".into()));
    }
    let max_abs = m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let sym_tol = 1e-12 * max_abs.max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[[i, j]] - m[[j, i]]).abs() > sym_tol {
                return Err(Error::Validation(format!(
                    "matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let mut a = m.clone();
    let mut v = Array2::<f64>::eye(n);
    let frob = m.iter().map(|&x| x * x).sum::<f64>().sqrt().max(1e-300);
    let target = 1e-13 * frob;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= target / (n * n) as f64 {
                    continue;
                }
                let tau = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- Jᵀ A J with J the (p, q) plane rotation
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge; off-diagonal norm {:e}",
            off_diagonal_norm(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut eigenvectors = Array2::<f64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[[k, dst]] = v[[k, src]];
        }
    }
    Ok(EigenBasis {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::arr2;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Checks the decomposition invariants: orthonormal columns and
    /// small eigen-residual relative to the largest eigenvalue.
    fn check_invariants(m: &Array2<f64>, basis: &EigenBasis) {
        let n = m.nrows();
        let q = &basis.eigenvectors;
        let qtq = q.t().dot(q);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (qtq[[i, j]] - want).abs() < 1e-10,
                    "QᵀQ deviates at ({i}, {j}): {}",
                    qtq[[i, j]]
                );
            }
        }
        let lam_max = basis.eigenvalues.last().unwrap().abs().max(1.0);
        for (i, &lam) in basis.eigenvalues.iter().enumerate() {
            let qi = q.column(i);
            let rq = m.dot(&qi);
            for k in 0..n {
                assert!(
                    (rq[k] - lam * qi[k]).abs() < 1e-8 * lam_max,
                    "residual too large for eigenpair {i}"
                );
            }
        }
        for w in basis.eigenvalues.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "eigenvalues not ascending");
        }
    }

    #[test]
    fn two_by_two_analytic() {
        let m = arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let basis = symmetric_eigen(&m).unwrap();
        assert_close(basis.eigenvalues[0], 1.0, 1e-12);
        assert_close(basis.eigenvalues[1], 3.0, 1e-12);
        let inv = 1.0 / 2.0f64.sqrt();
        // up to sign
        let dot0 = basis.eigenvectors[[0, 0]] * inv - basis.eigenvectors[[1, 0]] * inv;
        let dot1 = basis.eigenvectors[[0, 1]] * inv + basis.eigenvectors[[1, 1]] * inv;
        assert_close(dot0.abs(), 1.0, 1e-12);
        assert_close(dot1.abs(), 1.0, 1e-12);
        check_invariants(&m, &basis);
    }

    #[test]
    fn diagonal_matrix_sorts_ascending() {
        let m = arr2(&[[5.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]]);
        let basis = symmetric_eigen(&m).unwrap();
        assert_eq!(basis.eigenvalues, vec![1.0, 3.0, 5.0]);
        // axis eigenvectors up to sign: |q| has a single 1 in the right row
        for (col, row) in [(0usize, 1usize), (1, 2), (2, 0)] {
            assert_close(basis.eigenvectors[[row, col]].abs(), 1.0, 1e-12);
        }
        check_invariants(&m, &basis);
    }

    #[test]
    fn identity_keeps_unit_eigenvalues() {
        let m = Array2::<f64>::eye(7);
        let basis = symmetric_eigen(&m).unwrap();
        for &lam in &basis.eigenvalues {
            assert_close(lam, 1.0, 1e-12);
        }
        check_invariants(&m, &basis);
    }

    #[test]
    fn one_by_one() {
        let m = arr2(&[[-4.5]]);
        let basis = symmetric_eigen(&m).unwrap();
        assert_eq!(basis.eigenvalues, vec![-4.5]);
        assert_close(basis.eigenvectors[[0, 0]].abs(), 1.0, 1e-15);
    }

    #[test]
    fn random_symmetric_matrices_satisfy_invariants() {
        let mut rng = SplitMix64::new(0x5EED);
        for &n in &[2usize, 10, 50] {
            for _ in 0..10 {
                let mut m = Array2::<f64>::zeros((n, n));
                for i in 0..n {
                    for j in i..n {
                        let x = rng.next_f64() * 2.0 - 1.0;
                        m[[i, j]] = x;
                        m[[j, i]] = x;
                    }
                }
                let basis = symmetric_eigen(&m).unwrap();
                check_invariants(&m, &basis);
                let trace: f64 = (0..n).map(|i| m[[i, i]]).sum();
                let lam_sum: f64 = basis.eigenvalues.iter().sum();
                assert_close(trace, lam_sum, 1e-9 * n as f64);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let non_square = Array2::<f64>::zeros((2, 3));
        assert!(symmetric_eigen(&non_square).is_err());
        let non_sym = arr2(&[[1.0, 2.0], [0.5, 1.0]]);
        assert!(symmetric_eigen(&non_sym).is_err());
        let empty = Array2::<f64>::zeros((0, 0));
        assert!(symmetric_eigen(&empty).is_err());
    }
}
