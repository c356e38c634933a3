//! Karhunen–Loève subspace denoising.
//!
//! A segment's lag-limited autocorrelation sequence is packed into a
//! symmetric Toeplitz matrix, eigendecomposed, and the dominant subspace
//! is picked where the log-eigenvalue curve jumps by more than a relative
//! threshold. The zero-mean signal is framed into non-overlapping
//! lag-length frames and projected onto the retained eigenvectors.

use crate::eigen::{symmetric_eigen, EigenBasis};
use crate::error::{Error, Result};
use crate::par;
use ndarray::{Array1, Array2, ArrayView2};

pub const DEFAULT_LAG: usize = 50;
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.10;

/// Floor applied to eigenvalues, as a fraction of the largest one,
/// before taking logarithms.
const EIGENVALUE_CLAMP: f64 = 1e-12;
/// Below this magnitude a log-eigenvalue counts as zero in the
/// relative-change denominator.
const NEAR_ZERO_LOG: f64 = 1e-12;

/// Unbiased autocorrelation estimates `r[0..lag]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrSequence {
    pub values: Vec<f64>,
}

impl AutocorrSequence {
    pub fn lag(&self) -> usize {
        self.values.len()
    }
}

/// Computes `r[k] = (1/(N−k)) Σ x[n]·x[n+k]` for `k = 0..lag`.
///
/// The caller supplies the (typically zero-mean) signal; no mean is
/// removed here.
pub fn autocorrelation(signal: &[f64], lag: usize) -> Result<AutocorrSequence> {
    if lag < 2 {
        return Err(Error::Validation("autocorrelation lag must be at least 2".into()));
    }
    if signal.len() <= lag {
        return Err(Error::LengthMismatch {
            what: "signal for autocorrelation",
            expected: lag + 1,
            actual: signal.len(),
        });
    }
    let n = signal.len();
    let mut values = Vec::with_capacity(lag);
    for k in 0..lag {
        let mut sum = 0.0;
        for i in 0..(n - k) {
            sum += signal[i] * signal[i + k];
        }
        values.push(sum / (n - k) as f64);
    }
    Ok(AutocorrSequence { values })
}

/// Builds the symmetric Toeplitz matrix `M[i][j] = r[|i−j|]`.
pub fn toeplitz(r: &AutocorrSequence) -> Array2<f64> {
    let l = r.values.len();
    Array2::from_shape_fn((l, l), |(i, j)| r.values[i.abs_diff(j)])
}

/// Outcome of the log-eigenvalue jump rule.
#[derive(Debug, Clone)]
pub struct SubspaceSelection {
    /// 0-based index of the first retained eigenvalue; the retained set
    /// is the suffix starting here.
    pub retain_from: usize,
    pub threshold: f64,
    pub clamped_log_eigenvalues: Vec<f64>,
}

impl SubspaceSelection {
    pub fn n_retained(&self) -> usize {
        self.clamped_log_eigenvalues.len() - self.retain_from
    }
}

/// Finds the first index where the clamped log-eigenvalue sequence jumps
/// by more than `threshold` relative to the previous value; everything
/// from there up is retained. No jump (or a non-positive spectrum, where
/// the clamp has nothing to anchor on) retains everything.
pub fn select_signal_subspace(eigenvalues: &[f64], threshold: f64) -> Result<SubspaceSelection> {
    if eigenvalues.len() < 2 {
        return Err(Error::Validation(
            "subspace selection needs at least 2 eigenvalues".into(),
        ));
    }
    let scale = eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    for w in eigenvalues.windows(2) {
        if w[0] > w[1] + 1e-12 * scale.max(1.0) {
            return Err(Error::Validation("eigenvalues must be ascending".into()));
        }
    }
    let lam_max = *eigenvalues.last().unwrap();
    if lam_max <= 0.0 {
        let logs = vec![0.0; eigenvalues.len()];
        return Ok(SubspaceSelection {
            retain_from: 0,
            threshold,
            clamped_log_eigenvalues: logs,
        });
    }
    let floor = EIGENVALUE_CLAMP * lam_max;
    let logs: Vec<f64> = eigenvalues.iter().map(|&l| l.max(floor).ln()).collect();
    let mut retain_from = 0;
    for i in 1..logs.len() {
        let prev = logs[i - 1];
        let delta = logs[i] - prev;
        let ratio = if prev.abs() < NEAR_ZERO_LOG {
            if delta > NEAR_ZERO_LOG {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            delta / prev.abs()
        };
        if ratio > threshold {
            retain_from = i;
            break;
        }
    }
    Ok(SubspaceSelection {
        retain_from,
        threshold,
        clamped_log_eigenvalues: logs,
    })
}

/// Projects a signal frame-by-frame onto the span of `basis` columns.
///
/// The signal is cut into non-overlapping frames of `basis.nrows()`
/// samples, the last frame zero-padded, each frame replaced by its
/// projection, and the padding dropped again. No mean handling happens
/// here.
pub fn project_frames(signal: &[f64], basis: ArrayView2<f64>) -> Result<Vec<f64>> {
    let l = basis.nrows();
    let k = basis.ncols();
    if l == 0 || k == 0 || k > l {
        return Err(Error::ShapeMismatch {
            expected: l,
            actual: k,
        });
    }
    if signal.is_empty() {
        return Ok(Vec::new());
    }
    // P = Q_k Q_kᵀ once; every frame is then one mat-vec.
    let projector = basis.dot(&basis.t());
    let n = signal.len();
    let n_frames = n.div_ceil(l);
    let mut out = Vec::with_capacity(n_frames * l);
    let mut frame = Array1::<f64>::zeros(l);
    for m in 0..n_frames {
        let start = m * l;
        let stop = ((m + 1) * l).min(n);
        frame.fill(0.0);
        for (dst, &x) in frame.iter_mut().zip(&signal[start..stop]) {
            *dst = x;
        }
        let projected = projector.dot(&frame);
        out.extend(projected.iter().copied());
    }
    out.truncate(n);
    Ok(out)
}

/// Denoises one signal: remove the mean, estimate the lag-limited
/// autocorrelation, keep the dominant eigen-subspace, reconstruct, and
/// restore the mean. The reconstruction is re-centered first so the
/// output mean matches the input mean.
pub fn denoise(signal: &[f64], lag: usize, threshold: f64) -> Result<Vec<f64>> {
    if signal.len() < 2 * lag {
        return Err(Error::LengthMismatch {
            what: "signal for subspace denoising",
            expected: 2 * lag,
            actual: signal.len(),
        });
    }
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = signal.iter().map(|&x| x - mean).collect();
    let r = autocorrelation(&centered, lag)?;
    let matrix = toeplitz(&r);
    let basis: EigenBasis = symmetric_eigen(&matrix)?;
    let selection = select_signal_subspace(&basis.eigenvalues, threshold)?;
    let retained = basis
        .eigenvectors
        .slice(ndarray::s![.., selection.retain_from..]);
    let mut projected = project_frames(&centered, retained)?;
    let drift = projected.iter().sum::<f64>() / n as f64;
    for x in &mut projected {
        *x = *x - drift + mean;
    }
    Ok(projected)
}

/// Denoises a batch of signals; parallel across signals when the
/// `parallel` feature is active.
pub fn denoise_batch(signals: &[Vec<f64>], lag: usize, threshold: f64) -> Result<Vec<Vec<f64>>> {
    par::map_slice(signals, |s| denoise(s, lag, threshold))
        .into_iter()
        .collect()
}
