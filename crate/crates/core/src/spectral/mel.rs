use super::welch::hann_periodic;
use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_N_COEFFS: usize = 20;
pub const DEFAULT_N_FILTERS: usize = 26;
pub const DEFAULT_FRAME_LEN: usize = 256;
pub const DEFAULT_HOP: usize = 128;
/// Filter energies are clamped here before the logarithm.
pub const LOG_POWER_FLOOR: f64 = 1e-10;

/// Mel value of a frequency in Hz.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if f < 0.0 {
        return Err(Error::Validation(format!("negative frequency {f} Hz")));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

/// Frequency in Hz of a Mel value.
pub fn mel_to_hz(m: f64) -> Result<f64> {
    if m < 0.0 {
        return Err(Error::Validation(format!("negative Mel value {m}")));
    }
    Ok(700.0 * (10f64.powf(m / 2595.0) - 1.0))
}

/// Bank of triangular filters with unit peak, centers equally spaced on
/// the Mel axis, evaluated at the one-sided FFT bin frequencies.
#[derive(Debug)]
pub struct MelFilterbank {
    pub n_filters: usize,
    /// `n_filters × n_bins` triangle weights.
    pub weights: Array2<f64>,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, n_fft: usize, fs: f64, fmin_hz: f64, fmax_hz: f64) -> Result<Self> {
        if n_filters == 0 {
            return Err(Error::Validation("filterbank needs at least one filter".into()));
        }
        if n_fft < 2 {
            return Err(Error::Validation("FFT length must be at least 2".into()));
        }
        if !(fmin_hz >= 0.0 && fmin_hz < fmax_hz && fmax_hz <= fs / 2.0) {
            return Err(Error::Validation(format!(
                "filterbank band [{fmin_hz}, {fmax_hz}] invalid for fs {fs}"
            )));
        }
        let m_lo = hz_to_mel(fmin_hz)?;
        let m_hi = hz_to_mel(fmax_hz)?;
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(m_lo + (m_hi - m_lo) * i as f64 / (n_filters + 1) as f64))
            .collect::<Result<_>>()?;
        let n_bins = n_fft / 2 + 1;
        let mut weights = Array2::<f64>::zeros((n_filters, n_bins));
        for j in 0..n_filters {
            let (left, center, right) = (edges[j], edges[j + 1], edges[j + 2]);
            for k in 0..n_bins {
                let f = k as f64 * fs / n_fft as f64;
                let w = if f > left && f <= center {
                    (f - left) / (center - left)
                } else if f > center && f < right {
                    (right - f) / (right - center)
                } else {
                    0.0
                };
                weights[[j, k]] = w;
            }
        }
        Ok(MelFilterbank {
            n_filters,
            weights,
            fmin_hz,
            fmax_hz,
        })
    }

    /// Filter energies for a one-sided power spectrum.
    pub fn apply(&self, power: &[f64]) -> Result<Vec<f64>> {
        if power.len() != self.weights.ncols() {
            return Err(Error::LengthMismatch {
                what: "power spectrum bins for Mel filterbank",
                expected: self.weights.ncols(),
                actual: power.len(),
            });
        }
        Ok(self.weights.dot(&ArrayView1::from(power)).to_vec())
    }
}

type FilterbankKey = (usize, usize, u64, u64, u64);

fn filterbank_cache() -> &'static Mutex<HashMap<FilterbankKey, Arc<MelFilterbank>>> {
    static CACHE: OnceLock<Mutex<HashMap<FilterbankKey, Arc<MelFilterbank>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns a shared filterbank, building it on first use per
/// `(n_filters, n_fft, fs, band)` combination.
pub fn cached_filterbank(
    n_filters: usize,
    n_fft: usize,
    fs: f64,
    fmin_hz: f64,
    fmax_hz: f64,
) -> Result<Arc<MelFilterbank>> {
    let key = (
        n_filters,
        n_fft,
        fs.to_bits(),
        fmin_hz.to_bits(),
        fmax_hz.to_bits(),
    );
    let mut cache = filterbank_cache().lock().unwrap();
    if let Some(fb) = cache.get(&key) {
        return Ok(fb.clone());
    }
    let fb = Arc::new(MelFilterbank::new(n_filters, n_fft, fs, fmin_hz, fmax_hz)?);
    cache.insert(key, fb.clone());
    Ok(fb)
}

/// Orthonormal DCT-II of a real sequence.
pub fn dct2_orthonormal(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let mf = m as f64;
    (0..m)
        .map(|k| {
            let alpha = if k == 0 {
                (1.0 / mf).sqrt()
            } else {
                (2.0 / mf).sqrt()
            };
            let sum: f64 = x
                .iter()
                .enumerate()
                .map(|(j, &v)| v * (PI * k as f64 * (2 * j + 1) as f64 / (2.0 * mf)).cos())
                .sum();
            alpha * sum
        })
        .collect()
}

/// Mean MFCC vector with the standard defaults (20 coefficients, 26
/// filters, 256-sample frames, 128-sample hop).
pub fn mfcc(signal: &[f64], fs: f64) -> Result<Vec<f64>> {
    mfcc_with(
        signal,
        fs,
        DEFAULT_N_COEFFS,
        DEFAULT_N_FILTERS,
        DEFAULT_FRAME_LEN,
        DEFAULT_HOP,
    )
}

/// MFCC pipeline: Hann-windowed frames, magnitude-squared FFT, Mel
/// filterbank, floored natural log, orthonormal DCT-II, truncation to
/// `n_coeffs`, arithmetic mean over frames. A signal shorter than one
/// frame is zero-padded into a single frame.
pub fn mfcc_with(
    signal: &[f64],
    fs: f64,
    n_coeffs: usize,
    n_filters: usize,
    frame_len: usize,
    hop: usize,
) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(Error::Validation("empty signal for MFCC".into()));
    }
    if n_coeffs == 0 || n_coeffs > n_filters {
        return Err(Error::Validation(format!(
            "cannot keep {n_coeffs} coefficients from {n_filters} filters"
        )));
    }
    if frame_len < 2 || hop == 0 {
        return Err(Error::Validation("frame length or hop too small".into()));
    }
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(Error::Validation("sampling rate must be positive".into()));
    }

    let fb = cached_filterbank(n_filters, frame_len, fs, 0.0, fs / 2.0)?;
    let window = hann_periodic(frame_len);
    let fft = FftPlanner::new().plan_fft_forward(frame_len);
    let n_bins = frame_len / 2 + 1;

    let mut frame_starts: Vec<usize> = Vec::new();
    let mut padded = false;
    if signal.len() < frame_len {
        padded = true;
        frame_starts.push(0);
        log::warn!(
            "signal of {} samples shorter than one {frame_len}-sample frame; zero-padding",
            signal.len()
        );
    } else {
        let mut start = 0;
        while start + frame_len <= signal.len() {
            frame_starts.push(start);
            start += hop;
        }
    }

    let mut mean = vec![0.0; n_coeffs];
    let mut buf = vec![Complex64::new(0.0, 0.0); frame_len];
    let mut power = vec![0.0; n_bins];
    for &start in &frame_starts {
        for (i, slot) in buf.iter_mut().enumerate() {
            let x = if padded {
                *signal.get(start + i).unwrap_or(&0.0)
            } else {
                signal[start + i]
            };
            *slot = Complex64::new(x * window[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, p) in power.iter_mut().enumerate() {
            *p = buf[k].norm_sqr();
        }
        let energies = fb.apply(&power)?;
        let logs: Vec<f64> = energies
            .iter()
            .map(|&e| e.max(LOG_POWER_FLOOR).ln())
            .collect();
        let coeffs = dct2_orthonormal(&logs);
        for (m, c) in mean.iter_mut().zip(&coeffs[..n_coeffs]) {
            *m += c;
        }
    }
    let n_frames = frame_starts.len() as f64;
    for m in &mut mean {
        *m /= n_frames;
    }
    Ok(mean)
}
