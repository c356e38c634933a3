use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const DEFAULT_SEG_LEN: usize = 256;
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Default peak-amplitude band: the full filtered range.
pub const PA_BAND_DEFAULT: (f64, f64) = (0.08, 5.0);
/// Named preset for the maternal-heart-rate band.
pub const PA_BAND_MHR: (f64, f64) = (1.0, 2.2);

/// One-sided power spectral density estimate.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    pub freqs_hz: Vec<f64>,
    /// Power per Hz at each frequency.
    pub psd: Vec<f64>,
    pub resolution_hz: f64,
    /// True when the input was shorter than the requested segment length
    /// and a single full-length periodogram was used instead.
    pub fallback: bool,
}

/// Periodic Hann window of length `n`.
pub fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

fn periodogram_into(
    x: &[f64],
    window: &[f64],
    fs: f64,
    fft: &std::sync::Arc<dyn rustfft::Fft<f64>>,
    acc: &mut [f64],
) {
    let n = window.len();
    let mut buf: Vec<Complex64> = x
        .iter()
        .zip(window)
        .map(|(&v, &w)| Complex64::new(v * w, 0.0))
        .collect();
    fft.process(&mut buf);
    let scale = 1.0 / (fs * window.iter().map(|w| w * w).sum::<f64>());
    let n_bins = acc.len();
    for (k, slot) in acc.iter_mut().enumerate() {
        let mut p = buf[k].norm_sqr() * scale;
        // double everything except DC and (for even n) Nyquist
        let is_nyquist = n % 2 == 0 && k == n_bins - 1;
        if k != 0 && !is_nyquist {
            p *= 2.0;
        }
        *slot += p;
    }
}

/// Welch PSD: averaged one-sided Hann periodograms with fractional
/// overlap. A signal shorter than `seg_len` degrades to one full-length
/// periodogram with `fallback` set.
pub fn welch_psd(signal: &[f64], fs: f64, seg_len: usize, overlap: f64) -> Result<PowerSpectrum> {
    if signal.is_empty() {
        return Err(Error::Validation("empty signal for Welch PSD".into()));
    }
    if seg_len < 2 {
        return Err(Error::Validation("Welch segment length must be at least 2".into()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Validation(format!(
            "overlap fraction {overlap} outside [0, 1)"
        )));
    }
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(Error::Validation("sampling rate must be positive".into()));
    }

    let (n, fallback) = if signal.len() < seg_len {
        (signal.len(), true)
    } else {
        (seg_len, false)
    };
    let hop = n - (n as f64 * overlap).floor() as usize;
    let window = hann_periodic(n);
    let n_bins = n / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let fft = FftPlanner::new().plan_fft_forward(n);

    let mut n_segments = 0usize;
    let mut start = 0usize;
    while start + n <= signal.len() {
        periodogram_into(&signal[start..start + n], &window, fs, &fft, &mut acc);
        n_segments += 1;
        start += hop;
    }
    debug_assert!(n_segments >= 1);
    for p in &mut acc {
        *p /= n_segments as f64;
    }

    let resolution_hz = fs / n as f64;
    Ok(PowerSpectrum {
        freqs_hz: (0..n_bins).map(|k| k as f64 * resolution_hz).collect(),
        psd: acc,
        resolution_hz,
        fallback,
    })
}

/// Peak amplitude of the band-normalized spectrum: the largest in-band
/// PSD value divided by the in-band total.
pub fn peak_amplitude(ps: &PowerSpectrum, f_low: f64, f_high: f64) -> Result<f64> {
    if !(f_low <= f_high) {
        return Err(Error::Validation(format!(
            "inverted band [{f_low}, {f_high}]"
        )));
    }
    let mut total = 0.0;
    let mut max = f64::MIN;
    let mut any = false;
    for (&f, &p) in ps.freqs_hz.iter().zip(&ps.psd) {
        if f >= f_low && f <= f_high {
            any = true;
            total += p;
            if p > max {
                max = p;
            }
        }
    }
    if !any {
        return Err(Error::Validation(format!(
            "band [{f_low}, {f_high}] contains no spectral bins"
        )));
    }
    if total <= 0.0 {
        return Err(Error::UndefinedFeature("peak amplitude of a zero-power band"));
    }
    Ok(max / total)
}
