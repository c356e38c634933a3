use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// One biquad stage, direct form coefficients with `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sos {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Sos {
    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

/// Digital Butterworth band-pass filter as a cascade of biquads.
///
/// `order` is the analog low-pass prototype order; the band-pass
/// transformation doubles it, so `order = 4` yields 8 poles in 4 sections.
#[derive(Debug, Clone)]
pub struct BandpassFilter {
    pub order: usize,
    pub low_cut_hz: f64,
    pub high_cut_hz: f64,
    pub sampling_rate_hz: f64,
    pub sections: Vec<Sos>,
}

impl BandpassFilter {
    /// Reflection padding used by the zero-phase pass: three times the
    /// effective (doubled) filter order per side.
    pub fn pad_len(&self) -> usize {
        6 * self.order
    }

    /// Single-pass complex response at a frequency in Hz.
    pub fn response_at(&self, freq_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz / self.sampling_rate_hz;
        let z1 = Complex64::new(0.0, -w).exp();
        let z2 = z1 * z1;
        let mut h = Complex64::new(1.0, 0.0);
        for s in &self.sections {
            h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
        }
        h
    }

    /// Single-pass magnitude at a frequency in Hz.
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        self.response_at(freq_hz).norm()
    }
}

/// Designs the digital band-pass: analog Butterworth prototype,
/// pre-warped low-pass→band-pass transform, bilinear mapping, and gain
/// normalized to exactly 1 at the warped center frequency.
pub fn design_butterworth_bandpass(
    order: usize,
    low_cut_hz: f64,
    high_cut_hz: f64,
    fs: f64,
) -> Result<BandpassFilter> {
    if order == 0 || order % 2 != 0 {
        return Err(Error::Validation(format!(
            "prototype order must be even and positive, got {order}"
        )));
    }
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(Error::Validation("sampling rate must be positive".into()));
    }
    let nyquist = fs / 2.0;
    if !(low_cut_hz > 0.0 && low_cut_hz < high_cut_hz && high_cut_hz < nyquist) {
        return Err(Error::Validation(format!(
            "cutoffs must satisfy 0 < {low_cut_hz} < {high_cut_hz} < Nyquist {nyquist}"
        )));
    }

    // Pre-warp the edges so the bilinear transform lands them exactly.
    let w1 = 2.0 * fs * (PI * low_cut_hz / fs).tan();
    let w2 = 2.0 * fs * (PI * high_cut_hz / fs).tan();
    let bw = w2 - w1;
    let w0 = (w1 * w2).sqrt();

    // Prototype poles on the unit circle, left half-plane; each maps to a
    // pair of band-pass poles via s² − p·bw·s + w0² = 0.
    let mut analog_poles = Vec::with_capacity(2 * order);
    for k in 0..order {
        let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
        let p = Complex64::new(theta.cos(), theta.sin());
        let pbw = p * bw;
        let disc = (pbw * pbw - 4.0 * w0 * w0).sqrt();
        analog_poles.push((pbw + disc) / 2.0);
        analog_poles.push((pbw - disc) / 2.0);
    }

    let fs2 = 2.0 * fs;
    let mut upper: Vec<Complex64> = Vec::with_capacity(order);
    for s in analog_poles {
        let z = (fs2 + s) / (fs2 - s);
        if z.norm() >= 1.0 {
            return Err(Error::Numeric(format!(
                "unstable pole at |z| = {}",
                z.norm()
            )));
        }
        if z.im > 0.0 {
            upper.push(z);
        }
    }
    if upper.len() != order {
        return Err(Error::Numeric(
            "expected strictly complex conjugate pole pairs".into(),
        ));
    }
    upper.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    // Each section takes one conjugate pole pair and one zero pair at z=±1.
    let mut sections: Vec<Sos> = upper
        .iter()
        .map(|p| Sos {
            b0: 1.0,
            b1: 0.0,
            b2: -1.0,
            a1: -2.0 * p.re,
            a2: p.norm_sqr(),
        })
        .collect();

    let mut filter = BandpassFilter {
        order,
        low_cut_hz,
        high_cut_hz,
        sampling_rate_hz: fs,
        sections: Vec::new(),
    };
    filter.sections = sections.clone();
    // Warped center: the analog response is exactly 1 at w0.
    let center_hz = fs / PI * (w0 / fs2).atan();
    let gain = filter.magnitude_at(center_hz);
    if !(gain.is_finite() && gain > 0.0) {
        return Err(Error::Numeric("degenerate gain normalization".into()));
    }
    let per_section = (1.0 / gain).powf(1.0 / sections.len() as f64);
    for s in &mut sections {
        s.b0 *= per_section;
        s.b2 *= per_section;
    }
    filter.sections = sections;
    Ok(filter)
}

/// Runs the biquad cascade once, forward, with step-matched initial
/// conditions scaled to the first sample.
fn sos_filter(sections: &[Sos], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut amp = *x.first().unwrap_or(&0.0);
    for s in sections {
        let g = s.dc_gain();
        let mut z1 = (g - s.b0) * amp;
        let mut z2 = (s.b2 - s.a2 * g) * amp;
        for v in y.iter_mut() {
            let xn = *v;
            let out = s.b0 * xn + z1;
            z1 = s.b1 * xn - s.a1 * out + z2;
            z2 = s.b2 * xn - s.a2 * out;
            *v = out;
        }
        amp *= g;
    }
    y
}

/// Forward–backward (zero-phase) filtering with odd-reflection padding.
///
/// The effective magnitude response is the squared single-pass response,
/// so the designed −3 dB edges sit at −6 dB after application.
pub fn apply_zero_phase(filter: &BandpassFilter, signal: &[f64]) -> Result<Vec<f64>> {
    let pad = filter.pad_len();
    let n = signal.len();
    if n <= pad {
        return Err(Error::LengthMismatch {
            what: "signal for zero-phase filtering",
            expected: pad + 1,
            actual: n,
        });
    }
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        ext.push(2.0 * signal[0] - signal[i]);
    }
    ext.extend_from_slice(signal);
    for i in 0..pad {
        ext.push(2.0 * signal[n - 1] - signal[n - 2 - i]);
    }

    let mut once = sos_filter(&filter.sections, &ext);
    once.reverse();
    let mut twice = sos_filter(&filter.sections, &once);
    twice.reverse();
    Ok(twice[pad..pad + n].to_vec())
}
