//! Spectral features: Welch power spectra, normalized-spectrum peak
//! amplitude, and Mel-frequency cepstral coefficients.

mod mel;
mod welch;

pub use mel::{
    cached_filterbank, dct2_orthonormal, hz_to_mel, mel_to_hz, mfcc, mfcc_with, MelFilterbank,
    DEFAULT_FRAME_LEN, DEFAULT_HOP, DEFAULT_N_COEFFS, DEFAULT_N_FILTERS, LOG_POWER_FLOOR,
};
pub use welch::{
    hann_periodic, peak_amplitude, welch_psd, PowerSpectrum, DEFAULT_OVERLAP, DEFAULT_SEG_LEN,
    PA_BAND_DEFAULT, PA_BAND_MHR,
};
