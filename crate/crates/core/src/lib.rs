//! Preterm-birth prediction from electrohysterography (EHG) and tocography
//! (TOCO) recordings.
//!
//! The crate covers the full pipeline:
//!
//! * [`record`] — WFDB header/signal parsing and interval annotations
//! * [`preprocess`] — Butterworth band-pass filtering and segmentation
//! * [`klt`] — Karhunen–Loève subspace denoising
//! * [`spectral`] — Welch PSD, normalized-spectrum peak amplitude, MFCCs
//! * [`wavelet`] — db8 discrete wavelet transform and sub-band statistics
//! * [`features`] — per-segment 57-feature assembly and CSV emission
//! * [`classify`] — the classical model suite behind one fit/score interface
//! * [`eval`] — metrics and the balanced-subsampling stratified-CV harness
//!
//! Batch entry points (`features::extract_batch`, `eval::run_experiment`,
//! `klt::denoise_batch`) run data-parallel with the default `parallel`
//! feature and fall back to sequential loops without it. Results are
//! independent of thread count.

pub mod classify;
pub mod eigen;
pub mod error;
pub mod eval;
pub mod features;
pub mod klt;
mod par;
pub mod preprocess;
pub mod record;
pub mod rng;
pub mod spectral;
pub mod wavelet;

pub use error::{Error, Result};
