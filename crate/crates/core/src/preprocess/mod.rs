//! Band-pass filtering and segmentation of raw recordings.

mod butterworth;
mod segment;

pub use butterworth::{apply_zero_phase, design_butterworth_bandpass, BandpassFilter, Sos};
pub use segment::{
    segment_annotated, segment_fixed, Segment, WindowKind, DEFAULT_WINDOW_SECONDS,
    MIN_SEGMENT_LEN,
};

/// Default band edges and prototype order for the EHG band-pass.
pub const DEFAULT_FILTER_ORDER: usize = 4;
pub const DEFAULT_LOW_CUT_HZ: f64 = 0.08;
pub const DEFAULT_HIGH_CUT_HZ: f64 = 5.0;
