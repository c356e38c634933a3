use crate::error::{Error, Result};
use crate::klt::DEFAULT_LAG;
use crate::record::{Group, IntervalAnnotation, IntervalKind, Record};

/// Default blind-window length in seconds (3 minutes).
pub const DEFAULT_WINDOW_SECONDS: f64 = 180.0;

/// Segments shorter than this cannot be framed by the denoiser.
pub const MIN_SEGMENT_LEN: usize = 2 * DEFAULT_LAG;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Contraction,
    Dummy,
    Fixed,
}

impl From<IntervalKind> for WindowKind {
    fn from(kind: IntervalKind) -> WindowKind {
        match kind {
            IntervalKind::Contraction => WindowKind::Contraction,
            IntervalKind::Dummy => WindowKind::Dummy,
        }
    }
}

impl WindowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Contraction => "contraction",
            WindowKind::Dummy => "dummy",
            WindowKind::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<WindowKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "contraction" => Some(WindowKind::Contraction),
            "dummy" => Some(WindowKind::Dummy),
            "fixed" => Some(WindowKind::Fixed),
            _ => None,
        }
    }
}

/// One labeled multichannel window cut from a record.
#[derive(Debug, Clone)]
pub struct Segment {
    pub record_name: String,
    pub channels: Vec<Vec<f64>>,
    pub label: Group,
    pub window_kind: WindowKind,
    pub start_sample: usize,
    pub end_sample: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end_sample - self.start_sample
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn slice_segment(record: &Record, start: usize, end: usize, kind: WindowKind) -> Result<Segment> {
    if end > record.n_samples() || start >= end {
        return Err(Error::Validation(format!(
            "interval [{start}, {end}) out of bounds for record `{}` with {} samples",
            record.name(),
            record.n_samples()
        )));
    }
    if end - start < MIN_SEGMENT_LEN {
        return Err(Error::Validation(format!(
            "interval [{start}, {end}) of record `{}` is shorter than {MIN_SEGMENT_LEN} samples",
            record.name()
        )));
    }
    Ok(Segment {
        record_name: record.name().to_string(),
        channels: record
            .signals
            .iter()
            .map(|ch| ch[start..end].to_vec())
            .collect(),
        label: record.group,
        window_kind: kind,
        start_sample: start,
        end_sample: end,
    })
}

/// Cuts a record into non-overlapping fixed-length windows; the trailing
/// remainder is discarded. A record shorter than one window yields an
/// empty list.
pub fn segment_fixed(record: &Record, window_seconds: f64) -> Result<Vec<Segment>> {
    if !(window_seconds > 0.0) || !window_seconds.is_finite() {
        return Err(Error::Validation("window length must be positive".into()));
    }
    let window = (window_seconds * record.sampling_rate_hz()).round() as usize;
    if window < MIN_SEGMENT_LEN {
        return Err(Error::Validation(format!(
            "window of {window} samples is shorter than {MIN_SEGMENT_LEN}"
        )));
    }
    let n_windows = record.n_samples() / window;
    (0..n_windows)
        .map(|w| slice_segment(record, w * window, (w + 1) * window, WindowKind::Fixed))
        .collect()
}

/// Cuts one segment per annotation of this record, in manifest order.
/// Annotations for other records are ignored so the full manifest can be
/// passed as-is.
pub fn segment_annotated(
    record: &Record,
    annotations: &[IntervalAnnotation],
) -> Result<Vec<Segment>> {
    annotations
        .iter()
        .filter(|a| a.record_name == record.name())
        .map(|a| slice_segment(record, a.start_sample, a.end_sample, a.kind.into()))
        .collect()
}
