//! PhysioNet WFDB record ingestion.
//!
//! Parses `.hea` header text, decodes format-16 `.dat` signal files into
//! physical units and loads interval annotations from a CSV manifest.
//! Only storage format 16 (16-bit two's complement, little-endian,
//! sample-major interleaving) is supported; both target datasets use it.

mod annotations;
mod header;
mod signal;

pub use annotations::{load_annotations, IntervalAnnotation, IntervalKind};
pub use header::parse_header;
pub use signal::{decode_format16, encode_format16, read_signals, write_record_files};

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// WFDB default when the header omits or zeroes the gain field.
pub const DEFAULT_ADC_GAIN: f64 = 200.0;

/// Per-signal description from one header line.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    /// Storage format code; only 16 survives parsing.
    pub format: u16,
    /// ADC units per physical unit.
    pub adc_gain: f64,
    /// ADC value corresponding to 0 physical units.
    pub baseline: i32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordHeader {
    pub record_name: String,
    pub sampling_rate_hz: f64,
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
    /// `#`-comment lines, stripped and trimmed.
    pub comments: Vec<String>,
    /// Gestational age at delivery, taken from a `Gestation` comment.
    pub gestation_weeks: Option<f64>,
}

impl RecordHeader {
    pub fn n_channels(&self) -> usize {
        self.signals.len()
    }
}

/// Subject group of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    Preterm,
    Term,
    NonPregnant,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Preterm => "preterm",
            Group::Term => "term",
            Group::NonPregnant => "nonpregnant",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        match s.trim().to_ascii_lowercase().as_str() {
            "preterm" => Some(Group::Preterm),
            "term" => Some(Group::Term),
            "nonpregnant" | "non-pregnant" => Some(Group::NonPregnant),
            _ => None,
        }
    }
}

/// Deliveries before 37 weeks of gestation count as preterm.
pub const PRETERM_GESTATION_WEEKS: f64 = 37.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelRole {
    Ehg,
    Toco,
}

/// One subject's multichannel recording in physical units.
#[derive(Debug, Clone)]
pub struct Record {
    pub header: RecordHeader,
    /// Per-channel samples, each of length `header.n_samples`.
    pub signals: Vec<Vec<f64>>,
    pub group: Group,
    pub channel_roles: Vec<ChannelRole>,
    pub gestation_weeks: Option<f64>,
}

impl Record {
    pub fn name(&self) -> &str {
        &self.header.record_name
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.header.sampling_rate_hz
    }

    pub fn n_samples(&self) -> usize {
        self.header.n_samples
    }

    /// Projects the record onto a subset of channels, in the given order.
    pub fn select_channels(&self, indices: &[usize]) -> Result<Record> {
        for &i in indices {
            if i >= self.signals.len() {
                return Err(Error::Validation(format!(
                    "channel index {i} out of range for {} channels",
                    self.signals.len()
                )));
            }
        }
        let mut header = self.header.clone();
        header.signals = indices
            .iter()
            .map(|&i| self.header.signals[i].clone())
            .collect();
        Ok(Record {
            header,
            signals: indices.iter().map(|&i| self.signals[i].clone()).collect(),
            group: self.group,
            channel_roles: indices.iter().map(|&i| self.channel_roles[i]).collect(),
            gestation_weeks: self.gestation_weeks,
        })
    }
}

/// TOCO channels are recognized by their label; everything else is EHG.
pub fn role_of_label(label: &str) -> ChannelRole {
    if label.to_ascii_lowercase().contains("toco") {
        ChannelRole::Toco
    } else {
        ChannelRole::Ehg
    }
}

/// Heuristic for dataset-side pre-filtered channels ("Filt EHG", "S1_filt", ...).
pub fn is_filtered_label(label: &str) -> bool {
    label.to_ascii_lowercase().contains("filt")
}

/// Resolves the subject group for a record.
///
/// Precedence: explicit index entry, then a `Gestation` header comment
/// (preterm below 37 weeks), then the TPEHGT record-name convention
/// (`..._p*` / `..._t*` / `..._n*`).
pub fn resolve_group(
    record_name: &str,
    header: &RecordHeader,
    index: Option<&BTreeMap<String, Group>>,
) -> Option<Group> {
    if let Some(map) = index {
        if let Some(&g) = map.get(record_name) {
            return Some(g);
        }
    }
    if let Some(weeks) = header.gestation_weeks {
        return Some(if weeks < PRETERM_GESTATION_WEEKS {
            Group::Preterm
        } else {
            Group::Term
        });
    }
    let lower = record_name.to_ascii_lowercase();
    for (suffix_tag, group) in [
        ("_p", Group::Preterm),
        ("_t", Group::Term),
        ("_n", Group::NonPregnant),
    ] {
        if let Some(pos) = lower.rfind(suffix_tag) {
            let rest = &lower[pos + 2..];
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                return Some(group);
            }
        }
    }
    None
}

/// Parses a record→group index CSV (`record,group`, header row required).
pub fn load_group_index(text: &str) -> Result<BTreeMap<String, Group>> {
    let mut map = BTreeMap::new();
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    match lines.next() {
        Some((_, first)) if first.trim().to_ascii_lowercase().starts_with("record") => {}
        Some((i, _)) => {
            return Err(Error::Parse {
                line: i + 1,
                message: "index must start with a `record,group` header row".into(),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty group index".into(),
            })
        }
    }
    for (i, line) in lines {
        let mut fields = line.split(',');
        let name = fields.next().unwrap_or("").trim();
        let group = fields.next().and_then(Group::parse).ok_or(Error::Parse {
            line: i + 1,
            message: format!("bad group in index row `{line}`"),
        })?;
        if name.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty record name".into(),
            });
        }
        map.insert(name.to_string(), group);
    }
    Ok(map)
}

/// Loads a record from `<dir>/<name>.hea` plus its `.dat` files.
pub fn load_record(
    hea_path: &Path,
    index: Option<&BTreeMap<String, Group>>,
) -> Result<Record> {
    let text = std::fs::read_to_string(hea_path)?;
    let header = parse_header(&text)?;
    let dir = hea_path.parent().unwrap_or_else(|| Path::new("."));
    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    for spec in &header.signals {
        if !files.contains_key(&spec.file_name) {
            let bytes = std::fs::read(dir.join(&spec.file_name))?;
            files.insert(spec.file_name.clone(), bytes);
        }
    }
    let signals = read_signals(&header, &files)?;
    let group = resolve_group(&header.record_name, &header, index).ok_or_else(|| {
        Error::Validation(format!(
            "cannot resolve group for record `{}`; provide an index file",
            header.record_name
        ))
    })?;
    let channel_roles = header
        .signals
        .iter()
        .map(|s| role_of_label(&s.label))
        .collect();
    let gestation_weeks = header.gestation_weeks;
    Ok(Record {
        header,
        signals,
        group,
        channel_roles,
        gestation_weeks,
    })
}
