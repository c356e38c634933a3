//! Dataset traversal and the record→segments→features pipeline behind
//! the `ingest`, `features` and `ablate` verbs.

use crate::config::{KltScope, PipelineConfig};
use ehg_core::classify::{LabeledDataset, RowProvenance};
use ehg_core::eval::{ChannelSet, Regime};
use ehg_core::features;
use ehg_core::klt;
use ehg_core::preprocess::{
    apply_zero_phase, design_butterworth_bandpass, segment_annotated, segment_fixed, Segment,
    DEFAULT_FILTER_ORDER, DEFAULT_HIGH_CUT_HZ, DEFAULT_LOW_CUT_HZ,
};
use ehg_core::record::{
    is_filtered_label, load_annotations, load_group_index, load_record, role_of_label, ChannelRole,
    Group, IntervalAnnotation, Record,
};
use ehg_core::{Error, Result};
use ndarray::Array2;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Every `.hea` file directly under the dataset root, sorted by file name.
pub fn scan_header_paths(root: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(root)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "hea") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Validation(format!(
            "no .hea records found under `{}`",
            root.display()
        )));
    }
    Ok(paths)
}

/// The explicit `dataset.index` file, or `<root>/groups.csv` when present.
pub fn load_group_index_opt(cfg: &PipelineConfig) -> Result<Option<BTreeMap<String, Group>>> {
    let path = match &cfg.group_index {
        Some(p) => p.clone(),
        None => {
            let fallback = cfg.dataset_root.join("groups.csv");
            if !fallback.is_file() {
                return Ok(None);
            }
            fallback
        }
    };
    let text = std::fs::read_to_string(&path)?;
    Ok(Some(load_group_index(&text)?))
}

/// The annotation manifest required by the annotated regime: the explicit
/// `dataset.annotations` file, or `<root>/annotations.csv`.
pub fn load_annotations_required(cfg: &PipelineConfig) -> Result<Vec<IntervalAnnotation>> {
    let path = match &cfg.annotations {
        Some(p) => p.clone(),
        None => {
            let fallback = cfg.dataset_root.join("annotations.csv");
            if !fallback.is_file() {
                return Err(Error::Validation(
                    "segmentation.mode = annotated needs an interval manifest; \
                     set dataset.annotations or provide <root>/annotations.csv"
                        .into(),
                ));
            }
            fallback
        }
    };
    let text = std::fs::read_to_string(&path)?;
    load_annotations(&text)
}

/// Keeps the unfiltered EHG channels (and TOCO, when requested), applies
/// the band-pass filter, and for record-scope KLT denoises whole channels.
pub fn prepare_channels(record: &Record, cfg: &PipelineConfig) -> Result<Record> {
    let include_toco = cfg.channel_set == ChannelSet::EhgPlusToco;
    let mut keep = Vec::new();
    let mut saw_ehg = false;
    let mut saw_toco = false;
    for (i, spec) in record.header.signals.iter().enumerate() {
        if is_filtered_label(&spec.label) {
            continue;
        }
        match role_of_label(&spec.label) {
            ChannelRole::Ehg => {
                saw_ehg = true;
                keep.push(i);
            }
            ChannelRole::Toco => {
                saw_toco = true;
                if include_toco {
                    keep.push(i);
                }
            }
        }
    }
    if !saw_ehg {
        return Err(Error::Validation(format!(
            "record `{}` has no unfiltered EHG channel",
            record.name()
        )));
    }
    if include_toco && !saw_toco {
        return Err(Error::Validation(format!(
            "record `{}` has no TOCO channel but channels.set asks for one",
            record.name()
        )));
    }
    let mut selected = record.select_channels(&keep)?;

    let filter = design_butterworth_bandpass(
        DEFAULT_FILTER_ORDER,
        DEFAULT_LOW_CUT_HZ,
        DEFAULT_HIGH_CUT_HZ,
        selected.sampling_rate_hz(),
    )?;
    for chan in &mut selected.signals {
        *chan = apply_zero_phase(&filter, chan)?;
    }
    if cfg.klt_enabled && cfg.klt_scope == KltScope::Record {
        for chan in &mut selected.signals {
            *chan = klt::denoise(chan, cfg.klt_lag, cfg.klt_jump_threshold)?;
        }
    }
    Ok(selected)
}

fn segments_of(
    record: &Record,
    cfg: &PipelineConfig,
    annotations: &[IntervalAnnotation],
) -> Result<Vec<Segment>> {
    match cfg.regime {
        Regime::Fixed => segment_fixed(record, cfg.window_seconds),
        Regime::Annotated => segment_annotated(record, annotations),
    }
}

/// One segment that could not be featurized; the run only aborts when
/// more than 1% of segments fail.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFailure {
    pub record_name: String,
    pub segment_index: usize,
    pub message: String,
}

pub struct FeatureBuild {
    pub dataset: LabeledDataset,
    pub failures: Vec<FeatureFailure>,
    pub n_segments: usize,
    pub n_records: usize,
}

/// Runs the full extraction pipeline for the configured dataset. Rows are
/// ordered by record name, then by segment position within the record.
pub fn build_features(cfg: &PipelineConfig) -> Result<FeatureBuild> {
    let paths = scan_header_paths(&cfg.dataset_root)?;
    let index = load_group_index_opt(cfg)?;
    let annotations = match cfg.regime {
        Regime::Annotated => load_annotations_required(cfg)?,
        Regime::Fixed => Vec::new(),
    };

    let mut records = Vec::new();
    for path in &paths {
        let record = load_record(path, index.as_ref())?;
        if record.group == Group::NonPregnant {
            log::info!(
                "skipping non-pregnant record `{}`; it has no preterm/term label",
                record.name()
            );
            continue;
        }
        records.push(prepare_channels(&record, cfg)?);
    }
    if records.is_empty() {
        return Err(Error::Validation(
            "no pregnant-subject records to extract features from".into(),
        ));
    }
    records.sort_by(|a, b| a.name().cmp(b.name()));
    for pair in records.windows(2) {
        if pair[0].name() == pair[1].name() {
            return Err(Error::Validation(format!(
                "duplicate record name `{}`",
                pair[0].name()
            )));
        }
    }

    let fs = records[0].sampling_rate_hz();
    let expected_channels = cfg.n_channels();
    for r in &records {
        if r.sampling_rate_hz() != fs {
            return Err(Error::Validation(format!(
                "record `{}` samples at {} Hz but `{}` at {} Hz; one dataset per run",
                r.name(),
                r.sampling_rate_hz(),
                records[0].name(),
                fs
            )));
        }
        if r.signals.len() != expected_channels {
            return Err(Error::Validation(format!(
                "record `{}` provides {} channels after selection but a {} dataset \
                 with this channel set should provide {}",
                r.name(),
                r.signals.len(),
                cfg.dataset_kind.as_str(),
                expected_channels
            )));
        }
    }

    let mut segments = Vec::new();
    let mut origin = Vec::new(); // (record_name, record-local segment index, label)
    for record in &records {
        let segs = segments_of(record, cfg, &annotations)?;
        if segs.is_empty() {
            log::warn!("record `{}` yields no segments", record.name());
        }
        for (local, seg) in segs.into_iter().enumerate() {
            origin.push((record.name().to_string(), local, seg.label));
            segments.push(seg);
        }
    }
    if segments.is_empty() {
        return Err(Error::Validation(
            "segmentation produced no segments for any record".into(),
        ));
    }

    let fcfg = cfg.feature_config();
    let n_segments = segments.len();
    let rows = features::extract_rows(&segments, fs, &fcfg);

    let mut kept: Vec<(usize, Vec<f64>)> = Vec::with_capacity(n_segments);
    let mut failures = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Ok(r) => kept.push((i, r)),
            Err(e) => failures.push(FeatureFailure {
                record_name: origin[i].0.clone(),
                segment_index: origin[i].1,
                message: e.to_string(),
            }),
        }
    }
    if 100 * failures.len() > n_segments {
        let first = &failures[0];
        return Err(Error::Validation(format!(
            "{} of {} segments failed feature extraction, over the 1% budget; \
             first failure: record `{}` segment {}: {}",
            failures.len(),
            n_segments,
            first.record_name,
            first.segment_index,
            first.message
        )));
    }
    for f in &failures {
        log::warn!(
            "dropping record `{}` segment {}: {}",
            f.record_name,
            f.segment_index,
            f.message
        );
    }

    let n_features = expected_channels * fcfg.n_per_channel();
    let mut x = Array2::<f64>::zeros((kept.len(), n_features));
    let mut y = Vec::with_capacity(kept.len());
    let mut provenance = Vec::with_capacity(kept.len());
    for (out_row, (i, row)) in kept.into_iter().enumerate() {
        if row.len() != n_features {
            return Err(Error::LengthMismatch {
                what: "features in row",
                expected: n_features,
                actual: row.len(),
            });
        }
        for (j, v) in row.into_iter().enumerate() {
            x[[out_row, j]] = v;
        }
        let (ref name, local, label) = origin[i];
        y.push(match label {
            Group::Preterm => 1,
            Group::Term => 0,
            Group::NonPregnant => unreachable!("filtered out above"),
        });
        provenance.push(RowProvenance {
            record_name: name.clone(),
            segment_index: local,
            window_kind: segments[i].window_kind,
        });
    }
    let dataset = LabeledDataset {
        x,
        y,
        provenance,
        feature_names: features::feature_names(expected_channels, &fcfg),
    };
    dataset.validate()?;
    Ok(FeatureBuild {
        dataset,
        failures,
        n_segments,
        n_records: records.len(),
    })
}
