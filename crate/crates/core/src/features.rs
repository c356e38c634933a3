//! Per-channel feature assembly and batch extraction.
//!
//! Each channel yields 57 features at the defaults: 20 MFCCs, 36 wavelet
//! sub-band statistics, and the normalized-spectrum peak amplitude.
//! A segment's feature row concatenates its channels in order.

use crate::classify::{LabeledDataset, RowProvenance};
use crate::error::{Error, Result};
use crate::klt;
use crate::par;
use crate::preprocess::{Segment, WindowKind};
use crate::record::Group;
use crate::spectral;
use crate::wavelet;
use ndarray::Array2;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KltParams {
    pub lag: usize,
    pub jump_threshold: f64,
}

impl Default for KltParams {
    fn default() -> Self {
        KltParams {
            lag: klt::DEFAULT_LAG,
            jump_threshold: klt::DEFAULT_JUMP_THRESHOLD,
        }
    }
}

/// Every knob of the feature pipeline; `Default` reproduces the
/// reference configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Subspace denoising before extraction; `None` skips it.
    pub klt: Option<KltParams>,
    pub psd_seg_len: usize,
    pub psd_overlap: f64,
    pub pa_band: (f64, f64),
    pub mfcc_n_coeffs: usize,
    pub mfcc_n_filters: usize,
    pub mfcc_frame_len: usize,
    pub mfcc_hop: usize,
    pub wavelet_levels: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            klt: Some(KltParams::default()),
            psd_seg_len: spectral::DEFAULT_SEG_LEN,
            psd_overlap: spectral::DEFAULT_OVERLAP,
            pa_band: spectral::PA_BAND_DEFAULT,
            mfcc_n_coeffs: spectral::DEFAULT_N_COEFFS,
            mfcc_n_filters: spectral::DEFAULT_N_FILTERS,
            mfcc_frame_len: spectral::DEFAULT_FRAME_LEN,
            mfcc_hop: spectral::DEFAULT_HOP,
            wavelet_levels: wavelet::DEFAULT_LEVELS,
        }
    }
}

impl FeatureConfig {
    /// Features per channel (57 at the defaults).
    pub fn n_per_channel(&self) -> usize {
        self.mfcc_n_coeffs + 6 * (self.wavelet_levels + 1) + 1
    }
}

/// Feature vector of one channel: MFCC block, wavelet block, peak
/// amplitude. Zero in-band power degrades the peak amplitude to 0 with a
/// warning instead of failing the batch.
pub fn channel_features(signal: &[f64], fs: f64, cfg: &FeatureConfig) -> Result<Vec<f64>> {
    let denoised;
    let x: &[f64] = match &cfg.klt {
        Some(k) => {
            denoised = klt::denoise(signal, k.lag, k.jump_threshold)?;
            &denoised
        }
        None => signal,
    };
    let mut out = Vec::with_capacity(self_len(cfg));
    out.extend(spectral::mfcc_with(
        x,
        fs,
        cfg.mfcc_n_coeffs,
        cfg.mfcc_n_filters,
        cfg.mfcc_frame_len,
        cfg.mfcc_hop,
    )?);
    out.extend(wavelet::wavelet_features_with(x, cfg.wavelet_levels)?);
    let ps = spectral::welch_psd(x, fs, cfg.psd_seg_len, cfg.psd_overlap)?;
    let pa = match spectral::peak_amplitude(&ps, cfg.pa_band.0, cfg.pa_band.1) {
        Ok(v) => v,
        Err(Error::UndefinedFeature(_)) => {
            log::warn!("zero in-band power; substituting 0 for peak amplitude");
            0.0
        }
        Err(e) => return Err(e),
    };
    out.push(pa);
    Ok(out)
}

fn self_len(cfg: &FeatureConfig) -> usize {
    cfg.n_per_channel()
}

/// Column names for `n_channels` concatenated channel blocks.
pub fn feature_names(n_channels: usize, cfg: &FeatureConfig) -> Vec<String> {
    let bands = wavelet::band_names(cfg.wavelet_levels);
    let mut names = Vec::with_capacity(n_channels * cfg.n_per_channel());
    for ch in 1..=n_channels {
        for i in 0..cfg.mfcc_n_coeffs {
            names.push(format!("ch{ch}_mfcc{i:02}"));
        }
        for band in &bands {
            for stat in wavelet::STAT_NAMES {
                names.push(format!("ch{ch}_wl_{band}_{stat}"));
            }
        }
        names.push(format!("ch{ch}_pa"));
    }
    names
}

/// Concatenated feature row for all channels of a segment.
pub fn segment_features(segment: &Segment, fs: f64, cfg: &FeatureConfig) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(segment.channels.len() * cfg.n_per_channel());
    for ch in &segment.channels {
        out.extend(channel_features(ch, fs, cfg)?);
    }
    Ok(out)
}

fn label_of(group: Group) -> Result<u8> {
    match group {
        Group::Preterm => Ok(1),
        Group::Term => Ok(0),
        Group::NonPregnant => Err(Error::Validation(
            "non-pregnant records cannot enter a preterm/term dataset".into(),
        )),
    }
}

/// Feature rows for each segment in order, parallel across segments when
/// the `parallel` feature is active. Failures stay per-segment so callers
/// can apply their own failure policy.
pub fn extract_rows(segments: &[Segment], fs: f64, cfg: &FeatureConfig) -> Vec<Result<Vec<f64>>> {
    par::map_slice(segments, |s| segment_features(s, fs, cfg))
}

/// Extracts features for a batch of segments (parallel across segments
/// when the `parallel` feature is active) and assembles the labeled
/// dataset. Row order follows segment order; the provenance
/// `segment_index` counts segments within each record, so a row stays
/// identifiable after rows from other records are added or dropped.
pub fn extract_batch(segments: &[Segment], fs: f64, cfg: &FeatureConfig) -> Result<LabeledDataset> {
    if segments.is_empty() {
        return Err(Error::Validation("no segments to extract".into()));
    }
    let n_channels = segments[0].channels.len();
    for s in segments {
        if s.channels.len() != n_channels {
            return Err(Error::LengthMismatch {
                what: "channels per segment",
                expected: n_channels,
                actual: s.channels.len(),
            });
        }
    }
    let rows = extract_rows(segments, fs, cfg);

    let n_features = n_channels * cfg.n_per_channel();
    let mut x = Array2::<f64>::zeros((segments.len(), n_features));
    let mut y = Vec::with_capacity(segments.len());
    let mut provenance = Vec::with_capacity(segments.len());
    let mut per_record = BTreeMap::<&str, usize>::new();
    for (i, (row, seg)) in rows.into_iter().zip(segments).enumerate() {
        let row = row?;
        if row.len() != n_features {
            return Err(Error::LengthMismatch {
                what: "features in row",
                expected: n_features,
                actual: row.len(),
            });
        }
        for (j, v) in row.into_iter().enumerate() {
            x[[i, j]] = v;
        }
        let counter = per_record.entry(seg.record_name.as_str()).or_insert(0);
        let segment_index = *counter;
        *counter += 1;
        y.push(label_of(seg.label)?);
        provenance.push(RowProvenance {
            record_name: seg.record_name.clone(),
            segment_index,
            window_kind: seg.window_kind,
        });
    }
    let dataset = LabeledDataset {
        x,
        y,
        provenance,
        feature_names: feature_names(n_channels, cfg),
    };
    dataset.validate()?;
    Ok(dataset)
}

/// Serializes a dataset as CSV: a version comment, a header row of
/// `record,segment_index,window_kind,<features...>,label`, one row per
/// sample. Floats print in shortest round-trip form.
pub fn write_features_csv(dataset: &LabeledDataset) -> Result<String> {
    let mut out = String::from("# ehg-features v1\n");
    out.push_str("record,segment_index,window_kind");
    for name in &dataset.feature_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",label\n");
    for (i, row) in dataset.x.rows().into_iter().enumerate() {
        let p = &dataset.provenance[i];
        if p.record_name.contains(',') {
            return Err(Error::Validation(format!(
                "record name `{}` contains a comma",
                p.record_name
            )));
        }
        out.push_str(&format!(
            "{},{},{}",
            p.record_name,
            p.segment_index,
            p.window_kind.as_str()
        ));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{}\n", dataset.y[i]));
    }
    Ok(out)
}

/// Inverse of [`write_features_csv`].
pub fn read_features_csv(text: &str) -> Result<LabeledDataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hdr_idx, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty feature CSV".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5
        || cols[0] != "record"
        || cols[1] != "segment_index"
        || cols[2] != "window_kind"
        || *cols.last().unwrap() != "label"
    {
        return Err(Error::Parse {
            line: hdr_idx + 1,
            message: "unexpected feature CSV header".into(),
        });
    }
    let feature_names: Vec<String> = cols[3..cols.len() - 1]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let n_features = feature_names.len();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y = Vec::new();
    let mut provenance = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_features + 4 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!(
                    "expected {} fields, found {}",
                    n_features + 4,
                    fields.len()
                ),
            });
        }
        let segment_index: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: "segment_index is not an integer".into(),
        })?;
        let window_kind = WindowKind::parse(fields[2]).ok_or(Error::Parse {
            line: idx + 1,
            message: format!("unknown window kind `{}`", fields[2]),
        })?;
        let mut row = Vec::with_capacity(n_features);
        for f in &fields[3..3 + n_features] {
            row.push(f.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("bad feature value `{f}`"),
            })?);
        }
        let label: u8 = fields[n_features + 3].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: "bad label".into(),
        })?;
        rows.push(row);
        y.push(label);
        provenance.push(RowProvenance {
            record_name: fields[0].to_string(),
            segment_index,
            window_kind,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: hdr_idx + 2,
            message: "feature CSV has no data rows".into(),
        });
    }
    let mut x = Array2::<f64>::zeros((rows.len(), n_features));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    let dataset = LabeledDataset {
        x,
        y,
        provenance,
        feature_names,
    };
    dataset.validate()?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::PI;

    fn noisy_channel(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|i| {
                (2.0 * PI * 0.5 * i as f64 / 20.0).sin() + 0.3 * rng.next_gaussian()
            })
            .collect()
    }

    fn segment(seed: u64, label: Group, kind: WindowKind) -> Segment {
        Segment {
            record_name: format!("rec{seed}"),
            channels: vec![noisy_channel(seed, 1200), noisy_channel(seed + 1000, 1200)],
            label,
            window_kind: kind,
            start_sample: 0,
            end_sample: 1200,
        }
    }

    #[test]
    fn fifty_seven_features_per_channel() {
        let cfg = FeatureConfig::default();
        assert_eq!(cfg.n_per_channel(), 57);
        let f = channel_features(&noisy_channel(1, 1200), 20.0, &cfg).unwrap();
        assert_eq!(f.len(), 57);
        assert!(f.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn names_are_unique_and_shaped() {
        let cfg = FeatureConfig::default();
        let names = feature_names(3, &cfg);
        assert_eq!(names.len(), 171);
        let mut uniq = names.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 171);
        assert_eq!(names[0], "ch1_mfcc00");
        assert_eq!(names[19], "ch1_mfcc19");
        assert_eq!(names[20], "ch1_wl_d1_mean");
        assert_eq!(names[55], "ch1_wl_a5_kurt");
        assert_eq!(names[56], "ch1_pa");
        assert_eq!(names[57], "ch2_mfcc00");
        assert_eq!(names[170], "ch3_pa");
    }

    #[test]
    fn zero_channel_degrades_gracefully() {
        let cfg = FeatureConfig::default();
        let f = channel_features(&[0.0; 1200], 20.0, &cfg).unwrap();
        assert_eq!(f.len(), 57);
        assert!(f.iter().all(|v| v.is_finite()));
        // wavelet block all zero, peak amplitude substituted with 0
        assert!(f[20..56].iter().all(|&v| v == 0.0));
        assert_eq!(f[56], 0.0);
    }

    #[test]
    fn channel_blocks_concatenate_in_order() {
        let mut cfg = FeatureConfig::default();
        cfg.klt = None;
        let seg = segment(5, Group::Preterm, WindowKind::Fixed);
        let row = segment_features(&seg, 20.0, &cfg).unwrap();
        assert_eq!(row.len(), 114);
        let ch2 = channel_features(&seg.channels[1], 20.0, &cfg).unwrap();
        assert_eq!(&row[57..], &ch2[..]);
    }

    #[test]
    fn klt_toggle_changes_features() {
        let with = FeatureConfig::default();
        let without = FeatureConfig {
            klt: None,
            ..FeatureConfig::default()
        };
        let x = noisy_channel(9, 1200);
        let a = channel_features(&x, 20.0, &with).unwrap();
        let b = channel_features(&x, 20.0, &without).unwrap();
        assert!(a.iter().zip(&b).any(|(p, q)| (p - q).abs() > 1e-9));
    }

    #[test]
    fn batch_assembles_labels_and_provenance() {
        let cfg = FeatureConfig::default();
        let mut second_window = segment(2, Group::Term, WindowKind::Fixed);
        second_window.start_sample = 1200;
        second_window.end_sample = 2400;
        let segs = vec![
            segment(1, Group::Preterm, WindowKind::Contraction),
            segment(2, Group::Term, WindowKind::Fixed),
            second_window,
        ];
        let d = extract_batch(&segs, 20.0, &cfg).unwrap();
        assert_eq!(d.n_samples(), 3);
        assert_eq!(d.n_features(), 114);
        assert_eq!(d.y, vec![1, 0, 0]);
        assert_eq!(d.provenance[1].record_name, "rec2");
        // segment_index restarts per record: rec1 gets 0, rec2 gets 0 and 1
        assert_eq!(d.provenance[1].segment_index, 0);
        assert_eq!(d.provenance[2].segment_index, 1);
        assert_eq!(d.provenance[0].window_kind, WindowKind::Contraction);
    }

    #[test]
    fn batch_rejects_nonpregnant_and_empty() {
        let cfg = FeatureConfig::default();
        assert!(extract_batch(&[], 20.0, &cfg).is_err());
        let segs = vec![segment(1, Group::NonPregnant, WindowKind::Fixed)];
        assert!(extract_batch(&segs, 20.0, &cfg).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let cfg = FeatureConfig::default();
        let segs = vec![
            segment(1, Group::Preterm, WindowKind::Contraction),
            segment(2, Group::Term, WindowKind::Dummy),
        ];
        let d = extract_batch(&segs, 20.0, &cfg).unwrap();
        let csv = write_features_csv(&d).unwrap();
        assert!(csv.starts_with("# ehg-features v1\n"));
        let back = read_features_csv(&csv).unwrap();
        assert_eq!(back.y, d.y);
        assert_eq!(back.feature_names, d.feature_names);
        assert_eq!(back.provenance, d.provenance);
        assert_eq!(back.x, d.x);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(read_features_csv("").is_err());
        assert!(read_features_csv("# ehg-features v1\nbad,header\n").is_err());
        let missing_field = "record,segment_index,window_kind,f0,label\nr,0,fixed,1.5\n";
        assert!(read_features_csv(missing_field).is_err());
        let no_rows = "record,segment_index,window_kind,f0,label\n";
        assert!(read_features_csv(no_rows).is_err());
    }
}
