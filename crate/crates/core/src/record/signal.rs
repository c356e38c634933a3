use super::RecordHeader;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Decodes a format-16 byte stream into per-channel ADC values.
///
/// Samples are 16-bit little-endian two's complement, interleaved
/// sample-major: frame 0 holds one sample of every channel, then frame 1.
pub fn decode_format16(bytes: &[u8], n_channels: usize, n_samples: usize) -> Result<Vec<Vec<i32>>> {
    let expected = n_channels * n_samples * 2;
    if bytes.len() != expected {
        return Err(Error::LengthMismatch {
            what: "format-16 signal file bytes",
            expected,
            actual: bytes.len(),
        });
    }
    let mut channels = vec![Vec::with_capacity(n_samples); n_channels];
    for frame in bytes.chunks_exact(2 * n_channels) {
        for (ch, pair) in frame.chunks_exact(2).enumerate() {
            channels[ch].push(i16::from_le_bytes([pair[0], pair[1]]) as i32);
        }
    }
    Ok(channels)
}

/// Inverse of [`decode_format16`]; all channels must share one length.
pub fn encode_format16(channels: &[Vec<i32>]) -> Result<Vec<u8>> {
    let n_samples = channels.first().map_or(0, Vec::len);
    for ch in channels {
        if ch.len() != n_samples {
            return Err(Error::LengthMismatch {
                what: "channel lengths for format-16 encoding",
                expected: n_samples,
                actual: ch.len(),
            });
        }
    }
    let mut bytes = Vec::with_capacity(channels.len() * n_samples * 2);
    for i in 0..n_samples {
        for ch in channels {
            let v = ch[i];
            if v < i16::MIN as i32 || v > i16::MAX as i32 {
                return Err(Error::Numeric(format!(
                    "ADC value {v} does not fit in 16 bits"
                )));
            }
            bytes.extend_from_slice(&(v as i16).to_le_bytes());
        }
    }
    Ok(bytes)
}

/// Converts one ADC sample to physical units.
pub fn adc_to_physical(adc: i32, gain: f64, baseline: i32) -> f64 {
    (adc - baseline) as f64 / gain
}

/// Decodes every channel of a record into physical units.
///
/// `files` maps each `.dat` file name to its raw bytes. Channels stored in
/// the same file share its interleaving in header order.
pub fn read_signals(
    header: &RecordHeader,
    files: &BTreeMap<String, Vec<u8>>,
) -> Result<Vec<Vec<f64>>> {
    // Channel indices grouped by file, preserving header order within each.
    let mut by_file: Vec<(&str, Vec<usize>)> = Vec::new();
    for (idx, spec) in header.signals.iter().enumerate() {
        match by_file.iter_mut().find(|(name, _)| *name == spec.file_name) {
            Some((_, idxs)) => idxs.push(idx),
            None => by_file.push((&spec.file_name, vec![idx])),
        }
    }

    let mut out: Vec<Vec<f64>> = vec![Vec::new(); header.n_channels()];
    for (file_name, idxs) in by_file {
        let bytes = files.get(file_name).ok_or_else(|| {
            Error::Validation(format!("missing signal file `{file_name}`"))
        })?;
        let adc = decode_format16(bytes, idxs.len(), header.n_samples)?;
        for (slot, &ch_idx) in idxs.iter().enumerate() {
            let spec = &header.signals[ch_idx];
            out[ch_idx] = adc[slot]
                .iter()
                .map(|&v| adc_to_physical(v, spec.adc_gain, spec.baseline))
                .collect();
        }
    }
    Ok(out)
}

/// Writes `<name>.hea` plus `.dat` files for a record built from physical
/// signals, quantizing through each channel's gain and baseline. All
/// channels land in a single `<name>.dat`. Intended for fixtures and tests.
pub fn write_record_files(dir: &Path, header: &RecordHeader, signals: &[Vec<f64>]) -> Result<()> {
    if signals.len() != header.n_channels() {
        return Err(Error::LengthMismatch {
            what: "signal channels to write",
            expected: header.n_channels(),
            actual: signals.len(),
        });
    }
    let mut adc: Vec<Vec<i32>> = Vec::with_capacity(signals.len());
    for (spec, phys) in header.signals.iter().zip(signals) {
        if phys.len() != header.n_samples {
            return Err(Error::LengthMismatch {
                what: "samples in channel to write",
                expected: header.n_samples,
                actual: phys.len(),
            });
        }
        adc.push(
            phys.iter()
                .map(|&x| (x * spec.adc_gain).round() as i32 + spec.baseline)
                .collect(),
        );
    }
    let dat_name = format!("{}.dat", header.record_name);
    let mut hea = format!(
        "{} {} {} {}\n",
        header.record_name,
        header.n_channels(),
        header.sampling_rate_hz,
        header.n_samples
    );
    for spec in &header.signals {
        hea.push_str(&format!(
            "{} 16 {}({})/uV 16 0 0 0 0 {}\n",
            dat_name, spec.adc_gain, spec.baseline, spec.label
        ));
    }
    for comment in &header.comments {
        hea.push_str(&format!("# {comment}\n"));
    }
    std::fs::write(dir.join(format!("{}.hea", header.record_name)), hea)?;
    std::fs::write(dir.join(&dat_name), encode_format16(&adc)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::SignalSpec;

    fn header_two_channels() -> RecordHeader {
        RecordHeader {
            record_name: "r".into(),
            sampling_rate_hz: 20.0,
            n_samples: 3,
            signals: vec![
                SignalSpec {
                    file_name: "r.dat".into(),
                    format: 16,
                    adc_gain: 2.0,
                    baseline: 10,
                    label: "EHG S1".into(),
                },
                SignalSpec {
                    file_name: "r.dat".into(),
                    format: 16,
                    adc_gain: 4.0,
                    baseline: 0,
                    label: "TOCO".into(),
                },
            ],
            comments: vec![],
            gestation_weeks: None,
        }
    }

    #[test]
    fn decode_deinterleaves_and_signs() {
        // frames: (1, -1), (2, -2), (3, -3)
        let bytes: Vec<u8> = [1i16, -1, 2, -2, 3, -3]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let chans = decode_format16(&bytes, 2, 3).unwrap();
        assert_eq!(chans[0], vec![1, 2, 3]);
        assert_eq!(chans[1], vec![-1, -2, -3]);
    }

    #[test]
    fn decode_rejects_wrong_length() {
        assert!(decode_format16(&[0u8; 10], 2, 3).is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let chans = vec![vec![0, 32767, -32768], vec![5, -5, 123]];
        let bytes = encode_format16(&chans).unwrap();
        assert_eq!(decode_format16(&bytes, 2, 3).unwrap(), chans);
    }

    #[test]
    fn physical_conversion_applies_gain_and_baseline() {
        assert_eq!(adc_to_physical(30, 2.0, 10), 10.0);
        assert_eq!(adc_to_physical(0, 200.0, 0), 0.0);
        assert_eq!(adc_to_physical(-1024, 131.068, -2048), 1024.0 / 131.068);
    }

    #[test]
    fn read_signals_converts_each_channel() {
        let header = header_two_channels();
        // adc channel 0: 12, 14, 16 -> (x-10)/2 = 1, 2, 3
        // adc channel 1: 4, 8, -4   -> x/4     = 1, 2, -1
        let bytes: Vec<u8> = [12i16, 4, 14, 8, 16, -4]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let mut files = BTreeMap::new();
        files.insert("r.dat".to_string(), bytes);
        let signals = read_signals(&header, &files).unwrap();
        assert_eq!(signals[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(signals[1], vec![1.0, 2.0, -1.0]);
    }

    #[test]
    fn write_then_load_round_trips_physical_values() {
        let dir = std::env::temp_dir().join(format!("ehg-rec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut header = header_two_channels();
        header.comments.push("Gestation 33.5".into());
        let signals = vec![vec![1.0, 2.5, -3.0], vec![0.25, 0.5, 0.75]];
        write_record_files(&dir, &header, &signals).unwrap();
        let rec = crate::record::load_record(&dir.join("r.hea"), None).unwrap();
        assert_eq!(rec.header.n_channels(), 2);
        assert_eq!(rec.gestation_weeks, Some(33.5));
        for (got, want) in rec.signals.iter().zip(&signals) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-9, "{g} vs {w}");
            }
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
