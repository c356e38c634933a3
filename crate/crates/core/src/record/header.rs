use super::{RecordHeader, SignalSpec, DEFAULT_ADC_GAIN};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses WFDB `.hea` text into a [`RecordHeader`].
///
/// Layout: an optional block of `#` comments, one record line
/// (`name n_signals sampling_rate n_samples ...`), then one line per
/// signal (`file format gain(baseline)/units [adc fields...] description`).
/// Comment lines may appear anywhere and are collected in order.
pub fn parse_header(text: &str) -> Result<RecordHeader> {
    let mut comments = Vec::new();
    let mut record_line: Option<(usize, &str)> = None;
    let mut signal_lines: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(stripped) = line.strip_prefix('#') {
            comments.push(stripped.trim().to_string());
            continue;
        }
        if record_line.is_none() {
            record_line = Some((idx + 1, line));
        } else {
            signal_lines.push((idx + 1, line));
        }
    }

    let (rec_no, rec_line) =
        record_line.ok_or_else(|| parse_err(1, "missing record line"))?;
    let mut tokens = rec_line.split_whitespace();
    let raw_name = tokens
        .next()
        .ok_or_else(|| parse_err(rec_no, "missing record name"))?;
    // A `/segments` suffix marks multi-segment records, which we do not use.
    let record_name = raw_name.split('/').next().unwrap_or(raw_name).to_string();
    let n_signals: usize = tokens
        .next()
        .ok_or_else(|| parse_err(rec_no, "missing signal count"))?
        .parse()
        .map_err(|_| parse_err(rec_no, "signal count is not an integer"))?;
    let fs_token = tokens
        .next()
        .ok_or_else(|| parse_err(rec_no, "missing sampling rate"))?;
    // The rate may carry a `/counter` suffix; only the leading number matters.
    let sampling_rate_hz: f64 = fs_token
        .split('/')
        .next()
        .unwrap_or(fs_token)
        .parse()
        .map_err(|_| parse_err(rec_no, "sampling rate is not a number"))?;
    if !(sampling_rate_hz > 0.0) || !sampling_rate_hz.is_finite() {
        return Err(parse_err(rec_no, "sampling rate must be positive"));
    }
    let n_samples: usize = tokens
        .next()
        .ok_or_else(|| parse_err(rec_no, "missing sample count"))?
        .parse()
        .map_err(|_| parse_err(rec_no, "sample count is not an integer"))?;

    if signal_lines.len() < n_signals {
        return Err(parse_err(
            rec_no,
            format!(
                "record line declares {} signals but only {} signal lines follow",
                n_signals,
                signal_lines.len()
            ),
        ));
    }

    let mut signals = Vec::with_capacity(n_signals);
    for &(line_no, line) in signal_lines.iter().take(n_signals) {
        signals.push(parse_signal_line(line_no, line)?);
    }

    let gestation_weeks = comments.iter().find_map(|c| {
        let mut toks = c.split_whitespace();
        match toks.next() {
            Some(t) if t.eq_ignore_ascii_case("gestation") => {
                toks.next().and_then(|v| v.parse::<f64>().ok())
            }
            _ => None,
        }
    });

    Ok(RecordHeader {
        record_name,
        sampling_rate_hz,
        n_samples,
        signals,
        comments,
        gestation_weeks,
    })
}

fn parse_signal_line(line_no: usize, line: &str) -> Result<SignalSpec> {
    let mut tokens = line.split_whitespace();
    let file_name = tokens
        .next()
        .ok_or_else(|| parse_err(line_no, "missing signal file name"))?
        .to_string();
    let fmt_token = tokens
        .next()
        .ok_or_else(|| parse_err(line_no, "missing storage format"))?;
    let digits_end = fmt_token
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(fmt_token.len());
    if digits_end == 0 {
        return Err(parse_err(line_no, "storage format is not a number"));
    }
    let format: u16 = fmt_token[..digits_end]
        .parse()
        .map_err(|_| parse_err(line_no, "storage format is not a number"))?;
    if format != 16 {
        return Err(Error::UnsupportedFormat(format));
    }
    let modifier = &fmt_token[digits_end..];
    if !modifier.is_empty() && modifier != "x1" && modifier != "+0" {
        return Err(parse_err(
            line_no,
            format!("unsupported format modifier `{modifier}`"),
        ));
    }

    // gain(baseline)/units, each piece optional
    let mut adc_gain = DEFAULT_ADC_GAIN;
    let mut baseline = 0i32;
    if let Some(gain_token) = tokens.next() {
        let no_units = gain_token.split('/').next().unwrap_or(gain_token);
        let (gain_part, base_part) = match no_units.find('(') {
            Some(open) => {
                let close = no_units.find(')').ok_or_else(|| {
                    parse_err(line_no, "unclosed baseline parenthesis in gain field")
                })?;
                (&no_units[..open], Some(&no_units[open + 1..close]))
            }
            None => (no_units, None),
        };
        if !gain_part.is_empty() {
            let g: f64 = gain_part
                .parse()
                .map_err(|_| parse_err(line_no, "gain is not a number"))?;
            // A zero gain means "unspecified" in WFDB headers.
            if g != 0.0 {
                adc_gain = g;
            }
        }
        if let Some(b) = base_part {
            baseline = b
                .parse()
                .map_err(|_| parse_err(line_no, "baseline is not an integer"))?;
        }
    }

    // Skip up to five numeric ADC fields (resolution, zero, initial value,
    // checksum, block size); whatever follows is the free-text description.
    let rest: Vec<&str> = tokens.collect();
    let mut desc_start = 0;
    for tok in rest.iter().take(5) {
        if tok.parse::<i64>().is_ok() {
            desc_start += 1;
        } else {
            break;
        }
    }
    let label = rest[desc_start..].join(" ");

    Ok(SignalSpec {
        file_name,
        format,
        adc_gain,
        baseline,
        label,
    })
}
