use crate::error::{Error, Result};

/// Kind of an annotated time interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IntervalKind {
    Contraction,
    Dummy,
}

impl IntervalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IntervalKind::Contraction => "contraction",
            IntervalKind::Dummy => "dummy",
        }
    }

    pub fn parse(s: &str) -> Option<IntervalKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "contraction" => Some(IntervalKind::Contraction),
            "dummy" => Some(IntervalKind::Dummy),
            _ => None,
        }
    }
}

/// One annotated interval, in samples, half-open `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalAnnotation {
    pub record_name: String,
    pub kind: IntervalKind,
    pub start_sample: usize,
    pub end_sample: usize,
}

/// Parses an annotation manifest CSV.
///
/// Expected columns: `record,kind,start_sample,end_sample` with a header
/// row. Rejects inverted intervals and intervals that overlap another
/// interval of the same record.
pub fn load_annotations(manifest: &str) -> Result<Vec<IntervalAnnotation>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in manifest.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if !line.to_ascii_lowercase().starts_with("record") {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "manifest must start with a `record,kind,start_sample,end_sample` header row".into(),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let kind = IntervalKind::parse(fields[1]).ok_or(Error::Parse {
            line: idx + 1,
            message: format!("unknown interval kind `{}`", fields[1]),
        })?;
        let start_sample: usize = fields[2].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: "start_sample is not an integer".into(),
        })?;
        let end_sample: usize = fields[3].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: "end_sample is not an integer".into(),
        })?;
        if end_sample <= start_sample {
            return Err(Error::Validation(format!(
                "inverted interval on line {}: [{start_sample}, {end_sample})",
                idx + 1
            )));
        }
        rows.push(IntervalAnnotation {
            record_name: fields[0].to_string(),
            kind,
            start_sample,
            end_sample,
        });
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            message: "empty annotation manifest".into(),
        });
    }

    for (i, a) in rows.iter().enumerate() {
        for b in rows.iter().skip(i + 1) {
            if a.record_name == b.record_name
                && a.start_sample < b.end_sample
                && b.start_sample < a.end_sample
            {
                return Err(Error::Validation(format!(
                    "overlapping intervals for record `{}`: [{}, {}) and [{}, {})",
                    a.record_name, a.start_sample, a.end_sample, b.start_sample, b.end_sample
                )));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_row() {
        let rows =
            load_annotations("record,kind,start_sample,end_sample\nr1,contraction,1200,3600\n")
                .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0],
            IntervalAnnotation {
                record_name: "r1".into(),
                kind: IntervalKind::Contraction,
                start_sample: 1200,
                end_sample: 3600,
            }
        );
    }

    #[test]
    fn rejects_inverted_interval() {
        let err = load_annotations("record,kind,start_sample,end_sample\nr1,dummy,3600,1200\n")
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err:?}");
    }

    #[test]
    fn rejects_overlap_within_record_but_not_across_records() {
        let overlapping = "record,kind,start_sample,end_sample\n\
                           r1,contraction,100,200\n\
                           r1,dummy,150,250\n";
        assert!(load_annotations(overlapping).is_err());
        let disjoint = "record,kind,start_sample,end_sample\n\
                        r1,contraction,100,200\n\
                        r2,contraction,150,250\n\
                        r1,dummy,200,300\n";
        assert_eq!(load_annotations(disjoint).unwrap().len(), 3);
    }

    #[test]
    fn rejects_missing_header_and_bad_kind() {
        assert!(load_annotations("r1,contraction,1,2\n").is_err());
        assert!(load_annotations("").is_err());
        assert!(
            load_annotations("record,kind,start_sample,end_sample\nr1,squeeze,1,2\n").is_err()
        );
    }
}
