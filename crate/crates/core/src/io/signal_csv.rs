//! `t_s,value` CSV series plus a JSON sidecar describing them.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::series::{SignalUnit, TimedSeries};
use crate::{Error, Result};

/// Sidecar written next to every series CSV (same stem, `.json`), carrying
/// what the CSV itself cannot: exact rate, unit, and where the data came
/// from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSidecar {
    pub sample_rate_hz: f64,
    pub start_time_s: f64,
    pub unit: SignalUnit,
    pub samples: usize,
    /// Producer tag, e.g. "emg-synth" or "pipeline-envelope".
    pub source: String,
    /// Seed behind any stochastic content.
    pub seed: Option<u64>,
}

fn sidecar_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("json")
}

/// Write `series` as CSV and its sidecar next to it.
pub fn write_series_csv(
    csv_path: &Path,
    series: &TimedSeries,
    source: &str,
    seed: Option<u64>,
) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 24 + 16);
    out.push_str("t_s,value\n");
    for (t, v) in series.iter_timed() {
        out.push_str(&format!("{t},{v}\n"));
    }
    fs::File::create(csv_path)?.write_all(out.as_bytes())?;

    let sidecar = SeriesSidecar {
        sample_rate_hz: series.sample_rate_hz,
        start_time_s: series.start_time_s,
        unit: series.unit,
        samples: series.len(),
        source: source.to_string(),
        seed,
    };
    fs::write(
        sidecar_path(csv_path),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

/// Read a series CSV back, using the sidecar when present for the exact
/// rate and unit, and validating that timestamps are uniform to 1 ns.
///
/// Errors name the offending 1-based line (the header is line 1).
pub fn read_series_csv(csv_path: &Path) -> Result<TimedSeries> {
    let text = super::read_named(csv_path)?;
    let path_str = csv_path.display().to_string();
    let sidecar: Option<SeriesSidecar> = match fs::read_to_string(sidecar_path(csv_path)) {
        Ok(s) => Some(serde_json::from_str(&s)?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "t_s,value" => {}
        Some((_, header)) => {
            return Err(Error::Format {
                path: path_str,
                line: 1,
                msg: format!("expected header 't_s,value', found '{header}'"),
            })
        }
        None => {
            return Err(Error::Format {
                path: path_str,
                line: 1,
                msg: "file is empty, expected a 't_s,value' header".into(),
            })
        }
    }

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (t, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(v), None) => (t, v),
            _ => {
                return Err(Error::Format {
                    path: path_str,
                    line: line_no,
                    msg: format!("expected exactly 2 comma-separated fields, found '{line}'"),
                })
            }
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Format {
                path: path_str.clone(),
                line: line_no,
                msg: format!("cannot parse {what} '{s}'"),
            })
        };
        let t = parse(t, "timestamp")?;
        let v = parse(v, "value")?;
        if !v.is_finite() {
            return Err(Error::Format {
                path: path_str,
                line: line_no,
                msg: format!("non-finite value {v}"),
            });
        }
        if !t.is_finite() {
            return Err(Error::Format {
                path: path_str,
                line: line_no,
                msg: format!("non-finite timestamp {t}"),
            });
        }
        times.push(t);
        values.push(v);
    }

    let unit = sidecar.as_ref().map(|s| s.unit).unwrap_or(SignalUnit::Volts);
    if values.is_empty() {
        let fs_hz = sidecar.as_ref().map(|s| s.sample_rate_hz).unwrap_or(500.0);
        return TimedSeries::new(0.0, fs_hz, unit, values);
    }

    let start = times[0];
    let fs_hz = match &sidecar {
        Some(s) => s.sample_rate_hz,
        None if times.len() >= 2 => {
            (times.len() - 1) as f64 / (times[times.len() - 1] - times[0])
        }
        // A single sample with no sidecar: rate is unknowable; use the
        // nominal default.
        None => 500.0,
    };
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(Error::Format {
            path: path_str,
            line: 2,
            msg: format!("cannot derive a positive sample rate (got {fs_hz})"),
        });
    }
    for (i, &t) in times.iter().enumerate() {
        let expected = start + i as f64 / fs_hz;
        if (t - expected).abs() > 1e-9 {
            return Err(Error::Format {
                path: path_str,
                line: i + 2,
                msg: format!(
                    "non-uniform sampling: timestamp {t} deviates from the \
                     {fs_hz} Hz grid ({expected})"
                ),
            });
        }
    }
    TimedSeries::new(start, fs_hz, unit, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn series() -> TimedSeries {
        TimedSeries::new(
            0.0,
            500.0,
            SignalUnit::Volts,
            (0..1000).map(|i| (i as f64 * 0.01).sin() * 0.2).collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_every_bit() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        let s = series();
        write_series_csv(&path, &s, "test", Some(7)).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn writes_are_byte_deterministic() {
        let dir = tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_series_csv(&a, &series(), "test", None).unwrap();
        write_series_csv(&b, &series(), "test", None).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn reads_without_sidecar_by_inferring_the_rate() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("raw.csv");
        std::fs::write(&path, "t_s,value\n0,1.5\n0.002,2.5\n0.004,-1\n").unwrap();
        let s = read_series_csv(&path).unwrap();
        assert_eq!(s.sample_rate_hz, 500.0);
        assert_eq!(s.samples, vec![1.5, 2.5, -1.0]);
        assert_eq!(s.unit, SignalUnit::Volts);
    }

    #[test]
    fn empty_csv_gives_empty_series() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "t_s,value\n").unwrap();
        let s = read_series_csv(&path).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn nan_value_errors_with_the_line_number() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t_s,value\n0,1.0\n0.002,NaN\n").unwrap();
        match read_series_csv(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn garbage_row_errors_with_the_line_number() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t_s,value\n0,1.0\nhello\n").unwrap();
        match read_series_csv(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn non_uniform_timestamps_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("jitter.csv");
        std::fs::write(&path, "t_s,value\n0,1\n0.002,2\n0.005,3\n0.006,4\n").unwrap();
        assert!(matches!(
            read_series_csv(&path),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("hdr.csv");
        std::fs::write(&path, "time,volts\n0,1\n").unwrap();
        match read_series_csv(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn sidecar_rate_overrides_inference() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = TimedSeries::new(2.0, 250.0, SignalUnit::Normalized, vec![1.0, 2.0, 3.0])
            .unwrap();
        write_series_csv(&path, &s, "test", None).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back.sample_rate_hz, 250.0);
        assert_eq!(back.unit, SignalUnit::Normalized);
        assert_eq!(back.start_time_s, 2.0);
    }
}
