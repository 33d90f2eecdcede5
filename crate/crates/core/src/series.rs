//! Uniformly sampled signals with explicit start time and units.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical unit of a sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalUnit {
    /// Analog voltage (EMG traces, filter outputs, envelopes).
    Volts,
    /// Raw signed ADC codes before conversion.
    AdcCodes,
    /// Dimensionless, e.g. activation levels or echo amplitudes.
    Normalized,
}

impl SignalUnit {
    pub fn label(self) -> &'static str {
        match self {
            SignalUnit::Volts => "V",
            SignalUnit::AdcCodes => "codes",
            SignalUnit::Normalized => "norm",
        }
    }
}

/// A uniformly sampled signal.
///
/// Sample `i` sits at `start_time_s + i / sample_rate_hz`; times are always
/// computed by that multiplication rather than by accumulating deltas, so
/// two series with equal fields have bit-identical timestamps no matter how
/// they were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedSeries {
    pub start_time_s: f64,
    pub sample_rate_hz: f64,
    pub unit: SignalUnit,
    pub samples: Vec<f64>,
}

impl TimedSeries {
    pub fn new(
        start_time_s: f64,
        sample_rate_hz: f64,
        unit: SignalUnit,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(Error::Param(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if !start_time_s.is_finite() {
            return Err(Error::Param(format!(
                "start time must be finite, got {start_time_s}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("series sample {i}")));
        }
        Ok(Self {
            start_time_s,
            sample_rate_hz,
            unit,
            samples,
        })
    }

    /// Empty series at t = 0; useful as a placeholder with a known rate.
    pub fn empty(sample_rate_hz: f64, unit: SignalUnit) -> Result<Self> {
        Self::new(0.0, sample_rate_hz, unit, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Timestamp of sample `i` (valid for any index, including one past the
    /// end, which is the nominal end time of the series).
    pub fn time_at(&self, i: usize) -> f64 {
        self.start_time_s + i as f64 / self.sample_rate_hz
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    /// Iterate `(time, value)` pairs.
    pub fn iter_timed(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.time_at(i), v))
    }

    /// Largest sample value, if any.
    pub fn max(&self) -> Option<f64> {
        self.samples.iter().cloned().reduce(f64::max)
    }

    /// Root-mean-square over a half-open time window `[t0, t1)`.
    pub fn rms_between(&self, t0: f64, t1: f64) -> Option<f64> {
        let mut acc = 0.0;
        let mut n = 0usize;
        for (t, v) in self.iter_timed() {
            if t >= t0 && t < t1 {
                acc += v * v;
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some((acc / n as f64).sqrt())
        }
    }
}
