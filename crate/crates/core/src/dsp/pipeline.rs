//! The assembled trigger path, runnable sample by sample or over a whole
//! recorded series.

use serde::{Deserialize, Serialize};

use crate::dsp::biquad::{design_bandpass, design_notch, Biquad};
use crate::dsp::envelope::WaveformLength;
use crate::dsp::trigger::{TriggerComparator, TriggerEdge, TriggerTrace};
use crate::series::{SignalUnit, TimedSeries};
use crate::{Error, Result};

/// Everything the on-probe DSP needs to know.
///
/// Defaults correspond to the hardware this models: 500 samples/s, a
/// 20..130 Hz pass band, a Q=30 notch at 50 Hz mains, a 60-sample
/// waveform-length window, and a 264 mV envelope threshold driving the
/// wake line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub fs_hz: f64,
    pub bandpass_low_hz: f64,
    pub bandpass_high_hz: f64,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub envelope_window: usize,
    pub threshold_v: f64,
    /// Deassert threshold as a fraction of `threshold_v` (1.0 disables
    /// hysteresis).
    pub hysteresis_ratio: f64,
    /// Minimum time the wake line stays asserted once raised.
    pub min_hold_s: f64,
    /// Comparator stays masked until this much time has elapsed, covering
    /// the filters' start-up transient from a zero state.
    pub arm_time_s: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            fs_hz: 500.0,
            bandpass_low_hz: 20.0,
            bandpass_high_hz: 130.0,
            notch_hz: 50.0,
            notch_q: 30.0,
            envelope_window: 60,
            threshold_v: 0.264,
            hysteresis_ratio: 1.0,
            min_hold_s: 0.0,
            arm_time_s: 1.0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        // Building the stages performs all the numeric checks.
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<StreamingPipeline> {
        let bandpass = design_bandpass(self.bandpass_low_hz, self.bandpass_high_hz, self.fs_hz)?;
        let notch = design_notch(self.notch_hz, self.notch_q, self.fs_hz)?;
        let envelope = WaveformLength::new(self.envelope_window)?;
        if !(self.hysteresis_ratio.is_finite()
            && self.hysteresis_ratio > 0.0
            && self.hysteresis_ratio <= 1.0)
        {
            return Err(Error::Param(format!(
                "hysteresis ratio must be in (0, 1], got {}",
                self.hysteresis_ratio
            )));
        }
        let comparator = TriggerComparator::new(
            self.threshold_v,
            self.threshold_v * self.hysteresis_ratio,
            self.min_hold_s,
        )?;
        if !(self.arm_time_s.is_finite() && self.arm_time_s >= 0.0) {
            return Err(Error::Param(format!(
                "arm time must be non-negative, got {}",
                self.arm_time_s
            )));
        }
        Ok(StreamingPipeline {
            fs_hz: self.fs_hz,
            arm_time_s: self.arm_time_s,
            bandpass: Biquad::new(bandpass),
            notch: Biquad::new(notch),
            envelope,
            comparator,
            n: 0,
        })
    }
}

/// Output of one pipeline step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineStep {
    pub t_s: f64,
    pub filtered: f64,
    pub envelope: f64,
    pub edge: Option<TriggerEdge>,
}

/// The streaming trigger path: band-pass, notch, waveform length,
/// comparator, in that order, advanced one ADC sample at a time.
#[derive(Debug, Clone)]
pub struct StreamingPipeline {
    fs_hz: f64,
    arm_time_s: f64,
    bandpass: Biquad,
    notch: Biquad,
    envelope: WaveformLength,
    comparator: TriggerComparator,
    n: u64,
}

impl StreamingPipeline {
    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn is_asserted(&self) -> bool {
        self.comparator.is_asserted()
    }

    /// Process the sample with index `self.n` (time `n / fs`).
    pub fn push(&mut self, x: f64) -> Result<PipelineStep> {
        if !x.is_finite() {
            return Err(Error::NonFinite(format!("pipeline input sample {}", self.n)));
        }
        let t_s = self.n as f64 / self.fs_hz;
        self.n += 1;
        let filtered = self.notch.process(self.bandpass.process(x));
        let envelope = self.envelope.update(filtered)?;
        // Hold the comparator off until the filters have rung down from
        // their zero state; otherwise the start-up transient of a strong
        // in-band-adjacent tone (e.g. mains) can fire a spurious wake.
        let edge = if t_s >= self.arm_time_s {
            self.comparator.update(envelope, t_s)?
        } else {
            None
        };
        Ok(PipelineStep {
            t_s,
            filtered,
            envelope,
            edge,
        })
    }
}

/// A whole-run batch of the streaming pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub filtered: TimedSeries,
    pub envelope: TimedSeries,
    pub trigger: TriggerTrace,
}

/// Run the trigger path over a recorded series. The series' sample rate
/// must match the pipeline's design rate — filters designed for one rate
/// are wrong at another.
pub fn run_pipeline(raw: &TimedSeries, config: &PipelineConfig) -> Result<PipelineOutput> {
    let rel = (raw.sample_rate_hz - config.fs_hz).abs() / config.fs_hz;
    if rel > 1e-6 {
        return Err(Error::Param(format!(
            "series sampled at {} Hz but pipeline designed for {} Hz",
            raw.sample_rate_hz, config.fs_hz
        )));
    }
    let mut pipeline = config.build()?;
    let mut filtered = Vec::with_capacity(raw.len());
    let mut envelope = Vec::with_capacity(raw.len());
    let mut trigger = TriggerTrace::default();
    for &x in &raw.samples {
        let step = pipeline.push(x)?;
        filtered.push(step.filtered);
        envelope.push(step.envelope);
        if let Some(edge) = step.edge {
            trigger.push(edge);
        }
    }
    Ok(PipelineOutput {
        filtered: TimedSeries::new(
            raw.start_time_s,
            raw.sample_rate_hz,
            SignalUnit::Volts,
            filtered,
        )?,
        envelope: TimedSeries::new(
            raw.start_time_s,
            raw.sample_rate_hz,
            SignalUnit::Volts,
            envelope,
        )?,
        trigger,
    })
}
