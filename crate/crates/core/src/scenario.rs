//! One self-contained description of an experiment: protocol, synthesis,
//! trigger path, ultrasound front end, power model, and run settings.

use serde::{Deserialize, Serialize};

use crate::dsp::pipeline::PipelineConfig;
use crate::energy::PowerModel;
use crate::synth::emg::EmgSynthConfig;
use crate::synth::mechanics::MuscleMechanics;
use crate::synth::protocol::{ContractionProtocol, Segment};
use crate::synth::ultrasound::UsConfig;
use crate::{Error, Result};

/// Run-level settings that are not physics: how long to simulate, the
/// master seed for everything stochastic, and an optional output folder
/// (usually overridden from the command line).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Simulated span; defaults to the protocol's total duration.
    pub duration_s: Option<f64>,
    /// Master seed; scanline noise derives per-frame seeds from it.
    pub seed: u64,
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            duration_s: None,
            seed: 42,
            out_dir: None,
        }
    }
}

/// The complete scenario, as serialised to/from a JSON file. Every section
/// has full defaults, so a file needs to spell out only what it changes;
/// unknown keys are rejected rather than silently ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub protocol: ContractionProtocol,
    pub emg_synth: EmgSynthConfig,
    pub mechanics: MuscleMechanics,
    pub us: UsConfig,
    pub pipeline: PipelineConfig,
    pub power_model: PowerModel,
    pub run: RunConfig,
}

impl Default for ContractionProtocol {
    fn default() -> Self {
        // Matches the `default` preset: short cycles, many contractions.
        ContractionProtocol::rest_contract(1.2, 1.2, 25)
    }
}

impl Scenario {
    /// Simulated duration: explicit run setting, else the protocol length.
    pub fn duration_s(&self) -> f64 {
        self.run
            .duration_s
            .unwrap_or_else(|| self.protocol.total_duration_s())
    }

    /// Cross-field validation of the whole scenario. Collects every
    /// problem rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut check = |r: Result<()>| {
            if let Err(e) = r {
                problems.push(e.to_string());
            }
        };
        check(self.protocol.validate());
        check(self.emg_synth.validate());
        check(self.mechanics.validate());
        check(self.us.validate());
        check(self.pipeline.validate());
        check(self.power_model.validate());

        if (self.pipeline.fs_hz - self.emg_synth.fs_hz).abs() > 1e-9 * self.pipeline.fs_hz {
            problems.push(format!(
                "pipeline runs at {} Hz but the EMG is synthesised at {} Hz",
                self.pipeline.fs_hz, self.emg_synth.fs_hz
            ));
        }
        if self.us.validate().is_ok() && self.mechanics.validate().is_ok() {
            let deepest = self.us.sample_at_depth(self.mechanics.depth_contracted_mm);
            if deepest.round() >= self.us.samples_per_scanline as f64 {
                problems.push(format!(
                    "contracted fascicle at {} mm needs sample {} but scanlines \
                     hold {} samples ({:.1} mm)",
                    self.mechanics.depth_contracted_mm,
                    deepest.round(),
                    self.us.samples_per_scanline,
                    self.us.max_depth_mm()
                ));
            }
        }
        if let Some(d) = self.run.duration_s {
            if !(d.is_finite() && d > 0.0) {
                problems.push(format!("run duration must be positive, got {d}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Built-in scenarios, selectable by name from the command line.
    pub fn preset(name: &str) -> Option<Scenario> {
        match name {
            "default" => Some(Scenario::default()),
            "isometric-3x10" => Some(isometric_3x10()),
            "burst-200ms-1hz" => Some(burst_200ms_1hz()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["default", "isometric-3x10", "burst-200ms-1hz"]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(text)?;
        Ok(s)
    }
}

/// Three repetitions of 10 s rest / 10 s isometric contraction — the
/// classic 50 % duty protocol. Burst level high enough that the wake line
/// tracks the contraction with a short assert tail.
fn isometric_3x10() -> Scenario {
    let mut s = Scenario {
        protocol: ContractionProtocol::rest_contract(10.0, 10.0, 3),
        ..Scenario::default()
    };
    s.pipeline.hysteresis_ratio = 0.85;
    s
}

/// Sixty 200 ms contractions at 1 Hz. The burst level is calibrated so the
/// comparator's assert and release delays cancel and the effective
/// ultrasound duty lands at the contraction fraction (20 %).
fn burst_200ms_1hz() -> Scenario {
    let mut s = Scenario {
        protocol: ContractionProtocol {
            segments: vec![Segment::rest(0.8), Segment::contract(0.2)],
            repetitions: 60,
        },
        ..Scenario::default()
    };
    s.emg_synth.burst_rms_v = 0.0105;
    s.pipeline.hysteresis_ratio = 0.85;
    // First onset is at 0.8 s; arm earlier than that, the filters are
    // quiet well before.
    s.pipeline.arm_time_s = 0.5;
    s
}
