//! The artifact sets each CLI command leaves in its output directory.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cosim::latency::{first_frame_before_motion, measure_latency, BeforeMotion, LatencyReport};
use crate::cosim::mmode::build_mmode;
use crate::cosim::SimulationResult;
use crate::dsp::pipeline::PipelineOutput;
use crate::energy::{integrate_energy, EnergyReport};
use crate::io::scanlines::{write_f32_matrix, MatrixSidecar};
use crate::io::signal_csv::write_series_csv;
use crate::series::TimedSeries;
use crate::Result;

/// Trigger-quality summary written as `latency.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub latency: LatencyReport,
    pub before_motion: Vec<BeforeMotion>,
    pub frame_count: usize,
    pub frame_period_s: f64,
}

fn write_trigger_csv(path: &Path, result_edges: &crate::dsp::trigger::TriggerTrace) -> Result<()> {
    let mut out = String::from("t_s,kind\n");
    for e in &result_edges.edges {
        let kind = match e.kind {
            crate::dsp::trigger::EdgeKind::Rising => "rising",
            crate::dsp::trigger::EdgeKind::Falling => "falling",
        };
        out.push_str(&format!("{},{kind}\n", e.t_s));
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Artifacts of `synth`: the raw inputs a rig would record.
pub fn write_synth_artifacts(
    dir: &Path,
    emg: &TimedSeries,
    force: &TimedSeries,
    onsets_s: &[f64],
    seed: u64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_series_csv(&dir.join("emg.csv"), emg, "emg-synth", Some(seed))?;
    write_series_csv(&dir.join("force.csv"), force, "mechanics", None)?;
    write_json(&dir.join("onsets.json"), &onsets_s)?;
    Ok(())
}

/// Artifacts of `run`: the full co-simulation output set.
pub fn write_run_artifacts(dir: &Path, result: &SimulationResult) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    write_series_csv(
        &dir.join("envelope.csv"),
        &result.envelope,
        "pipeline-envelope",
        Some(result.scenario.emg_synth.rng_seed),
    )?;
    write_trigger_csv(&dir.join("trigger_edges.csv"), &result.trigger)?;

    // M-mode matrix; an all-rest run legitimately has zero frames.
    let (data, n_depth, times): (Vec<f32>, usize, Vec<f64>) = if result.frames.is_empty() {
        (Vec::new(), result.scenario.us.samples_per_scanline, Vec::new())
    } else {
        let img = build_mmode(&result.frames, &result.scenario.us)?;
        (img.data, img.n_depth, img.frame_times_s)
    };
    write_f32_matrix(
        &dir.join("mmode.f32"),
        &data,
        &MatrixSidecar {
            frame_count: times.len(),
            samples_per_frame: n_depth,
            fs_us_hz: result.scenario.us.fs_hz,
            depth_step_mm: result.scenario.us.depth_at_sample(1),
            frame_times_s: times,
        },
    )?;

    let summary = RunSummary {
        latency: measure_latency(result),
        before_motion: first_frame_before_motion(result),
        frame_count: result.frames.len(),
        frame_period_s: result.scenario.us.frame_period_s,
    };
    write_json(&dir.join("latency.json"), &summary)?;

    let energy = integrate_energy(
        &result.trigger,
        result.duration_s,
        result.scenario.us.wake_latency_s,
        &result.scenario.power_model,
    )?;
    write_json(&dir.join("energy.json"), &energy)?;
    write_json(&dir.join("scenario.json"), &result.scenario)?;
    Ok(summary)
}

/// Artifacts of `replay`: the trigger path's view of a recorded signal —
/// no ultrasound, no energy, no ground truth.
pub fn write_replay_artifacts(dir: &Path, output: &PipelineOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_series_csv(
        &dir.join("envelope.csv"),
        &output.envelope,
        "pipeline-envelope",
        None,
    )?;
    write_series_csv(
        &dir.join("filtered.csv"),
        &output.filtered,
        "pipeline-filtered",
        None,
    )?;
    write_trigger_csv(&dir.join("trigger_edges.csv"), &output.trigger)?;
    Ok(())
}

pub fn read_run_summary(dir: &Path) -> Result<RunSummary> {
    Ok(serde_json::from_str(&super::read_named(
        &dir.join("latency.json"),
    )?)?)
}

pub fn read_energy_report(dir: &Path) -> Result<EnergyReport> {
    Ok(serde_json::from_str(&super::read_named(
        &dir.join("energy.json"),
    )?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosim::simulate;
    use crate::io::scanlines::read_f32_matrix;
    use crate::io::signal_csv::read_series_csv;
    use crate::scenario::Scenario;
    use crate::synth::protocol::ContractionProtocol;
    use tempfile::tempdir;

    fn small_run() -> SimulationResult {
        let mut s = Scenario {
            protocol: ContractionProtocol::rest_contract(1.5, 1.5, 2),
            ..Scenario::default()
        };
        s.pipeline.hysteresis_ratio = 0.85;
        simulate(&s).unwrap()
    }

    #[test]
    fn run_artifacts_are_complete_and_consistent() {
        let dir = tempdir().unwrap();
        let result = small_run();
        let summary = write_run_artifacts(dir.path(), &result).unwrap();

        for f in [
            "envelope.csv",
            "envelope.json",
            "trigger_edges.csv",
            "mmode.f32",
            "mmode.json",
            "latency.json",
            "energy.json",
            "scenario.json",
        ] {
            assert!(dir.path().join(f).exists(), "missing {f}");
        }
        // Envelope round-trips.
        let env = read_series_csv(&dir.path().join("envelope.csv")).unwrap();
        assert_eq!(env, result.envelope);
        // M-mode payload matches its sidecar and the frame count.
        let (data, sc) = read_f32_matrix(&dir.path().join("mmode.f32")).unwrap();
        assert_eq!(sc.frame_count, result.frames.len());
        assert_eq!(data.len(), sc.frame_count * sc.samples_per_frame);
        // Summary re-reads identically.
        let back = read_run_summary(dir.path()).unwrap();
        assert_eq!(back, summary);
        let energy = read_energy_report(dir.path()).unwrap();
        assert!(energy.average_power_mw > 7.8);
    }

    #[test]
    fn artifacts_are_byte_deterministic() {
        let a = tempdir().unwrap();
        let b = tempdir().unwrap();
        let result = small_run();
        write_run_artifacts(a.path(), &result).unwrap();
        write_run_artifacts(b.path(), &result).unwrap();
        for f in [
            "envelope.csv",
            "trigger_edges.csv",
            "mmode.f32",
            "latency.json",
            "energy.json",
            "scenario.json",
        ] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap(),
                "{f} differs between identical runs"
            );
        }
    }

    #[test]
    fn zero_frame_run_still_writes_a_valid_matrix() {
        let dir = tempdir().unwrap();
        let s = Scenario {
            protocol: ContractionProtocol {
                segments: vec![crate::synth::protocol::Segment::rest(2.0)],
                repetitions: 1,
            },
            ..Scenario::default()
        };
        let result = simulate(&s).unwrap();
        let summary = write_run_artifacts(dir.path(), &result).unwrap();
        assert_eq!(summary.frame_count, 0);
        let (data, sc) = read_f32_matrix(&dir.path().join("mmode.f32")).unwrap();
        assert!(data.is_empty());
        assert_eq!(sc.frame_count, 0);
    }
}
