//! Command-line front end for the EMG-triggered duty-cycling simulator.
//!
//! Five subcommands cover the experiment lifecycle: `synth` writes the raw
//! inputs a rig would record, `run` executes the full trigger/ultrasound
//! co-simulation, `replay` pushes a recorded EMG file through the trigger
//! pipeline offline, `sweep` tabulates the power model across an activity
//! grid, and `report` renders a finished run against the design targets.
//!
//! Exit codes are a stable contract: 0 on success, 2 for configuration or
//! input errors, 3 when the simulation itself violates an invariant.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emgtrig::cosim::simulate;
use emgtrig::dsp::adc::AdcConfig;
use emgtrig::dsp::pipeline::run_pipeline;
use emgtrig::energy::EnergyReport;
use emgtrig::io::artifacts::{
    read_energy_report, read_run_summary, write_replay_artifacts, write_run_artifacts,
    write_synth_artifacts, RunSummary,
};
use emgtrig::io::signal_csv::read_series_csv;
use emgtrig::scenario::Scenario;
use emgtrig::series::SignalUnit;
use emgtrig::sweep::{run_duty_sweep, run_rate_sweep, write_sweep_csv};
use emgtrig::synth::emg::synth_emg;
use emgtrig::synth::mechanics::force_level;
use emgtrig::{Error, Result, TimedSeries};

/// Trigger latency budget: the fast end of the electromechanical delay
/// range. Beating it means ultrasound is live before the muscle moves.
const LATENCY_BUDGET_S: f64 = 0.030;

#[derive(Parser)]
#[command(
    name = "emgtrig",
    version,
    about = "Simulate an EMG-triggered, duty-cycled wearable ultrasound system",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scenario selection shared by every subcommand that needs one.
#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    scenario: Option<PathBuf>,

    /// Built-in preset name.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Override both the run seed and the EMG synthesis seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario> {
        let mut scenario = match (&self.scenario, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Param(format!("cannot read scenario {}: {e}", path.display()))
                })?;
                Scenario::from_json(&text)?
            }
            (None, Some(name)) => Scenario::preset(name).ok_or_else(|| {
                Error::Param(format!(
                    "unknown preset {name:?}; available: {}",
                    Scenario::preset_names().join(", ")
                ))
            })?,
            (None, None) => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            scenario.run.seed = seed;
            scenario.emg_synth.rng_seed = seed;
        }
        Ok(scenario)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario's synthetic inputs: EMG, force, onset times.
    Synth {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (defaults to the scenario's run.out_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the full co-simulation and write the artifact set.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (defaults to the scenario's run.out_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Push a recorded EMG CSV through the trigger pipeline offline.
    Replay {
        /// EMG CSV file (`t_s,value` rows; JSON sidecar read if present).
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (defaults to the scenario's run.out_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Tabulate power and battery life across an activity grid.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Duty-cycle grid, comma separated (e.g. 0,0.2,0.5,1).
        #[arg(long, value_delimiter = ',', value_name = "DUTY", conflicts_with = "rates")]
        duties: Option<Vec<f64>>,
        /// Contraction-rate grid in Hz, 200 ms contractions (e.g. 0.5,1,2).
        #[arg(long, value_delimiter = ',', value_name = "HZ")]
        rates: Option<Vec<f64>>,
        /// Also co-simulate every grid point (slower; adds a column).
        #[arg(long)]
        simulate: bool,
        /// Output directory (defaults to the scenario's run.out_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Summarize a run directory against the design targets.
    Report {
        /// Directory written by `run`.
        #[arg(long, value_name = "DIR")]
        from: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 2 } else { 3 })
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { scenario, out } => cmd_synth(scenario.load()?, out),
        Command::Run { scenario, out } => cmd_run(scenario.load()?, out),
        Command::Replay { input, scenario, out } => cmd_replay(input, scenario.load()?, out),
        Command::Sweep { scenario, duties, rates, simulate, out } => {
            cmd_sweep(scenario.load()?, duties, rates, simulate, out)
        }
        Command::Report { from } => cmd_report(from),
    }
}

/// The output directory: the `--out` flag, else the scenario's `run.out_dir`.
fn resolve_out(flag: Option<PathBuf>, scenario: &Scenario) -> Result<PathBuf> {
    flag.or_else(|| scenario.run.out_dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| Error::Param("no output directory: pass --out or set run.out_dir".into()))
}

fn cmd_synth(scenario: Scenario, out: Option<PathBuf>) -> Result<()> {
    let out = resolve_out(out, &scenario)?;
    scenario.validate()?;
    let duration_s = scenario.duration_s();
    let (emg, onsets) = synth_emg(&scenario.protocol, &scenario.emg_synth, duration_s)?;
    let intervals = scenario.protocol.contraction_intervals();
    let force = TimedSeries {
        start_time_s: emg.start_time_s,
        sample_rate_hz: emg.sample_rate_hz,
        unit: SignalUnit::Normalized,
        samples: (0..emg.samples.len())
            .map(|i| force_level(emg.time_at(i), &intervals, &scenario.mechanics))
            .collect(),
    };
    write_synth_artifacts(&out, &emg, &force, &onsets, scenario.emg_synth.rng_seed)?;
    println!(
        "wrote {:.0} s of synthetic input ({} contraction onsets) to {}",
        duration_s,
        onsets.len(),
        out.display()
    );
    Ok(())
}

fn cmd_run(scenario: Scenario, out: Option<PathBuf>) -> Result<()> {
    let out = resolve_out(out, &scenario)?;
    let result = simulate(&scenario)?;
    let summary = write_run_artifacts(&out, &result)?;
    let energy = read_energy_report(&out)?;
    println!(
        "simulated {:.0} s: {} rising edges, {} frames, {:.2} mW average",
        result.duration_s,
        result.trigger.n_rising(),
        summary.frame_count,
        energy.average_power_mw
    );
    println!("artifacts in {}", out.display());
    Ok(())
}

fn cmd_replay(input: PathBuf, scenario: Scenario, out: Option<PathBuf>) -> Result<()> {
    let out = resolve_out(out, &scenario)?;
    let mut series = read_series_csv(&input)?;
    // Recorded files may carry raw converter codes; the pipeline wants the
    // front-end's input-referred volts.
    if series.unit == SignalUnit::AdcCodes {
        let adc = AdcConfig::default();
        for v in &mut series.samples {
            *v = adc.code_to_volts(*v);
        }
        series.unit = SignalUnit::Volts;
    }
    let output = run_pipeline(&series, &scenario.pipeline)?;
    let n_rising = output.trigger.n_rising();
    write_replay_artifacts(&out, &output)?;
    println!(
        "replayed {} samples: {} rising edges; artifacts in {}",
        series.samples.len(),
        n_rising,
        out.display()
    );
    Ok(())
}

fn cmd_sweep(
    scenario: Scenario,
    duties: Option<Vec<f64>>,
    rates: Option<Vec<f64>>,
    simulate: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let out = resolve_out(out, &scenario)?;
    let points = match (duties, rates) {
        (Some(d), None) => run_duty_sweep(&scenario, &d, simulate)?,
        (None, Some(r)) => run_rate_sweep(&scenario, &r, simulate)?,
        _ => {
            return Err(Error::Param(
                "pass exactly one grid: --duties or --rates".into(),
            ))
        }
    };
    std::fs::create_dir_all(&out)?;
    let path = out.join("sweep.csv");
    write_sweep_csv(&path, &points)?;
    println!("wrote {} sweep points to {}", points.len(), path.display());
    Ok(())
}

fn cmd_report(from: PathBuf) -> Result<()> {
    let summary = read_run_summary(&from)?;
    let energy = read_energy_report(&from)?;
    print_report(&summary, &energy);
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_report(summary: &RunSummary, energy: &EnergyReport) {
    let lat = &summary.latency;
    println!(
        "contractions: {} matched, {} missed, {} spurious edges",
        lat.matched, lat.missed, lat.spurious
    );
    match (lat.min_latency_s, lat.mean_latency_s, lat.max_latency_s) {
        (Some(lo), Some(mean), Some(hi)) => {
            println!(
                "trigger latency min/mean/max: {:.1} / {:.1} / {:.1} ms",
                lo * 1e3,
                mean * 1e3,
                hi * 1e3
            );
            if let Some(margin) = lat.min_margin_s {
                println!(
                    "margin vs electromechanical delay ({:.0} ms): min {:.1} ms",
                    lat.em_delay_s * 1e3,
                    margin * 1e3
                );
            }
        }
        _ => println!("trigger latency: no matched contractions"),
    }

    let latency_ok = lat.missed == 0 && lat.max_latency_s.unwrap_or(0.0) <= LATENCY_BUDGET_S;
    println!("max latency \u{2264} 30 ms: {}", pass(latency_ok));

    let before_ok = summary.before_motion.iter().filter(|b| b.before_motion).count();
    let all_before = summary.before_motion.iter().all(|b| b.before_motion);
    println!(
        "first frame before motion: {} ({before_ok}/{})",
        pass(all_before),
        summary.before_motion.len()
    );

    println!(
        "frames: {} at {:.0} ms period ({} wake-ups)",
        summary.frame_count,
        summary.frame_period_s * 1e3,
        energy.wake_count
    );
    println!(
        "ultrasound duty {:.1}%, average power {:.2} mW over {:.0} s",
        energy.duty * 100.0,
        energy.average_power_mw,
        energy.duration_s
    );
    println!("battery life at this load: {:.1} h", energy.battery_life_h);
    println!("saving vs always-on: {:.1}%", energy.saving_vs_always_on * 100.0);
}
