//! Parameter sweeps over the activity axis.
//!
//! A sweep answers "what does the power budget look like as the wearer's
//! activity level changes?" Each grid point keeps the device model from the
//! base scenario — signal levels, trigger tuning, power numbers — and swaps
//! in a different contraction schedule. The analytic column prices the
//! commanded duty directly through [`PowerModel`]; the optional simulated
//! column runs the full co-simulation and prices the duty the trigger
//! actually produced, release lag and wake-up cost included.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::cosim::simulate;
use crate::energy::{average_power_mw, battery_life_hours, integrate_energy, saving_vs_always_on};
use crate::error::{Error, Result};
use crate::par::try_map_slice;
use crate::scenario::Scenario;
use crate::synth::protocol::{ContractionProtocol, Segment};

/// One row of a sweep: commanded duty against the power model's verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Commanded fraction of time spent contracting.
    pub duty: f64,
    /// Average power at exactly that duty, straight from the model (mW).
    pub analytic_mw: f64,
    /// Average power measured from a full co-simulation of the schedule,
    /// if one was requested (mW).
    pub simulated_mw: Option<f64>,
    /// Battery life at the analytic power (hours).
    pub battery_h: f64,
    /// Fractional saving of the analytic power versus always-on.
    pub saving: f64,
}

/// Cycle length used by the duty sweep's derived schedules, in seconds.
///
/// The comparator charges a roughly fixed lag per cycle — it asserts a few
/// milliseconds after the burst starts and releases up to a tenth of a
/// second after it ends. Long cycles keep that fixed cost small against the
/// cycle, so the realized duty tracks the commanded duty.
pub const DUTY_SWEEP_CYCLE_S: f64 = 10.0;

/// Contraction schedule that commands a given duty, one contraction per
/// [`DUTY_SWEEP_CYCLE_S`].
///
/// Interior duties split each cycle into rest then contraction; the
/// endpoints collapse to a single all-rest or all-contraction block so the
/// schedule stays valid (segments must have positive length).
fn schedule_for_duty(duty: f64, n_cycles: u32) -> ContractionProtocol {
    let n = n_cycles.max(1);
    if duty <= 0.0 {
        ContractionProtocol {
            segments: vec![Segment::rest(n as f64 * DUTY_SWEEP_CYCLE_S)],
            repetitions: 1,
        }
    } else if duty >= 1.0 {
        ContractionProtocol {
            segments: vec![Segment::contract(n as f64 * DUTY_SWEEP_CYCLE_S)],
            repetitions: 1,
        }
    } else {
        ContractionProtocol::rest_contract(
            DUTY_SWEEP_CYCLE_S * (1.0 - duty),
            DUTY_SWEEP_CYCLE_S * duty,
            n,
        )
    }
}

/// Base scenario with its schedule replaced and run overrides cleared, so
/// the derived run's length comes from the new schedule alone.
fn with_schedule(base: &Scenario, protocol: ContractionProtocol) -> Scenario {
    let mut derived = base.clone();
    derived.protocol = protocol;
    derived.run.duration_s = None;
    derived.run.out_dir = None;
    derived
}

fn sweep_point(base: &Scenario, duty: f64, protocol: ContractionProtocol, sim: bool) -> Result<SweepPoint> {
    let model = &base.power_model;
    let analytic_mw = average_power_mw(duty, model)?;
    let simulated_mw = if sim {
        let derived = with_schedule(base, protocol);
        let result = simulate(&derived)?;
        let report = integrate_energy(
            &result.trigger,
            result.duration_s,
            derived.us.wake_latency_s,
            &derived.power_model,
        )?;
        Some(report.average_power_mw)
    } else {
        None
    };
    Ok(SweepPoint {
        duty,
        analytic_mw,
        simulated_mw,
        battery_h: battery_life_hours(analytic_mw, model)?,
        saving: saving_vs_always_on(analytic_mw, model),
    })
}

/// Sweep commanded duty directly.
///
/// Each duty becomes a rest/contract schedule spanning roughly the base
/// scenario's duration, one contraction per [`DUTY_SWEEP_CYCLE_S`]. Points
/// come back in the order the duties were given. With `sim` set, every
/// point also runs the co-simulation; the grid fans out across threads but
/// the output order and every value are independent of scheduling.
pub fn run_duty_sweep(base: &Scenario, duties: &[f64], sim: bool) -> Result<Vec<SweepPoint>> {
    if duties.is_empty() {
        return Err(Error::Param("duty sweep needs at least one duty".into()));
    }
    for &d in duties {
        if !d.is_finite() || !(0.0..=1.0).contains(&d) {
            return Err(Error::Param(format!("sweep duty must be in [0, 1], got {d}")));
        }
    }
    base.validate()?;
    let n_cycles = (base.duration_s() / DUTY_SWEEP_CYCLE_S).round().max(1.0) as u32;
    try_map_slice(duties, |&duty| {
        sweep_point(base, duty, schedule_for_duty(duty, n_cycles), sim)
    })
}

/// Fixed contraction length used by [`run_rate_sweep`], in seconds.
pub const RATE_SWEEP_CONTRACTION_S: f64 = 0.2;

/// Sweep contraction rate at a fixed 200 ms contraction length.
///
/// A rate of `r` Hz commands duty `0.2 * r`, so rates above 5 Hz would not
/// fit in the cycle and are rejected. At exactly 5 Hz the rest gap vanishes
/// and the schedule collapses to a single continuous contraction.
pub fn run_rate_sweep(base: &Scenario, rates_hz: &[f64], sim: bool) -> Result<Vec<SweepPoint>> {
    if rates_hz.is_empty() {
        return Err(Error::Param("rate sweep needs at least one rate".into()));
    }
    for &r in rates_hz {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::Param(format!("sweep rate must be positive, got {r} Hz")));
        }
        if 1.0 / r < RATE_SWEEP_CONTRACTION_S {
            return Err(Error::Param(format!(
                "sweep rate {r} Hz leaves no room for a {RATE_SWEEP_CONTRACTION_S} s contraction"
            )));
        }
    }
    base.validate()?;
    let duration_s = base.duration_s();
    try_map_slice(rates_hz, |&rate| {
        let duty = (RATE_SWEEP_CONTRACTION_S * rate).min(1.0);
        let cycle_s = 1.0 / rate;
        let rest_s = cycle_s - RATE_SWEEP_CONTRACTION_S;
        let n_cycles = (duration_s / cycle_s).round().max(1.0) as u32;
        let protocol = if rest_s <= 0.0 {
            ContractionProtocol {
                segments: vec![Segment::contract(n_cycles as f64 * RATE_SWEEP_CONTRACTION_S)],
                repetitions: 1,
            }
        } else {
            ContractionProtocol::rest_contract(rest_s, RATE_SWEEP_CONTRACTION_S, n_cycles)
        };
        sweep_point(base, duty, protocol, sim)
    })
}

/// Write sweep points as CSV: one row per point, simulated column blank when
/// the sweep ran without simulation.
pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut out = String::from("duty,analytic_mw,simulated_mw,battery_h,saving\n");
    for p in points {
        let sim = p.simulated_mw.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.duty, p.analytic_mw, sim, p.battery_h, p.saving
        ));
    }
    fs::write(path, out)?;
    Ok(())
}
