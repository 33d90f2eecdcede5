//! Power and battery arithmetic for the duty-cycled system.
//!
//! The device draws a constant base power (EMG front-end, MCU, idle rails)
//! plus a fixed increment whenever the ultrasound subsystem is active, so
//! average power is affine in the ultrasound duty cycle: 7.8 mW parked,
//! 29.8 mW pinned on, and anything between proportional to the fraction of
//! time the wake line holds the subsystem up.

use serde::{Deserialize, Serialize};

use crate::dsp::trigger::TriggerTrace;
use crate::{Error, Result};

/// Affine power model plus the battery it runs from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModel {
    /// Draw with the ultrasound subsystem asleep, milliwatts.
    pub base_mw: f64,
    /// Additional draw while the ultrasound subsystem is active.
    pub us_active_delta_mw: f64,
    pub battery_capacity_mah: f64,
    pub battery_voltage_v: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel {
            base_mw: 7.8,
            us_active_delta_mw: 22.0,
            battery_capacity_mah: 320.0,
            battery_voltage_v: 3.7,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_mw", self.base_mw),
            ("battery_capacity_mah", self.battery_capacity_mah),
            ("battery_voltage_v", self.battery_voltage_v),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Param(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.us_active_delta_mw.is_finite() && self.us_active_delta_mw >= 0.0) {
            return Err(Error::Param(format!(
                "us_active_delta_mw must be >= 0, got {}",
                self.us_active_delta_mw
            )));
        }
        Ok(())
    }

    /// Power when the ultrasound subsystem never wakes.
    pub fn floor_mw(&self) -> f64 {
        self.base_mw
    }

    /// Power with the ultrasound subsystem always on.
    pub fn ceiling_mw(&self) -> f64 {
        self.base_mw + self.us_active_delta_mw
    }

    /// Battery energy, milliwatt-hours.
    pub fn battery_mwh(&self) -> f64 {
        self.battery_capacity_mah * self.battery_voltage_v
    }
}

/// Average power at an ultrasound duty cycle in `[0, 1]`.
pub fn average_power_mw(duty: f64, model: &PowerModel) -> Result<f64> {
    model.validate()?;
    if !(0.0..=1.0).contains(&duty) || !duty.is_finite() {
        return Err(Error::Param(format!(
            "duty cycle must be within [0, 1], got {duty}"
        )));
    }
    Ok(model.base_mw + duty * model.us_active_delta_mw)
}

/// Runtime on a full battery at a constant draw, hours.
pub fn battery_life_hours(power_mw: f64, model: &PowerModel) -> Result<f64> {
    model.validate()?;
    if !(power_mw.is_finite() && power_mw > 0.0) {
        return Err(Error::Param(format!(
            "power draw must be positive, got {power_mw} mW"
        )));
    }
    Ok(model.battery_mwh() / power_mw)
}

/// Fractional saving of `power_mw` versus running the ultrasound
/// subsystem continuously.
pub fn saving_vs_always_on(power_mw: f64, model: &PowerModel) -> f64 {
    1.0 - power_mw / model.ceiling_mw()
}

/// Energy accounting for one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub duration_s: f64,
    /// Effective ultrasound duty cycle, wake overhead included.
    pub duty: f64,
    pub asserted_s: f64,
    pub wake_count: usize,
    pub average_power_mw: f64,
    pub energy_mwh: f64,
    pub battery_life_h: f64,
    pub saving_vs_always_on: f64,
}

/// Integrate a trigger trace into an energy report.
///
/// Each wake adds `wake_latency_s` of active draw before the first frame,
/// so the effective duty is `(asserted + wakes * latency) / duration`,
/// clamped to `[0, 1]`.
pub fn integrate_energy(
    trace: &TriggerTrace,
    duration_s: f64,
    wake_latency_s: f64,
    model: &PowerModel,
) -> Result<EnergyReport> {
    model.validate()?;
    trace.validate()?;
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::Param(format!(
            "run duration must be positive, got {duration_s}"
        )));
    }
    if !(wake_latency_s.is_finite() && wake_latency_s >= 0.0) {
        return Err(Error::Param(format!(
            "wake latency must be >= 0, got {wake_latency_s}"
        )));
    }
    if let Some(last) = trace.edges.last() {
        if last.t_s > duration_s {
            return Err(Error::Param(format!(
                "trigger trace extends to {} s, past the {duration_s} s run",
                last.t_s
            )));
        }
    }
    let asserted_s = trace.asserted_seconds(duration_s);
    let wake_count = trace.n_rising();
    let duty = ((asserted_s + wake_count as f64 * wake_latency_s) / duration_s).clamp(0.0, 1.0);
    let average_power_mw = average_power_mw(duty, model)?;
    Ok(EnergyReport {
        duration_s,
        duty,
        asserted_s,
        wake_count,
        average_power_mw,
        energy_mwh: average_power_mw * duration_s / 3600.0,
        battery_life_h: battery_life_hours(average_power_mw, model)?,
        saving_vs_always_on: saving_vs_always_on(average_power_mw, model),
    })
}
