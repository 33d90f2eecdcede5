//! Muscle motion implied by the protocol: force and fascicle depth lag the
//! electrical activity by an electromechanical delay.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mechanical response parameters. The electromechanical delay is the
/// window the trigger has to win: a wake decision inside it means the
/// ultrasound subsystem is capturing before the tissue has moved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuscleMechanics {
    /// Delay from EMG onset to the first mechanical motion (physiological
    /// range is roughly 0.03..0.1 s).
    pub em_delay_s: f64,
    /// Fascicle depth at rest, millimetres.
    pub depth_rest_mm: f64,
    /// Fascicle depth at full contraction, millimetres.
    pub depth_contracted_mm: f64,
    /// Time for the mechanical response to ramp between the two depths.
    pub rise_time_s: f64,
}

impl Default for MuscleMechanics {
    fn default() -> Self {
        MuscleMechanics {
            em_delay_s: 0.05,
            depth_rest_mm: 22.0,
            depth_contracted_mm: 30.0,
            rise_time_s: 0.15,
        }
    }
}

impl MuscleMechanics {
    pub fn validate(&self) -> Result<()> {
        if !(self.em_delay_s.is_finite() && self.em_delay_s > 0.0) {
            return Err(Error::Param(format!(
                "electromechanical delay must be positive, got {}",
                self.em_delay_s
            )));
        }
        if !(self.rise_time_s.is_finite() && self.rise_time_s >= 0.0) {
            return Err(Error::Param(format!(
                "mechanical rise time must be >= 0, got {}",
                self.rise_time_s
            )));
        }
        if !(self.depth_rest_mm.is_finite() && self.depth_rest_mm > 0.0)
            || !self.depth_contracted_mm.is_finite()
            || self.depth_contracted_mm <= self.depth_rest_mm
        {
            return Err(Error::Param(format!(
                "depths must satisfy 0 < rest < contracted, got {} and {}",
                self.depth_rest_mm, self.depth_contracted_mm
            )));
        }
        Ok(())
    }
}

/// Mechanical activation in `[0, 1]` at `t_s`: each contraction interval,
/// shifted by the electromechanical delay, ramps up over the rise time and
/// back down after its end.
pub fn force_level(t_s: f64, contraction_intervals: &[(f64, f64)], mech: &MuscleMechanics) -> f64 {
    let mut level: f64 = 0.0;
    for &(start, end) in contraction_intervals {
        let s = start + mech.em_delay_s;
        let e = end + mech.em_delay_s;
        level = level.max(delayed_ramp(t_s, s, e, mech.rise_time_s));
    }
    level
}

/// Fascicle depth in millimetres at `t_s`, interpolating between rest and
/// contracted depth with the mechanical activation level.
pub fn fascicle_depth_mm(
    t_s: f64,
    contraction_intervals: &[(f64, f64)],
    mech: &MuscleMechanics,
) -> f64 {
    let level = force_level(t_s, contraction_intervals, mech);
    mech.depth_rest_mm + level * (mech.depth_contracted_mm - mech.depth_rest_mm)
}

fn delayed_ramp(t: f64, start: f64, end: f64, rise: f64) -> f64 {
    if rise <= 0.0 {
        return if t >= start && t < end { 1.0 } else { 0.0 };
    }
    if t < start || t >= end + rise {
        0.0
    } else if t < start + rise {
        (t - start) / rise
    } else if t < end {
        1.0
    } else {
        1.0 - (t - end) / rise
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mech() -> MuscleMechanics {
        MuscleMechanics::default()
    }

    const INTERVALS: [(f64, f64); 2] = [(10.0, 20.0), (30.0, 40.0)];

    #[test]
    fn motion_starts_only_after_the_delay() {
        let m = mech();
        // At onset and right through the delay the muscle has not moved.
        assert_eq!(force_level(10.0, &INTERVALS, &m), 0.0);
        assert_eq!(fascicle_depth_mm(10.05, &INTERVALS, &m), 22.0);
        // After delay + rise the depth is at the contracted plateau.
        assert_eq!(fascicle_depth_mm(10.25, &INTERVALS, &m), 30.0);
        assert_eq!(fascicle_depth_mm(15.0, &INTERVALS, &m), 30.0);
    }

    #[test]
    fn depth_returns_to_rest_between_contractions() {
        let m = mech();
        assert_eq!(fascicle_depth_mm(5.0, &INTERVALS, &m), 22.0);
        // 20 s end + 0.05 delay + 0.15 release puts rest at 20.2 s.
        assert_eq!(fascicle_depth_mm(25.0, &INTERVALS, &m), 22.0);
        assert_eq!(fascicle_depth_mm(35.0, &INTERVALS, &m), 30.0);
    }

    #[test]
    fn ramp_midpoint() {
        let m = mech();
        // Halfway through the rise: 10.0 + 0.05 + 0.075.
        let d = fascicle_depth_mm(10.125, &INTERVALS, &m);
        assert!((d - 26.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn instant_rise_when_rise_time_is_zero() {
        let mut m = mech();
        m.rise_time_s = 0.0;
        assert_eq!(fascicle_depth_mm(10.05, &INTERVALS, &m), 30.0);
        assert_eq!(fascicle_depth_mm(10.049, &INTERVALS, &m), 22.0);
    }

    #[test]
    fn validation() {
        assert!(mech().validate().is_ok());
        let mut m = mech();
        m.em_delay_s = 0.0;
        assert!(m.validate().is_err());
        let mut m = mech();
        m.depth_contracted_mm = 22.0;
        assert!(m.validate().is_err());
        let mut m = mech();
        m.rise_time_s = -0.1;
        assert!(m.validate().is_err());
    }
}
