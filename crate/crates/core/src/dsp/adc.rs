//! Conversion between raw front-end ADC codes and input-referred volts.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Front-end conversion parameters: a bipolar ADC of `bits` resolution
/// behind a gain stage, referenced to `v_ref_v`. Defaults match a 24-bit
/// converter with a 2.4 V reference and a programmable gain of 6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdcConfig {
    pub v_ref_v: f64,
    pub gain: f64,
    pub bits: u32,
}

impl Default for AdcConfig {
    fn default() -> Self {
        AdcConfig {
            v_ref_v: 2.4,
            gain: 6.0,
            bits: 24,
        }
    }
}

impl AdcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_ref_v.is_finite() && self.v_ref_v > 0.0) {
            return Err(Error::Param(format!(
                "ADC reference must be positive, got {}",
                self.v_ref_v
            )));
        }
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(Error::Param(format!(
                "ADC gain must be positive, got {}",
                self.gain
            )));
        }
        if self.bits < 2 || self.bits > 32 {
            return Err(Error::Param(format!(
                "ADC resolution must be 2..=32 bits, got {}",
                self.bits
            )));
        }
        Ok(())
    }

    /// Input-referred size of one code step.
    pub fn lsb_volts(&self) -> f64 {
        self.v_ref_v / (self.gain * (1u64 << (self.bits - 1)) as f64)
    }

    /// Input-referred full-scale voltage (positive side).
    pub fn full_scale_volts(&self) -> f64 {
        self.v_ref_v / self.gain
    }

    pub fn code_to_volts(&self, code: f64) -> f64 {
        code * self.lsb_volts()
    }

    /// Nearest code for a voltage, saturating at the rails.
    pub fn volts_to_code(&self, volts: f64) -> i64 {
        let max = (1i64 << (self.bits - 1)) - 1;
        let min = -(1i64 << (self.bits - 1));
        let code = (volts / self.lsb_volts()).round();
        if code >= max as f64 {
            max
        } else if code <= min as f64 {
            min
        } else {
            code as i64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_full_scale_is_400_millivolts() {
        let adc = AdcConfig::default();
        assert!((adc.full_scale_volts() - 0.4).abs() < 1e-12);
        // One LSB of a 24-bit converter at gain 6 is well under a microvolt.
        assert!(adc.lsb_volts() < 1e-7);
    }

    #[test]
    fn code_volt_round_trip() {
        let adc = AdcConfig::default();
        for code in [-8_388_608i64, -12_345, 0, 1, 999_999, 8_388_607] {
            let v = adc.code_to_volts(code as f64);
            assert_eq!(adc.volts_to_code(v), code);
        }
    }

    #[test]
    fn saturation_at_rails() {
        let adc = AdcConfig::default();
        assert_eq!(adc.volts_to_code(10.0), 8_388_607);
        assert_eq!(adc.volts_to_code(-10.0), -8_388_608);
    }

    #[test]
    fn validation_rejects_nonsense() {
        let bad = |adc: AdcConfig| adc.validate().is_err();
        assert!(bad(AdcConfig {
            gain: 0.0,
            ..AdcConfig::default()
        }));
        assert!(bad(AdcConfig {
            bits: 1,
            ..AdcConfig::default()
        }));
        assert!(bad(AdcConfig {
            v_ref_v: f64::INFINITY,
            ..AdcConfig::default()
        }));
    }
}
