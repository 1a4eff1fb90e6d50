//! Experimental estimates: coupling rate from dipole and mode volume, cavity
//! decay from the quality factor, and the number of gates per coherence time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, PulseSpec};

/// Literature estimate of the Eu³⁺/microsphere coupling rate (rad/s), kept
/// for comparison with the value computed from the dipole formula.
pub const QUOTED_COUPLING_RATE: f64 = 1.0e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// Resonance wavelength λ₀ (m).
    pub wavelength: f64,
    /// Quality factor Q.
    pub quality: f64,
    /// Mode volume V_m (m³).
    pub mode_volume: f64,
}

impl CavitySpec {
    /// 10 µm-radius silica microsphere at the Eu³⁺ ⁷F₀ → ⁵D₀ line.
    pub const EU_MICROSPHERE: Self = Self {
        wavelength: 579.879e-9,
        quality: 5.0e7,
        mode_volume: 300.0e-18,
    };

    pub fn new(wavelength: f64, quality: f64, mode_volume: f64) -> Result<Self> {
        positive("wavelength", wavelength)?;
        positive("quality", quality)?;
        positive("mode_volume", mode_volume)?;
        Ok(Self {
            wavelength,
            quality,
            mode_volume,
        })
    }

    /// Angular resonance frequency `2π c / λ₀`.
    pub fn angular_frequency(&self, constants: &PhysicalConstants) -> f64 {
        2.0 * PI * constants.c_light / self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonSpec {
    /// Transition dipole µ (C·m).
    pub dipole: f64,
    /// Ground-state coherence time τ_coh (s).
    pub coherence_time: f64,
}

impl IonSpec {
    /// Dipole 7.5e-19 C·nm, coherence time 82 ms.
    pub const EU: Self = Self {
        dipole: 7.5e-28,
        coherence_time: 82.0e-3,
    };

    /// Dipole in SI units (C·m).
    pub fn new(dipole: f64, coherence_time: f64) -> Result<Self> {
        positive("dipole", dipole)?;
        positive("coherence_time", coherence_time)?;
        Ok(Self {
            dipole,
            coherence_time,
        })
    }

    /// Dipole given in C·nm, the unit ionic dipoles are often quoted in.
    pub fn from_coulomb_nanometres(dipole_c_nm: f64, coherence_time: f64) -> Result<Self> {
        Self::new(dipole_c_nm * 1e-9, coherence_time)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingEstimate {
    /// `g₀ = √(µ² ω_c / 2ħ ε₀ V_m)` (rad/s).
    pub g0: f64,
    /// `g₀ / QUOTED_COUPLING_RATE`.
    pub ratio_to_quoted: f64,
}

pub fn coupling_rate(
    ion: &IonSpec,
    cavity: &CavitySpec,
    constants: &PhysicalConstants,
) -> CouplingEstimate {
    let omega_c = cavity.angular_frequency(constants);
    let g0 = (ion.dipole * ion.dipole * omega_c
        / (2.0 * constants.hbar * constants.eps0 * cavity.mode_volume))
        .sqrt();
    CouplingEstimate {
        g0,
        ratio_to_quoted: g0 / QUOTED_COUPLING_RATE,
    }
}

/// `κ = ω₀ / 2Q` (rad/s).
pub fn cavity_decay(cavity: &CavitySpec, constants: &PhysicalConstants) -> f64 {
    cavity.angular_frequency(constants) / (2.0 * cavity.quality)
}

/// Gates per coherence time, `τ_coh / 2T`.
pub fn operation_count(ion: &IonSpec, pulse: &PulseSpec) -> f64 {
    ion.coherence_time / (2.0 * pulse.duration)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: PhysicalConstants = PhysicalConstants::CODATA;

    #[test]
    fn cavity_decay_from_quality() {
        let kappa = cavity_decay(&CavitySpec::EU_MICROSPHERE, &K);
        assert!((kappa / 3.25e7 - 1.0).abs() < 0.01, "{kappa}");
        let doubled = CavitySpec {
            quality: 1.0e8,
            ..CavitySpec::EU_MICROSPHERE
        };
        assert!((cavity_decay(&doubled, &K) * 2.0 / kappa - 1.0).abs() < 1e-15);
        let kt = kappa * 3.0e-6;
        assert!((kt - 97.5).abs() < 1.0, "{kt}");
    }

    #[test]
    fn coupling_rate_scaling() {
        let ion = IonSpec::EU;
        let cav = CavitySpec::EU_MICROSPHERE;
        let base = coupling_rate(&ion, &cav, &K);
        assert!(base.g0 > 0.0);
        assert_eq!(base.ratio_to_quoted, base.g0 / QUOTED_COUPLING_RATE);
        let big = CavitySpec {
            mode_volume: 4.0 * cav.mode_volume,
            ..cav
        };
        assert!((coupling_rate(&ion, &big, &K).g0 * 2.0 / base.g0 - 1.0).abs() < 1e-14);
        let strong = IonSpec {
            dipole: 2.0 * ion.dipole,
            ..ion
        };
        assert!((coupling_rate(&strong, &cav, &K).g0 / (2.0 * base.g0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coupling_rate_closed_form() {
        // µ = 7.5e-28 C·m, λ = 579.879 nm, V = 3e-16 m³
        let g0 = coupling_rate(&IonSpec::EU, &CavitySpec::EU_MICROSPHERE, &K).g0;
        let w = 2.0 * PI * 299_792_458.0 / 579.879e-9;
        let expect = (7.5e-28f64.powi(2) * w
            / (2.0 * 1.054_571_817e-34 * 8.854_187_812_8e-12 * 3e-16))
            .sqrt();
        assert!((g0 / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn operation_count_values() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let n = operation_count(&IonSpec::EU, &pulse);
        assert!((n / 1.3667e4 - 1.0).abs() < 1e-3, "{n}");
        let ion = IonSpec::new(1e-28, 2.0 * pulse.duration).unwrap();
        assert!((operation_count(&ion, &pulse) - 1.0).abs() < 1e-15);
        let half = PulseSpec::gaussian(1.5e-6).unwrap();
        assert!((operation_count(&IonSpec::EU, &half) / n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_conversion_and_validation() {
        let ion = IonSpec::from_coulomb_nanometres(7.5e-19, 82e-3).unwrap();
        assert!((ion.dipole / 7.5e-28 - 1.0).abs() < 1e-15);
        assert!(IonSpec::new(0.0, 1.0).is_err());
        assert!(CavitySpec::new(1e-6, -1.0, 1e-16).is_err());
    }
}
