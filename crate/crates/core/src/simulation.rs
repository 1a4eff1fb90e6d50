//! One reflection experiment: both atomic branches evolved on the same grid
//! from the same pulse.

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_coupled, evolve_uncoupled, EvolutionReport, Method};
use crate::error::Result;
use crate::fidelity::{overlap_fidelity, xi_coefficients, FidelityCurve, XiPair};
use crate::model::{ModeGrid, PhysicalParams, PulseSpec};
use crate::pulse::{spectral_amplitudes, SpectralAmplitudes};
use crate::scattering::{phase_profile, PhaseProfile, ScatteringProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionRun {
    pub params: PhysicalParams,
    pub pulse: PulseSpec,
    pub grid: ModeGrid,
    pub c0: SpectralAmplitudes,
    pub uncoupled: EvolutionReport,
    pub coupled: EvolutionReport,
}

impl ReflectionRun {
    pub fn new(
        params: PhysicalParams,
        pulse: PulseSpec,
        grid: ModeGrid,
        method: Method,
    ) -> Result<Self> {
        let params = params.validated()?;
        let c0 = spectral_amplitudes(&pulse, &grid)?;
        let uncoupled = evolve_uncoupled(&c0, &params, &grid, &pulse, method)?;
        let coupled = evolve_coupled(&c0, &params, &grid, &pulse, method)?;
        Ok(Self {
            params,
            pulse,
            grid,
            c0,
            uncoupled,
            coupled,
        })
    }

    /// Gaussian pulse of the given duration on its default grid.
    pub fn with_defaults(params: PhysicalParams, duration: f64, method: Method) -> Result<Self> {
        let pulse = PulseSpec::gaussian(duration)?;
        let grid = ModeGrid::for_pulse(&pulse)?;
        Self::new(params, pulse, grid, method)
    }

    pub fn duration(&self) -> f64 {
        self.pulse.duration
    }

    pub fn xi(&self) -> Result<XiPair> {
        xi_coefficients(
            &self.uncoupled,
            &self.coupled,
            &self.c0,
            &self.grid,
            self.duration(),
        )
    }

    pub fn fidelity_curve(&self) -> Result<FidelityCurve> {
        Ok(FidelityCurve::new(&self.xi()?))
    }

    pub fn overlap_fidelity(&self, beta0: num_complex::Complex64) -> Result<f64> {
        overlap_fidelity(
            &self.uncoupled,
            &self.coupled,
            &self.c0,
            &self.grid,
            self.duration(),
            beta0,
        )
    }

    pub fn phase_profile(&self) -> Result<PhaseProfile> {
        phase_profile(
            &self.uncoupled,
            &self.coupled,
            &self.c0,
            &self.grid,
            self.duration(),
        )
    }

    pub fn scattering_profile(&self) -> Result<ScatteringProfile> {
        ScatteringProfile::from_reports(
            &self.uncoupled,
            &self.coupled,
            &self.c0,
            &self.grid,
            self.duration(),
        )
    }
}
