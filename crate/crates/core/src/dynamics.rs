//! Single-excitation dynamics of a pulse reflecting off an ion-cavity system.
//!
//! The state is the amplitude vector `x = (c_1..c_N, λ[, μ])`: free-space
//! mode amplitudes, the cavity amplitude and, when the ion is in the coupled
//! ground state `|1⟩`, the excited-state amplitude. Both branches are linear
//! and time-invariant, `ẋ = A x`:
//!
//! ```text
//! dc_k/dt = -i ω_k c_k - s λ                 s = √(κ Δω / 2π)
//! dλ/dt   =  s Σ_k c_k  [- i g μ]
//! dμ/dt   = -i g λ - (γ/2 + i δ) μ
//! ```
//!
//! Two independent routes solve it: the matrix exponential of the assembled
//! generator, and a fixed-step classical Runge-Kutta scheme that evaluates
//! the right-hand side directly from the equations above.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModeGrid, PhysicalParams, PulseSpec};
use crate::pulse::SpectralAmplitudes;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest norm inconsistency tolerated before an evolution is rejected.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Default stepped-integrator resolution: `dt = min(0.02/g, T/1e5)`.
pub const STEPS_PER_COUPLING_PERIOD: f64 = 0.02;
pub const MIN_STEPS_PER_PULSE: f64 = 1.0e5;
/// Accuracy bound on `rate · dt` for the stepped integrator.
pub const MAX_RATE_STEP: f64 = 0.1;

/// Atomic ground state the pulse meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Ion in `|0⟩`: bare cavity.
    Uncoupled,
    /// Ion in `|1⟩`: cavity coupled to the `|1⟩ ↔ |e⟩` transition.
    Coupled,
}

impl Branch {
    fn dimension(self, n_modes: usize) -> usize {
        match self {
            Branch::Uncoupled => n_modes + 1,
            Branch::Coupled => n_modes + 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Matrix exponential of the generator.
    #[default]
    Exact,
    /// Fixed-step fourth-order Runge-Kutta.
    Stepped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub modes: Vec<Complex64>,
    pub cavity: Complex64,
    pub excited: Complex64,
}

impl AmplitudeState {
    /// Pulse in the free-space modes, cavity and ion unexcited.
    pub fn initial(c0: &SpectralAmplitudes) -> Self {
        Self {
            modes: c0.values.clone(),
            cavity: Complex64::new(0.0, 0.0),
            excited: Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.cavity.norm_sqr()
            + self.excited.norm_sqr()
    }

    pub fn to_vector(&self, branch: Branch) -> DVector<Complex64> {
        let n = self.modes.len();
        let mut x = DVector::zeros(branch.dimension(n));
        x.rows_mut(0, n).copy_from_slice(&self.modes);
        x[n] = self.cavity;
        if branch == Branch::Coupled {
            x[n + 1] = self.excited;
        }
        x
    }

    pub fn from_vector(x: &DVector<Complex64>, branch: Branch) -> Self {
        let n = x.len() - branch.dimension(0);
        Self {
            modes: x.rows(0, n).iter().copied().collect(),
            cavity: x[n],
            excited: match branch {
                Branch::Coupled => x[n + 1],
                Branch::Uncoupled => Complex64::new(0.0, 0.0),
            },
        }
    }
}

/// Final state of one branch plus diagnostics of the ideal-gate condition
/// `λ(T) = μ(T) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub branch: Branch,
    pub method: Method,
    pub duration: f64,
    pub final_state: AmplitudeState,
    /// `1 - Σ|x(T)|²`.
    pub norm_leak: f64,
    /// `|λ(T)|²`.
    pub cavity_residual: f64,
    /// `|μ(T)|²`.
    pub excited_residual: f64,
    pub steps: usize,
    /// `∫₀ᵀ |μ|² dt`, accumulated by the stepped integrator only.
    pub decay_integral: Option<f64>,
}

impl EvolutionReport {
    fn new(
        branch: Branch,
        method: Method,
        duration: f64,
        final_state: AmplitudeState,
        steps: usize,
        decay_integral: Option<f64>,
    ) -> Self {
        Self {
            branch,
            method,
            duration,
            norm_leak: 1.0 - final_state.norm_sqr(),
            cavity_residual: final_state.cavity.norm_sqr(),
            excited_residual: final_state.excited.norm_sqr(),
            final_state,
            steps,
            decay_integral,
        }
    }
}

/// Time-independent generator `A` of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub branch: Branch,
    pub matrix: DMatrix<Complex64>,
}

impl Generator {
    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() - self.branch.dimension(0)
    }
}

pub fn build_generator(params: &PhysicalParams, grid: &ModeGrid, branch: Branch) -> Generator {
    let n = grid.n_modes();
    let dim = branch.dimension(n);
    let s = Complex64::from(grid.mode_coupling(params.kappa));
    let mut a = DMatrix::zeros(dim, dim);
    for (k, &w) in grid.omegas().iter().enumerate() {
        a[(k, k)] = -I * w;
        a[(k, n)] = -s;
        a[(n, k)] = s;
    }
    if branch == Branch::Coupled {
        a[(n, n + 1)] = -I * params.g;
        a[(n + 1, n)] = -I * params.g;
        a[(n + 1, n + 1)] = Complex64::new(-params.gamma / 2.0, -params.delta);
    }
    Generator { branch, matrix: a }
}

/// `exp(A t) x0` by Padé scaling and squaring.
pub fn propagate_exact(
    generator: &Generator,
    t: f64,
    x0: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    if x0.len() != generator.matrix.nrows() {
        return Err(Error::GridMismatch(format!(
            "state of length {} for a {}-dimensional generator",
            x0.len(),
            generator.matrix.nrows()
        )));
    }
    let propagator = (&generator.matrix * Complex64::from(t)).exp();
    let x = propagator * x0;
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Propagator(format!(
            "non-finite result for |A t| ~ {:.3e}",
            generator.matrix.norm() * t
        )));
    }
    Ok(x)
}

/// Default stepped-integrator time step, `min(0.02/g, T/1e5)`.
pub fn default_step(params: &PhysicalParams, duration: f64) -> f64 {
    let by_pulse = duration / MIN_STEPS_PER_PULSE;
    if params.g > 0.0 {
        (STEPS_PER_COUPLING_PERIOD / params.g).min(by_pulse)
    } else {
        by_pulse
    }
}

/// Fastest rate of the branch: the step size must resolve it.
pub fn fastest_rate(params: &PhysicalParams, grid: &ModeGrid, branch: Branch) -> f64 {
    let bath = grid.mode_coupling(params.kappa) * (grid.n_modes() as f64).sqrt();
    let mut rate = grid.omega_b().max(bath);
    if branch == Branch::Coupled {
        rate = rate
            .max(params.g)
            .max(params.delta.abs())
            .max(params.gamma / 2.0);
    }
    rate
}

pub fn evolve(
    c0: &SpectralAmplitudes,
    params: &PhysicalParams,
    grid: &ModeGrid,
    pulse: &PulseSpec,
    branch: Branch,
    method: Method,
) -> Result<EvolutionReport> {
    if c0.len() != grid.n_modes() {
        return Err(Error::GridMismatch(format!(
            "{} amplitudes on a {}-mode grid",
            c0.len(),
            grid.n_modes()
        )));
    }
    match method {
        Method::Exact => evolve_exact(c0, params, grid, pulse.duration, branch),
        Method::Stepped => evolve_stepped(
            c0,
            params,
            grid,
            pulse.duration,
            branch,
            default_step(params, pulse.duration),
        ),
    }
}

/// Ion in `|0⟩`: bare-cavity reflection.
pub fn evolve_uncoupled(
    c0: &SpectralAmplitudes,
    params: &PhysicalParams,
    grid: &ModeGrid,
    pulse: &PulseSpec,
    method: Method,
) -> Result<EvolutionReport> {
    evolve(c0, params, grid, pulse, Branch::Uncoupled, method)
}

/// Ion in `|1⟩`: reflection off the coupled ion-cavity system.
pub fn evolve_coupled(
    c0: &SpectralAmplitudes,
    params: &PhysicalParams,
    grid: &ModeGrid,
    pulse: &PulseSpec,
    method: Method,
) -> Result<EvolutionReport> {
    evolve(c0, params, grid, pulse, Branch::Coupled, method)
}

fn evolve_exact(
    c0: &SpectralAmplitudes,
    params: &PhysicalParams,
    grid: &ModeGrid,
    duration: f64,
    branch: Branch,
) -> Result<EvolutionReport> {
    let generator = build_generator(params, grid, branch);
    let start = AmplitudeState::initial(c0);
    let x = propagate_exact(&generator, duration, &start.to_vector(branch))?;
    let end = AmplitudeState::from_vector(&x, branch);
    let gain = end.norm_sqr() - start.norm_sqr();
    let drift = match branch {
        Branch::Uncoupled => gain.abs(),
        Branch::Coupled => gain.max(0.0),
    };
    if drift > NORM_TOLERANCE {
        return Err(Error::NormDrift {
            drift,
            tolerance: NORM_TOLERANCE,
        });
    }
    Ok(EvolutionReport::new(
        branch,
        Method::Exact,
        duration,
        end,
        1,
        None,
    ))
}

/// Classical RK4 with a fixed step no larger than `max_dt`.
///
/// Fails if `max_dt` does not resolve the fastest rate of the branch, and if
/// the final norm is inconsistent with the accumulated spontaneous loss.
pub fn evolve_stepped(
    c0: &SpectralAmplitudes,
    params: &PhysicalParams,
    grid: &ModeGrid,
    duration: f64,
    branch: Branch,
    max_dt: f64,
) -> Result<EvolutionReport> {
    let rate = fastest_rate(params, grid, branch);
    let required = MAX_RATE_STEP / rate;
    if !(max_dt > 0.0 && max_dt <= required) {
        return Err(Error::StepTooLarge {
            dt: max_dt,
            rate,
            required,
        });
    }
    let steps = (duration / max_dt).ceil().max(1.0) as usize;
    let dt = duration / steps as f64;

    let rhs = Rhs {
        omegas: grid.omegas(),
        coupling: grid.mode_coupling(params.kappa),
        g: params.g,
        excited_decay: Complex64::new(params.gamma / 2.0, params.delta),
        coupled: branch == Branch::Coupled,
    };
    let mut state = AmplitudeState::initial(c0);
    let start_norm = state.norm_sqr();
    let mut stages = Stages::new(grid.n_modes());
    let mut decay_integral = 0.0;
    let mut prev_excited = state.excited.norm_sqr();
    for _ in 0..steps {
        stages.rk4_step(&rhs, &mut state, dt);
        let excited = state.excited.norm_sqr();
        decay_integral += 0.5 * dt * (prev_excited + excited);
        prev_excited = excited;
    }

    let end_norm = state.norm_sqr();
    // uncoupled: decay_integral stays 0, so this is plain norm conservation
    let drift = (end_norm - (start_norm - params.gamma * decay_integral)).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::NormDrift {
            drift,
            tolerance: NORM_TOLERANCE,
        });
    }
    Ok(EvolutionReport::new(
        branch,
        Method::Stepped,
        duration,
        state,
        steps,
        Some(decay_integral),
    ))
}

struct Rhs<'a> {
    omegas: &'a [f64],
    coupling: f64,
    g: f64,
    excited_decay: Complex64,
    coupled: bool,
}

impl Rhs<'_> {
    fn eval(&self, x: &AmplitudeState, out: &mut AmplitudeState) {
        let s = self.coupling;
        let mut sum = Complex64::new(0.0, 0.0);
        for ((d, &c), &w) in out.modes.iter_mut().zip(&x.modes).zip(self.omegas) {
            *d = -I * w * c - s * x.cavity;
            sum += c;
        }
        out.cavity = s * sum;
        if self.coupled {
            out.cavity -= I * self.g * x.excited;
            out.excited = -I * self.g * x.cavity - self.excited_decay * x.excited;
        } else {
            out.excited = Complex64::new(0.0, 0.0);
        }
    }
}

struct Stages {
    k: [AmplitudeState; 4],
    scratch: AmplitudeState,
}

impl Stages {
    fn new(n: usize) -> Self {
        let zero = || AmplitudeState {
            modes: vec![Complex64::new(0.0, 0.0); n],
            cavity: Complex64::new(0.0, 0.0),
            excited: Complex64::new(0.0, 0.0),
        };
        Self {
            k: [zero(), zero(), zero(), zero()],
            scratch: zero(),
        }
    }

    fn rk4_step(&mut self, rhs: &Rhs<'_>, x: &mut AmplitudeState, dt: f64) {
        const NODES: [f64; 3] = [0.5, 0.5, 1.0];
        rhs.eval(x, &mut self.k[0]);
        for stage in 0..3 {
            let h = NODES[stage] * dt;
            let (done, pending) = self.k.split_at_mut(stage + 1);
            let prev = &done[stage];
            for ((y, &x0), &d) in self.scratch.modes.iter_mut().zip(&x.modes).zip(&prev.modes) {
                *y = x0 + h * d;
            }
            self.scratch.cavity = x.cavity + h * prev.cavity;
            self.scratch.excited = x.excited + h * prev.excited;
            rhs.eval(&self.scratch, &mut pending[0]);
        }
        let w = dt / 6.0;
        let [k1, k2, k3, k4] = &self.k;
        for (i, y) in x.modes.iter_mut().enumerate() {
            *y += w * (k1.modes[i] + 2.0 * k2.modes[i] + 2.0 * k3.modes[i] + k4.modes[i]);
        }
        x.cavity += w * (k1.cavity + 2.0 * k2.cavity + 2.0 * k3.cavity + k4.cavity);
        x.excited += w * (k1.excited + 2.0 * k2.excited + 2.0 * k3.excited + k4.excited);
    }
}
