use std::fs;
use std::path::{Path, PathBuf};

use cpf_core::dynamics::Method;
use cpf_core::params::{CavitySpec, IonSpec};
use cpf_core::{ModeGrid, PhysicalParams, PulseSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub omega_b: Option<f64>,
    pub n_modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// Everything a run depends on. Serializing this with defaults filled in and
/// feeding it back through `--config` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysicalParams,
    /// Pulse duration T (s).
    pub duration: f64,
    pub grid: GridOverride,
    pub method: Method,
    /// Pulse durations (s) for `fidelity-sweep`.
    pub sweep: Vec<f64>,
    /// Points per axis of the β grid for `two-atom-gate`.
    pub gate_points: usize,
    /// Random inputs for the ideal-algebra identity check.
    pub identity_samples: usize,
    pub ideal: bool,
    pub seed: u64,
    /// Worker threads for sweeps; `None` lets rayon decide.
    pub jobs: Option<usize>,
    pub cavity: CavitySpec,
    pub ion: IonSpec,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::EU_MICROSPHERE,
            duration: 3.0e-6,
            grid: GridOverride::default(),
            method: Method::Exact,
            sweep: vec![0.5e-6, 1.0e-6, 1.5e-6, 2.0e-6, 2.5e-6, 3.0e-6],
            gate_points: 9,
            identity_samples: 100,
            ideal: false,
            seed: 0,
            jobs: None,
            cavity: CavitySpec::EU_MICROSPHERE,
            ion: IonSpec::EU,
            output: OutputSpec::default(),
        }
    }
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Ion-cavity coupling g (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Cavity decay rate κ (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Spontaneous emission rate γ (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Ion detuning δ (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Pulse duration T (s).
    #[arg(long = "T", value_name = "SECONDS", allow_negative_numbers = true)]
    pub duration: Option<f64>,
    /// Sweep durations (s), comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "SECONDS",
        allow_negative_numbers = true
    )]
    pub sweep: Option<Vec<f64>>,
    /// Number of continuum modes.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Continuum half-bandwidth ω_b (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub omega_b: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Points per axis of the β grid.
    #[arg(long)]
    pub gate_points: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Use the ideal reflection profiles r₀ = -1, r₁ = 1.
    #[arg(long)]
    pub ideal: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Transition dipole (C·m).
    #[arg(long, allow_negative_numbers = true)]
    pub dipole: Option<f64>,
    /// Ground-state coherence time (s).
    #[arg(long, allow_negative_numbers = true)]
    pub coherence_time: Option<f64>,
    /// Cavity resonance wavelength (m).
    #[arg(long, allow_negative_numbers = true)]
    pub wavelength: Option<f64>,
    /// Cavity quality factor.
    #[arg(long, allow_negative_numbers = true)]
    pub quality: Option<f64>,
    /// Cavity mode volume (m³).
    #[arg(long, allow_negative_numbers = true)]
    pub mode_volume: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Exact,
    Stepped,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Stepped => Method::Stepped,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Loads the config file (if any) and applies the flag overrides.
    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let mut c = match &o.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.params.g, o.g);
        set(&mut c.params.kappa, o.kappa);
        set(&mut c.params.gamma, o.gamma);
        set(&mut c.params.delta, o.delta);
        set(&mut c.duration, o.duration);
        set(&mut c.ion.dipole, o.dipole);
        set(&mut c.ion.coherence_time, o.coherence_time);
        set(&mut c.cavity.wavelength, o.wavelength);
        set(&mut c.cavity.quality, o.quality);
        set(&mut c.cavity.mode_volume, o.mode_volume);
        if let Some(v) = &o.sweep {
            c.sweep = v.clone();
        }
        if o.grid_n.is_some() {
            c.grid.n_modes = o.grid_n;
        }
        if o.omega_b.is_some() {
            c.grid.omega_b = o.omega_b;
        }
        if let Some(m) = o.method {
            c.method = m.into();
        }
        if let Some(v) = o.gate_points {
            c.gate_points = v;
        }
        if o.jobs.is_some() {
            c.jobs = o.jobs;
        }
        if let Some(v) = o.seed {
            c.seed = v;
        }
        if let Some(v) = &o.out {
            c.output.dir = v.clone();
        }
        if let Some(v) = o.format {
            c.output.format = v;
        }
        c.ideal |= o.ideal;
        c.params = c.params.validated()?;
        if c.jobs == Some(0) {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(c)
    }

    pub fn pulse_for(&self, duration: f64) -> Result<PulseSpec, CliError> {
        Ok(PulseSpec::gaussian(duration)?)
    }

    /// Grid for a pulse: the default grid unless overridden. With only one
    /// of `omega_b`, `n_modes` given, the other follows from the default
    /// spacing 2π/(10T).
    pub fn grid_for(&self, pulse: &PulseSpec) -> Result<ModeGrid, CliError> {
        let default = ModeGrid::for_pulse(pulse)?;
        let grid = match (self.grid.omega_b, self.grid.n_modes) {
            (None, None) => default,
            (Some(wb), Some(n)) => ModeGrid::new(wb, n)?,
            (Some(wb), None) => {
                let n = (2.0 * wb / default.delta_omega()).round().max(2.0) as usize;
                ModeGrid::new(wb, n)?
            }
            (None, Some(n)) => ModeGrid::new(n as f64 * default.delta_omega() / 2.0, n)?,
        };
        Ok(grid)
    }

    pub fn write_echo(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        crate::output::write_file(&dir.join("config.json"), &(text + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = std::env::temp_dir().join(format!("cpf-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        fs::write(
            &path,
            r#"{"params":{"g":2e9,"kappa":3e7,"gamma":10},"seed":5}"#,
        )
        .unwrap();
        let o = Overrides {
            config: Some(path),
            kappa: Some(4e7),
            ..Default::default()
        };
        let c = RunConfig::resolve(&o).unwrap();
        assert_eq!(c.params.g, 2e9);
        assert_eq!(c.params.kappa, 4e7);
        assert_eq!(c.params.delta, 0.0);
        assert_eq!(c.seed, 5);
        assert_eq!(c.duration, 3.0e-6);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn echoed_config_round_trips() {
        let c = RunConfig {
            grid: GridOverride {
                omega_b: Some(1.5e7),
                n_modes: None,
            },
            sweep: vec![1e-6, 2e-6],
            ..Default::default()
        };
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_values() {
        let o = Overrides {
            gamma: Some(-1.0),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(&o), Err(CliError::Config(_))));
        let o = Overrides {
            jobs: Some(0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&o).is_err());
        let bad: Result<RunConfig, _> =
            serde_json::from_str(r#"{"ion":{"dipole":"","coherence_time":1}}"#);
        assert!(bad.is_err());
        let missing: Result<RunConfig, _> = serde_json::from_str(r#"{"ion":{"coherence_time":1}}"#);
        assert!(missing.is_err());
    }

    #[test]
    fn partial_grid_override_uses_default_spacing() {
        let c = RunConfig {
            grid: GridOverride {
                omega_b: None,
                n_modes: Some(100),
            },
            ..Default::default()
        };
        let pulse = c.pulse_for(3e-6).unwrap();
        let g = c.grid_for(&pulse).unwrap();
        assert_eq!(g.n_modes(), 100);
        let default = ModeGrid::for_pulse(&pulse).unwrap();
        assert!((g.delta_omega() / default.delta_omega() - 1.0).abs() < 1e-12);
    }
}
