//! TOML run configuration. Unknown keys are rejected everywhere.

use std::path::PathBuf;

use fgle::experiments::{
    ExactSoliton, GAUSSIAN_INTERVAL, GAUSSIAN_STEP, SOLITON_INTERVAL, SOLITON_UPSILON,
};
use fgle::{GridSpec, ModelParams, SolverSettings, TimeGrid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{0}")]
    Model(#[from] fgle::Error),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Convergence,
    Decay,
    Inviscid,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub model: ModelSection,
    pub grid: GridSection,
    pub time: TimeSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecaySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inviscid: Option<InviscidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    pub upsilon: f64,
    pub eta: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub gamma: f64,
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            upsilon: self.upsilon,
            eta: self.eta,
            kappa: self.kappa,
            zeta: self.zeta,
            gamma: self.gamma,
            alpha: self.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    /// Spacing; `(b − a)/h` must be an integer.
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub iter_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            iter_tol: s.iter_tol,
            max_iters: s.max_iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    /// `exp(−2x²)`.
    #[default]
    Gaussian,
    /// The exact `α = 2` soliton at `t = 0`, for `model.upsilon`.
    Soliton,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Exact,
    Fine,
}

/// Finest reference for fractional-order studies.
pub const FULL_REFERENCE: (f64, f64) = (0.0125, 1e-4);
/// Default, four times coarser in `h` and five in `τ`.
pub const SCALED_REFERENCE: (f64, f64) = (0.025, 5e-4);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Number of `(τ, h)` levels, starting at `time.tau`/`grid.h` and halving.
    pub levels: usize,
    pub reference: ReferenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tau: Option<f64>,
    /// Accepted band for observed orders.
    pub min_order: f64,
    pub max_order: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            levels: 5,
            reference: ReferenceKind::Exact,
            reference_h: None,
            reference_tau: None,
            min_order: 1.85,
            max_order: 2.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    pub gammas: Vec<f64>,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            gammas: vec![-2.0, -4.0, -6.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InviscidSection {
    /// `(υ, κ)` pairs approaching zero.
    pub sequence: Vec<(f64, f64)>,
}

impl Default for InviscidSection {
    fn default() -> Self {
        Self {
            sequence: vec![(0.1, 0.1), (0.01, 0.01), (0.001, 0.001)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub alphas: Vec<f64>,
    pub cells: Vec<usize>,
    pub random_vectors: usize,
    pub seed: u64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            alphas: vec![1.1, 1.3, 1.5, 1.7, 1.9, 2.0],
            cells: vec![32, 128],
            random_vectors: 20,
            seed: 2024,
        }
    }
}

impl RunConfig {
    /// Gaussian pulse on `[−10, 10]`, `τ = h = 0.05`, `T = 1`, `α = 1.8`.
    pub fn gaussian_defaults() -> Self {
        Self {
            mode: None,
            output_dir: None,
            model: ModelSection {
                alpha: 1.8,
                upsilon: 1.0,
                eta: 1.0,
                kappa: 1.0,
                zeta: 2.0,
                gamma: 0.0,
            },
            grid: GridSection {
                a: GAUSSIAN_INTERVAL.0,
                b: GAUSSIAN_INTERVAL.1,
                h: GAUSSIAN_STEP,
            },
            time: TimeSection {
                t_final: 1.0,
                tau: GAUSSIAN_STEP,
            },
            solver: SolverSection::default(),
            initial: InitialSection::default(),
            output: OutputSection::default(),
            convergence: None,
            decay: None,
            inviscid: None,
            verify: None,
        }
    }

    /// Built-in configuration used when no file is given.
    pub fn defaults_for(mode: Mode) -> Self {
        let mut c = Self::gaussian_defaults();
        c.mode = Some(mode);
        match mode {
            Mode::Simulate => c.output.snapshot_times = vec![0.0, 0.5, 1.0],
            Mode::Convergence => {
                let s = ExactSoliton::new(SOLITON_UPSILON);
                let p = s.params(2.0);
                c.model = ModelSection {
                    alpha: 2.0,
                    upsilon: p.upsilon,
                    eta: p.eta,
                    kappa: p.kappa,
                    zeta: p.zeta,
                    gamma: p.gamma,
                };
                c.grid = GridSection {
                    a: SOLITON_INTERVAL.0,
                    b: SOLITON_INTERVAL.1,
                    h: 0.2,
                };
                c.time = TimeSection {
                    t_final: 1.0,
                    tau: 0.02,
                };
                c.initial.kind = InitialKind::Soliton;
                c.convergence = Some(ConvergenceSection::default());
            }
            Mode::Decay => {
                c.model.alpha = 1.3;
                c.decay = Some(DecaySection::default());
            }
            Mode::Inviscid => {
                c.model.upsilon = 0.0;
                c.model.kappa = 0.0;
                c.model.zeta = -2.0;
                c.inviscid = Some(InviscidSection::default());
            }
            Mode::Verify => c.verify = Some(VerifySection::default()),
        }
        c
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        Ok(GridSpec::with_spacing(
            self.grid.a,
            self.grid.b,
            self.grid.h,
        )?)
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        Ok(TimeGrid::with_step(self.time.t_final, self.time.tau)?)
    }

    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            iter_tol: self.solver.iter_tol,
            max_iters: self.solver.max_iters,
        }
    }

    /// Checks every section present, independent of the mode.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.params().validate()?;
        self.grid_spec()?;
        let time = self.time_grid()?;
        self.settings().validate()?;
        if self.initial.kind == InitialKind::Soliton && !(self.model.upsilon > 0.0) {
            return Err(invalid(
                "model.upsilon",
                "the soliton initial profile needs upsilon > 0",
            ));
        }
        for &t in &self.output.snapshot_times {
            if !(0.0..=time.t_final()).contains(&t) {
                return Err(invalid(
                    "output.snapshot_times",
                    format!("{t} lies outside [0, {}]", time.t_final()),
                ));
            }
        }
        if let Some(c) = &self.convergence {
            if c.levels == 0 {
                return Err(invalid("convergence.levels", "must be at least 1"));
            }
            if !(c.min_order <= c.max_order) {
                return Err(invalid(
                    "convergence.min_order",
                    "must not exceed max_order",
                ));
            }
            match c.reference {
                ReferenceKind::Fine => {
                    for (field, v) in [
                        ("convergence.reference_h", c.reference_h),
                        ("convergence.reference_tau", c.reference_tau),
                    ] {
                        match v {
                            Some(v) if v > 0.0 => {}
                            _ => {
                                return Err(invalid(
                                    field,
                                    "a positive value is required for a fine reference",
                                ))
                            }
                        }
                    }
                }
                ReferenceKind::Exact => self.check_exact_reference()?,
            }
        }
        if let Some(d) = &self.decay {
            if d.gammas.is_empty() || d.gammas.iter().any(|g| !g.is_finite()) {
                return Err(invalid("decay.gammas", "need at least one finite value"));
            }
        }
        if let Some(i) = &self.inviscid {
            if i.sequence.is_empty()
                || i.sequence
                    .iter()
                    .any(|&(u, k)| !(u >= 0.0) || !k.is_finite())
            {
                return Err(invalid(
                    "inviscid.sequence",
                    "need at least one (upsilon >= 0, kappa) pair",
                ));
            }
        }
        if let Some(v) = &self.verify {
            for &a in &v.alphas {
                fgle::wsgd::validate_alpha(a)?;
            }
            if v.cells.iter().any(|&m| m < 3) {
                return Err(invalid("verify.cells", "every entry must be at least 3"));
            }
        }
        Ok(())
    }

    /// The exact solution is only known at `α = 2` for the soliton family.
    fn check_exact_reference(&self) -> Result<(), ConfigError> {
        if self.initial.kind != InitialKind::Soliton {
            return Err(invalid(
                "convergence.reference",
                "\"exact\" needs initial.kind = \"soliton\"",
            ));
        }
        if self.model.alpha != 2.0 {
            return Err(invalid(
                "convergence.reference",
                "\"exact\" needs alpha = 2",
            ));
        }
        let expected = ExactSoliton::new(self.model.upsilon).params(2.0);
        for (field, got, want) in [
            ("model.eta", self.model.eta, expected.eta),
            ("model.kappa", self.model.kappa, expected.kappa),
            ("model.zeta", self.model.zeta, expected.zeta),
            ("model.gamma", self.model.gamma, expected.gamma),
        ] {
            if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
                return Err(invalid(
                    field,
                    format!("the exact soliton needs {want:?}, got {got:?}"),
                ));
            }
        }
        Ok(())
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("configuration is always representable")
}
