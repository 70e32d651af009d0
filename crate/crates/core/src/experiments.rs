//! Numerical studies: grid-refinement convergence against an exact or a
//! fine-grid reference, decay of `‖u‖²_h` under different `γ`, the
//! inviscid limit toward the fractional Schrödinger equation, and the
//! spatial order of the WSGD operator on a smooth profile.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{linf_norm, norm_sq, ComplexField};
use crate::stepper::{
    divide_exactly, run_with, GridSpec, Integrator, ModelParams, OutputPolicy, SolverSettings,
    TimeGrid,
};
use crate::wsgd::{apply_fractional_laplacian, WsgdWeights};

/// Interval, step and initial profile of the Gaussian-pulse experiments.
pub const GAUSSIAN_INTERVAL: (f64, f64) = (-10.0, 10.0);
pub const GAUSSIAN_STEP: f64 = 0.05;

/// Interval of the soliton convergence experiments.
pub const SOLITON_INTERVAL: (f64, f64) = (-16.0, 16.0);
pub const SOLITON_UPSILON: f64 = 0.3;

/// `u₀(x) = exp(−2x²)`.
pub fn gaussian_initial(x: f64) -> Complex64 {
    Complex64::new((-2.0 * x * x).exp(), 0.0)
}

/// Travelling-phase soliton `u = a(x)·exp(i d ln a(x) − iωt)`,
/// `a(x) = F sech x`, an exact solution of the classical (`α = 2`)
/// Ginzburg–Landau equation for `η = 1/2`, `ζ = −1`, `γ = 0` and the
/// matching `κ < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSoliton {
    pub upsilon: f64,
    pub kappa: f64,
    pub d: f64,
    pub amplitude: f64,
    pub omega: f64,
}

impl ExactSoliton {
    pub fn new(upsilon: f64) -> Self {
        let s = (1.0 + 4.0 * upsilon * upsilon).sqrt();
        let kappa = -upsilon * (3.0 * s - 1.0) / (2.0 * (2.0 + 9.0 * upsilon * upsilon));
        let d = (s - 1.0) / (2.0 * upsilon);
        let amplitude = (d * s / (-2.0 * kappa)).sqrt();
        let omega = -d * (1.0 + 4.0 * upsilon * upsilon) / (2.0 * upsilon);
        Self {
            upsilon,
            kappa,
            d,
            amplitude,
            omega,
        }
    }

    /// Equation coefficients of the soliton family, at fractional order `alpha`.
    pub fn params(&self, alpha: f64) -> ModelParams {
        ModelParams {
            upsilon: self.upsilon,
            eta: 0.5,
            kappa: self.kappa,
            zeta: -1.0,
            gamma: 0.0,
            alpha,
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        let a = self.amplitude / x.cosh();
        let phase = self.d * a.ln() - self.omega * t;
        Complex64::from_polar(a, phase)
    }
}

pub fn exact_solution_alpha2(x: f64, t: f64, upsilon: f64) -> Complex64 {
    ExactSoliton::new(upsilon).eval(x, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
}

/// `(‖u − v‖_h, ‖u − v‖_{l^∞_h})`.
pub fn error_norms(u: &ComplexField, v: &ComplexField) -> Result<ErrorNorms> {
    u.check_compatible(v)?;
    let diff: Vec<Complex64> = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a - b)
        .collect();
    Ok(ErrorNorms {
        l2: norm_sq(&diff, u.h()).sqrt(),
        linf: linf_norm(&diff),
    })
}

/// `log₂(coarse/fine)`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Fine interior node `j·ratio` for each coarse interior node `j`.
pub fn restrict(fine: &ComplexField, ratio: usize) -> Result<ComplexField> {
    if ratio == 0 || !(fine.len() + 1).is_multiple_of(ratio) {
        return Err(Error::NotNested(format!(
            "{} fine cells are not a multiple of {ratio}",
            fine.len() + 1
        )));
    }
    let coarse_cells = (fine.len() + 1) / ratio;
    let values = (1..coarse_cells)
        .map(|j| fine.values()[j * ratio - 1])
        .collect();
    Ok(ComplexField::new(values, fine.h() * ratio as f64))
}

/// Places coarse values on the shared fine nodes; other nodes are zero.
pub fn inject(coarse: &ComplexField, ratio: usize) -> ComplexField {
    let fine_cells = (coarse.len() + 1) * ratio;
    let mut fine = ComplexField::zeros(fine_cells - 1, coarse.h() / ratio as f64);
    for (j, &v) in coarse.values().iter().enumerate() {
        fine.values_mut()[(j + 1) * ratio - 1] = v;
    }
    fine
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub h: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    pub order1: Option<f64>,
    pub order2: Option<f64>,
}

/// Fills `order1`/`order2` from consecutive rows; the first row has none.
pub fn fill_orders(rows: &mut [ConvergenceRow]) {
    for i in 0..rows.len() {
        if i == 0 {
            rows[i].order1 = None;
            rows[i].order2 = None;
        } else {
            rows[i].order1 = Some(observed_order(rows[i - 1].err_l2, rows[i].err_l2));
            rows[i].order2 = Some(observed_order(rows[i - 1].err_linf, rows[i].err_linf));
        }
    }
}

/// `count` levels starting at `(tau, h)`, halving both each time.
pub fn halving_levels(tau: f64, h: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let s = 0.5f64.powi(i as i32);
            (tau * s, h * s)
        })
        .collect()
}

pub enum Reference<'a> {
    /// Exact solution `u(x, t)`.
    Exact(&'a dyn Fn(f64, f64) -> Complex64),
    /// Numerical solution on a nested finer grid.
    FineGrid { h: f64, tau: f64 },
}

pub struct ConvergenceSetup<'a> {
    pub params: ModelParams,
    pub interval: (f64, f64),
    pub t_final: f64,
    pub initial: &'a dyn Fn(f64) -> Complex64,
    pub settings: SolverSettings,
}

impl ConvergenceSetup<'_> {
    fn run(&self, tau: f64, h: f64) -> Result<ComplexField> {
        let (a, b) = self.interval;
        let grid = GridSpec::with_spacing(a, b, h)?;
        let time = TimeGrid::with_step(self.t_final, tau)?;
        let integrator = Integrator::new(self.params, grid, time.tau(), self.settings)?;
        Ok(run_with(
            &integrator,
            &time,
            grid.sample(self.initial),
            &OutputPolicy::default(),
        )?
        .final_state)
    }
}

/// Errors at `T` on each `(tau, h)` level and the observed orders between
/// consecutive levels.
pub fn convergence_study(
    setup: &ConvergenceSetup<'_>,
    levels: &[(f64, f64)],
    reference: &Reference<'_>,
) -> Result<Vec<ConvergenceRow>> {
    let (a, _) = setup.interval;
    let fine = match *reference {
        Reference::FineGrid { h, tau } => {
            for &(lt, lh) in levels {
                if divide_exactly(lh / h).is_none() || divide_exactly(lt / tau).is_none() {
                    return Err(Error::NotNested(format!(
                        "level (tau {lt}, h {lh}) is not a multiple of reference (tau {tau}, h {h})"
                    )));
                }
            }
            Some((setup.run(tau, h)?, h))
        }
        Reference::Exact(_) => None,
    };

    let mut rows = Vec::with_capacity(levels.len());
    for &(tau, h) in levels {
        let numeric = setup.run(tau, h)?;
        let reference_values = match (reference, &fine) {
            (Reference::Exact(u), _) => {
                let grid = GridSpec::with_spacing(setup.interval.0, setup.interval.1, h)?;
                debug_assert_eq!(grid.a(), a);
                grid.sample(|x| u(x, setup.t_final))
            }
            (_, Some((field, h_ref))) => {
                let ratio = divide_exactly(h / h_ref).expect("checked above");
                restrict(field, ratio)?
            }
            _ => unreachable!(),
        };
        // Restriction multiplies h by an integer; use the level's own h.
        let reference_values = ComplexField::new(reference_values.into_values(), numeric.h());
        let err = error_norms(&reference_values, &numeric)?;
        rows.push(ConvergenceRow {
            tau,
            h,
            err_l2: err.l2,
            err_linf: err.linf,
            order1: None,
            order2: None,
        });
    }
    fill_orders(&mut rows);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub gamma: f64,
    pub times: Vec<f64>,
    pub norms_sq: Vec<f64>,
}

/// `‖u^n‖²_h` over time for each `γ`, other coefficients from `base`.
pub fn norm_decay_study(
    base: &ModelParams,
    gammas: &[f64],
    grid: &GridSpec,
    time: &TimeGrid,
    initial: &dyn Fn(f64) -> Complex64,
    settings: &SolverSettings,
) -> Result<Vec<DecaySeries>> {
    gammas
        .iter()
        .map(|&gamma| {
            let params = ModelParams { gamma, ..*base };
            let integrator = Integrator::new(params, *grid, time.tau(), *settings)?;
            let traj = run_with(
                &integrator,
                time,
                grid.sample(initial),
                &OutputPolicy::default(),
            )?;
            Ok(DecaySeries {
                gamma,
                times: traj.times(),
                norms_sq: traj.norms_sq,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InviscidPoint {
    pub upsilon: f64,
    pub kappa: f64,
    /// `‖u_FGLE − u_FSE‖_h` at `T`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InviscidReport {
    pub alpha: f64,
    pub points: Vec<InviscidPoint>,
    /// Schrödinger (`υ = κ = 0`) solution at `T`.
    pub limit: ComplexField,
    /// Ginzburg–Landau solutions at `T`, in sequence order.
    pub finals: Vec<ComplexField>,
}

impl InviscidReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.points
            .windows(2)
            .all(|p| p[1].deviation < p[0].deviation)
    }
}

/// Distance at `T` between solutions with `(υ, κ)` from `sequence` and the
/// `υ = κ = 0` solution; `η`, `ζ`, `γ`, `α` come from `base`.
pub fn inviscid_limit_study(
    base: &ModelParams,
    sequence: &[(f64, f64)],
    grid: &GridSpec,
    time: &TimeGrid,
    initial: &dyn Fn(f64) -> Complex64,
    settings: &SolverSettings,
) -> Result<InviscidReport> {
    let run = |upsilon: f64, kappa: f64| -> Result<ComplexField> {
        let params = ModelParams {
            upsilon,
            kappa,
            ..*base
        };
        let integrator = Integrator::new(params, *grid, time.tau(), *settings)?;
        Ok(run_with(
            &integrator,
            time,
            grid.sample(initial),
            &OutputPolicy::default(),
        )?
        .final_state)
    };
    let limit = run(0.0, 0.0)?;
    let mut points = Vec::with_capacity(sequence.len());
    let mut finals = Vec::with_capacity(sequence.len());
    for &(upsilon, kappa) in sequence {
        let u = run(upsilon, kappa)?;
        points.push(InviscidPoint {
            upsilon,
            kappa,
            deviation: error_norms(&u, &limit)?.l2,
        });
        finals.push(u);
    }
    Ok(InviscidReport {
        alpha: base.alpha,
        points,
        limit,
        finals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOrderReport {
    pub alpha: f64,
    /// `h, h/2, h/4`.
    pub spacings: [f64; 3],
    /// Max-norm differences between consecutive refinements on the
    /// coarsest nodes.
    pub differences: [f64; 2],
    /// `log₂` of the ratio of the two differences.
    pub order: f64,
    /// Max-norm error against the exact operator value, per spacing, when
    /// one is supplied.
    pub exact_errors: Option<[f64; 3]>,
}

impl OperatorOrderReport {
    /// Observed orders from `exact_errors`.
    pub fn exact_orders(&self) -> Option<[f64; 2]> {
        self.exact_errors
            .map(|e| [observed_order(e[0], e[1]), observed_order(e[1], e[2])])
    }
}

/// Applies `Δ_h^α` to `f` on `[a, b]` at `h, h/2, h/4` and estimates the
/// spatial order by Richardson differences on the shared coarse nodes.
/// `exact`, when given, is the exact `(−Δ)^{α/2} f`.
pub fn operator_order(
    alpha: f64,
    interval: (f64, f64),
    h: f64,
    f: &dyn Fn(f64) -> f64,
    exact: Option<&dyn Fn(f64) -> f64>,
) -> Result<OperatorOrderReport> {
    let spacings = [h, h / 2.0, h / 4.0];
    let mut values = Vec::with_capacity(3);
    let mut exact_errors = [0.0; 3];
    for (level, &hl) in spacings.iter().enumerate() {
        let grid = GridSpec::with_spacing(interval.0, interval.1, hl)?;
        let weights = WsgdWeights::for_grid(alpha, grid.cells())?;
        let u = grid.sample(|x| Complex64::new(f(x), 0.0));
        let lap = ComplexField::new(apply_fractional_laplacian(u.values(), &weights, hl)?, hl);
        let ratio = 1 << level;
        let on_coarse = restrict(&lap, ratio)?;
        if let Some(g) = exact {
            exact_errors[level] = lap
                .values()
                .iter()
                .zip(grid.interior_nodes())
                .map(|(v, x)| (v.re - g(x)).abs())
                .fold(0.0, f64::max);
        }
        values.push(on_coarse);
    }
    let diff = |p: &ComplexField, q: &ComplexField| {
        p.values()
            .iter()
            .zip(q.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let differences = [diff(&values[0], &values[1]), diff(&values[1], &values[2])];
    Ok(OperatorOrderReport {
        alpha,
        spacings,
        differences,
        order: observed_order(differences[0], differences[1]),
        exact_errors: exact.map(|_| exact_errors),
    })
}
