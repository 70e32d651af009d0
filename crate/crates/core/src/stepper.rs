//! Implicit midpoint time stepping.
//!
//! With `z = u^{n+1/2} = (u^{n+1} + u^n)/2` one step of the scheme reads
//!
//! ```text
//! z = u^n − (τ/2)[(υ+iη)Δ_h^α z + (κ+iζ)|z|²z − γz],    u^{n+1} = 2z − u^n.
//! ```
//!
//! The cubic term is lagged, so each iteration solves
//! `A z^{(s+1)} = u^n − (τ/2)(κ+iζ)|z^{(s)}|²z^{(s)}` with the constant matrix
//! `A = (1 − τγ/2)I + (τ/2)(υ+iη)h^{−α}C`, factored once per run.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{linf_norm, lu_factor, norm_sq, ComplexField, FactorizedSystem, SquareMatrix};
use crate::wsgd::{assemble_operator, validate_alpha, OperatorMatrix, WsgdWeights};

/// Coefficients of `u_t + (υ+iη)(−Δ)^{α/2}u + (κ+iζ)|u|²u − γu = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub upsilon: f64,
    pub eta: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        for (name, v) in [
            ("upsilon", self.upsilon),
            ("eta", self.eta),
            ("kappa", self.kappa),
            ("zeta", self.zeta),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        // υ = 0 is the fractional Schrödinger limit.
        if self.upsilon < 0.0 {
            return Err(Error::invalid(
                "upsilon",
                format!("must be nonnegative, got {}", self.upsilon),
            ));
        }
        Ok(())
    }

    /// `υ + iη`.
    pub fn dispersion(&self) -> Complex64 {
        Complex64::new(self.upsilon, self.eta)
    }

    /// `κ + iζ`.
    pub fn nonlinearity(&self) -> Complex64 {
        Complex64::new(self.kappa, self.zeta)
    }
}

/// Uniform grid `x_j = a + j·h`, `h = (b − a)/M`; unknowns live on
/// `j = 1, …, M − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    a: f64,
    b: f64,
    cells: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid(
                "interval",
                format!("need a < b, got [{a}, {b}]"),
            ));
        }
        if cells < 3 {
            return Err(Error::invalid("M", format!("need M >= 3, got {cells}")));
        }
        Ok(Self { a, b, cells })
    }

    /// Grid with spacing `h`; `(b − a)/h` must be an integer to 1e−9.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        let cells = divide_exactly((b - a) / h)
            .ok_or_else(|| Error::invalid("h", format!("{h} does not divide [{a}, {b}]")))?;
        Self::new(a, b, cells)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells `M`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn interior_len(&self) -> usize {
        self.cells - 1
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.cells as f64
    }

    /// `x_j` for `j = 0..=M`.
    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.cells).map(|j| self.x(j)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> ComplexField {
        ComplexField::new(self.interior_nodes().into_iter().map(f).collect(), self.h())
    }
}

pub(crate) fn divide_exactly(ratio: f64) -> Option<usize> {
    let n = ratio.round();
    (n >= 1.0 && (ratio - n).abs() <= 1e-9 * n).then_some(n as usize)
}

/// `t_n = n·τ`, `τ = T/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::invalid(
                "T",
                format!("must be positive, got {t_final}"),
            ));
        }
        Ok(Self { t_final, steps })
    }

    /// Grid with step `tau`; `T/τ` must be an integer to 1e−9.
    pub fn with_step(t_final: f64, tau: f64) -> Result<Self> {
        let steps = divide_exactly(t_final / tau)
            .ok_or_else(|| Error::invalid("tau", format!("{tau} does not divide T = {t_final}")))?;
        Self::new(t_final, steps)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.t_final / self.steps as f64
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau()
    }

    /// Nearest step index to `t`.
    pub fn step_at(&self, t: f64) -> usize {
        if self.steps == 0 {
            0
        } else {
            ((t / self.tau()).round() as usize).min(self.steps)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub iter_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            iter_tol: 1e-14,
            max_iters: 100,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.iter_tol > 0.0) {
            return Err(Error::invalid(
                "iter_tol",
                format!("must be positive, got {}", self.iter_tol),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// Linear solves performed.
    pub iterations: usize,
    /// Final `‖z^{(s+1)} − z^{(s)}‖_{l^∞_h}`.
    pub final_increment: f64,
    /// `(‖u^{n+1}‖² − ‖u^n‖²)/(2τ) + υ‖Λ^α z‖² + κ‖z‖⁴_{l⁴} − γ‖z‖²`,
    /// zero for an exact solution of the scheme.
    pub energy_identity_residual: f64,
    /// `‖u^{n+1}‖²_h`.
    pub norm_sq: f64,
}

/// `A = (1 − τγ/2)I + (τ/2)(υ+iη)h^{−α}C`, unfactored.
pub fn system_matrix(
    params: &ModelParams,
    grid: &GridSpec,
    tau: f64,
    op: &OperatorMatrix,
) -> Result<SquareMatrix<Complex64>> {
    if op.cells() != grid.cells() || op.alpha() != params.alpha {
        return Err(Error::invalid(
            "operator",
            format!(
                "assembled for (alpha {}, M {}), needed (alpha {}, M {})",
                op.alpha(),
                op.cells(),
                params.alpha,
                grid.cells()
            ),
        ));
    }
    let diag = Complex64::new(1.0 - tau * params.gamma / 2.0, 0.0);
    let coupling = params.dispersion() * (tau / 2.0 * grid.h().powf(-params.alpha));
    let c = op.matrix();
    Ok(SquareMatrix::from_fn(c.size(), |i, j| {
        let v = coupling * c[(i, j)];
        if i == j {
            v + diag
        } else {
            v
        }
    }))
}

pub fn build_system_matrix(
    params: &ModelParams,
    grid: &GridSpec,
    tau: f64,
    op: &OperatorMatrix,
) -> Result<FactorizedSystem> {
    lu_factor(system_matrix(params, grid, tau, op)?)
}

/// Everything a run needs that does not change between steps.
#[derive(Debug, Clone)]
pub struct Integrator {
    params: ModelParams,
    grid: GridSpec,
    tau: f64,
    settings: SolverSettings,
    op: OperatorMatrix,
    system: FactorizedSystem,
}

impl Integrator {
    pub fn new(
        params: ModelParams,
        grid: GridSpec,
        tau: f64,
        settings: SolverSettings,
    ) -> Result<Self> {
        params.validate()?;
        settings.validate()?;
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::invalid(
                "tau",
                format!("must be nonnegative, got {tau}"),
            ));
        }
        let weights = WsgdWeights::for_grid(params.alpha, grid.cells())?;
        let op = assemble_operator(&weights, grid.cells())?;
        let system = build_system_matrix(&params, &grid, tau, &op)?;
        Ok(Self {
            params,
            grid,
            tau,
            settings,
            op,
            system,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn system(&self) -> &FactorizedSystem {
        &self.system
    }

    /// Advances `u_n` one step. `u_prev` is `u^{n−1}` for `n ≥ 1` and
    /// selects the extrapolated predictor `(3u^n − u^{n−1})/2`; without it
    /// the explicit predictor `u^0 − (τ/2)F(u^0)` is used.
    pub fn fixed_point_step(
        &self,
        u_n: &[Complex64],
        u_prev: Option<&[Complex64]>,
    ) -> Result<(Vec<Complex64>, StepDiagnostics)> {
        let n = self.grid.interior_len();
        if u_n.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: u_n.len(),
            });
        }
        let p = &self.params;
        let (h, tau) = (self.grid.h(), self.tau);
        let nonlin = p.nonlinearity();
        let half_tau = tau / 2.0;

        let mut z: Vec<Complex64> = match u_prev {
            Some(prev) => {
                if prev.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: prev.len(),
                    });
                }
                u_n.iter()
                    .zip(prev)
                    .map(|(a, b)| 1.5 * a - 0.5 * b)
                    .collect()
            }
            None => {
                let lap = self.op.apply(u_n, h);
                u_n.iter()
                    .zip(&lap)
                    .map(|(&u, &l)| {
                        u - half_tau
                            * (p.dispersion() * l + nonlin * u.norm_sqr() * u - p.gamma * u)
                    })
                    .collect()
            }
        };

        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        let mut iterations = 0;
        let mut increment = f64::INFINITY;
        loop {
            if iterations == self.settings.max_iters {
                return Err(Error::NonConvergence {
                    iterations,
                    increment,
                });
            }
            for ((r, &u), &zs) in rhs.iter_mut().zip(u_n).zip(&z) {
                *r = u - half_tau * nonlin * zs.norm_sqr() * zs;
            }
            self.system.solve_into(&rhs, &mut next)?;
            iterations += 1;
            increment = next
                .iter()
                .zip(&z)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            // f64::max drops NaN, so test the iterate itself.
            if !increment.is_finite() || !next.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { iterations });
            }
            std::mem::swap(&mut z, &mut next);
            if increment <= self.settings.iter_tol * linf_norm(&z).max(1.0) {
                break;
            }
        }

        let u_next: Vec<Complex64> = z.iter().zip(u_n).map(|(zj, uj)| 2.0 * zj - uj).collect();
        let norm_new = norm_sq(&u_next, h);
        let residual = self.energy_identity_residual(u_n, &u_next, norm_new);
        Ok((
            u_next,
            StepDiagnostics {
                iterations,
                final_increment: increment,
                energy_identity_residual: residual,
                norm_sq: norm_new,
            },
        ))
    }

    fn energy_identity_residual(
        &self,
        u_n: &[Complex64],
        u_next: &[Complex64],
        norm_new: f64,
    ) -> f64 {
        let p = &self.params;
        let h = self.grid.h();
        let mid: Vec<Complex64> = u_n.iter().zip(u_next).map(|(a, b)| (a + b) / 2.0).collect();
        let norm_old = norm_sq(u_n, h);
        let mid_sq = norm_sq(&mid, h);
        let quartic = h * mid.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>();
        let dissipation = if p.upsilon == 0.0 {
            0.0
        } else {
            p.upsilon * self.op.lambda_norm_sq(&mid, h)
        };
        ((norm_new - norm_old) / (2.0 * self.tau) + dissipation + p.kappa * quartic
            - p.gamma * mid_sq)
            .abs()
    }
}

/// Which states a run keeps besides the per-step norms and diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPolicy {
    /// Requested snapshot times, each rounded to the nearest step.
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Requested time.
    pub time: f64,
    pub step: usize,
    pub field: ComplexField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub time: TimeGrid,
    /// `‖u^n‖²_h` for `n = 0..=N`.
    pub norms_sq: Vec<f64>,
    /// One entry per step, `n = 0..N−1`.
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: ComplexField,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        (0..self.norms_sq.len())
            .map(|n| self.time.time(n))
            .collect()
    }
}

/// Runs `N` steps from `u0` sampled on the interior nodes.
pub fn run_simulation(
    params: &ModelParams,
    grid: &GridSpec,
    time: &TimeGrid,
    u0: impl Fn(f64) -> Complex64,
    settings: &SolverSettings,
    probes: &OutputPolicy,
) -> Result<Trajectory> {
    for &t in &probes.snapshot_times {
        if !(0.0..=time.t_final() * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::invalid(
                "snapshot_times",
                format!("{t} outside [0, T]"),
            ));
        }
    }
    let integrator = Integrator::new(*params, *grid, time.tau(), *settings)?;
    run_with(&integrator, time, grid.sample(u0), probes)
}

/// Runs `N` steps with a prebuilt integrator, starting from `initial`.
pub fn run_with(
    integrator: &Integrator,
    time: &TimeGrid,
    initial: ComplexField,
    probes: &OutputPolicy,
) -> Result<Trajectory> {
    let grid = *integrator.grid();
    let h = grid.h();
    if initial.len() != grid.interior_len() {
        return Err(Error::LengthMismatch {
            expected: grid.interior_len(),
            actual: initial.len(),
        });
    }
    let wanted: Vec<(f64, usize)> = probes
        .snapshot_times
        .iter()
        .map(|&t| (t, time.step_at(t)))
        .collect();
    let mut snapshots = Vec::new();
    let mut take = |step: usize, u: &[Complex64]| {
        for &(t, s) in &wanted {
            if s == step {
                snapshots.push(Snapshot {
                    time: t,
                    step,
                    field: ComplexField::new(u.to_vec(), h),
                });
            }
        }
    };

    let mut current = initial.into_values();
    let mut previous: Option<Vec<Complex64>> = None;
    let mut norms_sq = Vec::with_capacity(time.steps() + 1);
    let mut diagnostics = Vec::with_capacity(time.steps());
    norms_sq.push(norm_sq(&current, h));
    take(0, &current);
    for n in 0..time.steps() {
        let (next, diag) = integrator
            .fixed_point_step(&current, previous.as_deref())
            .map_err(|e| Error::AtStep {
                step: n,
                source: Box::new(e),
            })?;
        norms_sq.push(diag.norm_sq);
        diagnostics.push(diag);
        previous = Some(std::mem::replace(&mut current, next));
        take(n + 1, &current);
    }
    Ok(Trajectory {
        grid,
        time: *time,
        norms_sq,
        diagnostics,
        snapshots,
        final_state: ComplexField::new(current, h),
    })
}
