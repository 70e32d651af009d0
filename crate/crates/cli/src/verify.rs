//! Invariant suites over a grid of `α`: weight sign pattern, angular factor,
//! spectral equivalence, Cholesky split, and the per-step energy identity.

use std::f64::consts::PI;

use fgle::experiments::gaussian_initial;
use fgle::spectral::verify_energy_equivalence;
use fgle::stepper::{run_simulation, OutputPolicy};
use fgle::wsgd::{
    assemble_operator, check_weight_properties, h_function, WsgdWeights, PROPERTY_TRUNCATION,
};
use fgle::{Complex64, ComplexField, SolverSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, VerifySection};

const ENDPOINT_TOL: f64 = 1e-14;
const MONOTONE_SLACK: f64 = 1e-12;
const EQUIVALENCE_SLACK: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-10;
const ANGLE_SAMPLES: usize = 1000;
const IDENTITY_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCheck {
    pub suite: &'static str,
    pub alpha: f64,
    pub cells: Option<usize>,
    pub name: String,
    pub passed: bool,
    /// Distance to the threshold; negative when violated.
    pub margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub section: VerifySection,
    /// Base configuration for the energy-identity runs; `alpha` is replaced.
    pub run: RunConfig,
    /// Adds `delta` to weight `index` before the sign checks. Negative
    /// control for tests.
    #[doc(hidden)]
    pub perturbation: Option<(usize, f64)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            section: VerifySection::default(),
            run: RunConfig::gaussian_defaults(),
            perturbation: None,
        }
    }
}

fn check(
    suite: &'static str,
    alpha: f64,
    cells: Option<usize>,
    name: &str,
    margin: f64,
) -> VerifyCheck {
    VerifyCheck {
        suite,
        alpha,
        cells,
        name: name.to_string(),
        passed: margin >= 0.0,
        margin,
    }
}

fn weight_checks(alpha: f64, perturbation: Option<(usize, f64)>) -> fgle::Result<Vec<VerifyCheck>> {
    let mut w = WsgdWeights::new(alpha, PROPERTY_TRUNCATION)?;
    if let Some((index, delta)) = perturbation {
        w.perturb(index, delta);
    }
    Ok(check_weight_properties(&w)
        .checks
        .into_iter()
        .map(|c| VerifyCheck {
            suite: "weights",
            alpha,
            cells: None,
            name: c.name.to_string(),
            passed: c.passed,
            margin: c.margin,
        })
        .collect())
}

fn angular_checks(alpha: f64) -> fgle::Result<Vec<VerifyCheck>> {
    let samples = (0..ANGLE_SAMPLES)
        .map(|i| h_function(alpha, PI * i as f64 / (ANGLE_SAMPLES - 1) as f64))
        .collect::<fgle::Result<Vec<f64>>>()?;
    let at0 = (samples[0] - (alpha * PI / 2.0).cos()).abs();
    let at_pi = (samples[ANGLE_SAMPLES - 1] - (1.0 - alpha * alpha) / 3.0).abs();
    let mut out = vec![
        check(
            "angular",
            alpha,
            None,
            "h(alpha, 0) = cos(alpha pi / 2)",
            ENDPOINT_TOL - at0,
        ),
        check(
            "angular",
            alpha,
            None,
            "h(alpha, pi) = (1 - alpha^2) / 3",
            ENDPOINT_TOL - at_pi,
        ),
    ];
    if alpha == 2.0 {
        let dev = samples.iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max);
        out.push(check(
            "angular",
            alpha,
            None,
            "h(2, .) = -1",
            ENDPOINT_TOL - dev,
        ));
    } else {
        let drop = samples.windows(2).map(|p| p[0] - p[1]).fold(0.0, f64::max);
        out.push(check(
            "angular",
            alpha,
            None,
            "h(alpha, .) nondecreasing",
            MONOTONE_SLACK - drop,
        ));
    }
    Ok(out)
}

fn random_field(rng: &mut ChaCha8Rng, len: usize, h: f64) -> ComplexField {
    ComplexField::new(
        (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        h,
    )
}

fn matrix_checks(
    alpha: f64,
    cells: usize,
    vectors: usize,
    rng: &mut ChaCha8Rng,
) -> fgle::Result<Vec<VerifyCheck>> {
    let weights = WsgdWeights::for_grid(alpha, cells)?;
    let h = 1.0 / cells as f64;
    let mut worst_equiv = f64::INFINITY;
    let mut worst_split: f64 = 0.0;
    let op = assemble_operator(&weights, cells)?;
    for _ in 0..vectors {
        let u = random_field(rng, cells - 1, h);
        let r = verify_energy_equivalence(&u, &weights)?;
        worst_equiv = worst_equiv.min(r.lower_margin.min(r.upper_margin) / r.seminorm_sq);
        let q = op.quadratic_form(u.values(), h);
        let l = op.lambda_norm_sq(u.values(), h);
        worst_split = worst_split.max((q.re - l).abs() / l).max(q.im.abs() / l);
    }
    Ok(vec![
        check(
            "spectral-equivalence",
            alpha,
            Some(cells),
            "C_alpha |u|^2 <= (Lu, u) <= |u|^2",
            worst_equiv + EQUIVALENCE_SLACK,
        ),
        check(
            "cholesky-identity",
            alpha,
            Some(cells),
            "(Lu, u) = |Lambda u|^2",
            SPLIT_TOL - worst_split,
        ),
    ])
}

fn identity_check(alpha: f64, base: &RunConfig) -> fgle::Result<VerifyCheck> {
    let mut params = base.model.params();
    params.alpha = alpha;
    let grid = fgle::GridSpec::with_spacing(base.grid.a, base.grid.b, base.grid.h)?;
    let time = fgle::TimeGrid::new(IDENTITY_STEPS as f64 * base.time.tau, IDENTITY_STEPS)?;
    let settings = SolverSettings {
        iter_tol: base.solver.iter_tol,
        max_iters: base.solver.max_iters,
    };
    let traj = run_simulation(
        &params,
        &grid,
        &time,
        gaussian_initial,
        &settings,
        &OutputPolicy::default(),
    )?;
    let worst = traj
        .diagnostics
        .iter()
        .map(|d| d.energy_identity_residual)
        .fold(0.0, f64::max);
    Ok(check(
        "energy-identity",
        alpha,
        Some(grid.cells()),
        "per-step residual",
        IDENTITY_TOL - worst,
    ))
}

pub fn verify_suite(opts: &VerifyOptions) -> fgle::Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.section.seed);
    let mut checks = Vec::new();
    for &alpha in &opts.section.alphas {
        checks.extend(weight_checks(alpha, opts.perturbation)?);
        checks.extend(angular_checks(alpha)?);
        for &cells in &opts.section.cells {
            checks.extend(matrix_checks(
                alpha,
                cells,
                opts.section.random_vectors,
                &mut rng,
            )?);
        }
        checks.push(identity_check(alpha, &opts.run)?);
    }
    Ok(VerifyReport { checks })
}
