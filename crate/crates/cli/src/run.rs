//! Mode drivers: run the requested study, write its CSV files and grade
//! the result against its gate.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fgle::experiments::{
    convergence_study, gaussian_initial, halving_levels, inviscid_limit_study, norm_decay_study,
    ConvergenceSetup, ExactSoliton, Reference,
};
use fgle::stepper::{run_simulation, OutputPolicy};
use fgle::Complex64;

use crate::config::{
    InitialKind, Mode, ReferenceKind, RunConfig, FULL_REFERENCE, SCALED_REFERENCE,
};
use crate::output;
use crate::verify::{verify_suite, VerifyOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub gates: Vec<Gate>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    fn gate(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.gates.push(Gate {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Replace a fine reference with `FULL_REFERENCE`.
    pub full_reference: bool,
}

fn initial_profile(config: &RunConfig) -> Box<dyn Fn(f64) -> Complex64> {
    match config.initial.kind {
        InitialKind::Gaussian => Box::new(gaussian_initial),
        InitialKind::Soliton => {
            let s = ExactSoliton::new(config.model.upsilon);
            Box::new(move |x| s.eval(x, 0.0))
        }
    }
}

/// Validates `config` for `mode`, runs it, and writes artifacts into `out`.
pub fn execute(mode: Mode, config: &RunConfig, out: &Path, opts: RunOptions) -> Result<RunOutcome> {
    if let Some(m) = config.mode {
        if m != mode {
            bail!("configuration is for mode {m:?}, but {mode:?} was requested");
        }
    }
    config.validate()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match mode {
        Mode::Simulate => simulate(config, out),
        Mode::Convergence => convergence(config, out, opts),
        Mode::Decay => decay(config, out),
        Mode::Inviscid => inviscid(config, out),
        Mode::Verify => verify(config, out),
    }
}

fn simulate(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid_spec()?;
    let time = config.time_grid()?;
    let policy = OutputPolicy {
        snapshot_times: config.output.snapshot_times.clone(),
    };
    let u0 = initial_profile(config);
    let traj = run_simulation(
        &config.model.params(),
        &grid,
        &time,
        u0,
        &config.settings(),
        &policy,
    )?;
    let mut outcome = RunOutcome::default();
    outcome
        .files
        .push(output::write_norms(out, &traj.times(), &traj.norms_sq)?);
    outcome.files.push(output::write_diagnostics(out, &traj)?);
    for snap in &traj.snapshots {
        outcome
            .files
            .push(output::write_snapshot(out, &grid, snap)?);
    }
    let worst = traj
        .diagnostics
        .iter()
        .map(|d| d.energy_identity_residual)
        .fold(0.0, f64::max);
    outcome.gate(
        "run completed",
        traj.final_state.is_finite(),
        format!(
            "{} steps, max energy-identity residual {worst:.3e}",
            traj.diagnostics.len()
        ),
    );
    Ok(outcome)
}

fn convergence(config: &RunConfig, out: &Path, opts: RunOptions) -> Result<RunOutcome> {
    let section = config.convergence.unwrap_or_default();
    let u0 = initial_profile(config);
    let setup = ConvergenceSetup {
        params: config.model.params(),
        interval: (config.grid.a, config.grid.b),
        t_final: config.time.t_final,
        initial: &*u0,
        settings: config.settings(),
    };
    let soliton = ExactSoliton::new(config.model.upsilon);
    let exact = move |x: f64, t: f64| soliton.eval(x, t);
    let reference = match section.reference {
        ReferenceKind::Exact => Reference::Exact(&exact),
        ReferenceKind::Fine => {
            let (h, tau) = if opts.full_reference {
                FULL_REFERENCE
            } else {
                (
                    section.reference_h.unwrap_or(SCALED_REFERENCE.0),
                    section.reference_tau.unwrap_or(SCALED_REFERENCE.1),
                )
            };
            Reference::FineGrid { h, tau }
        }
    };
    let levels = halving_levels(config.time.tau, config.grid.h, section.levels);
    let rows = convergence_study(&setup, &levels, &reference)?;
    let mut outcome = RunOutcome::default();
    outcome.files.push(output::write_convergence(out, &rows)?);
    let band = section.min_order..=section.max_order;
    let orders: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.order1, r.order2])
        .flatten()
        .collect();
    outcome.gate(
        "observed orders",
        orders.iter().all(|o| band.contains(o)),
        format!(
            "orders [{}] against [{}, {}]",
            orders
                .iter()
                .map(|o| format!("{o:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
            section.min_order,
            section.max_order
        ),
    );
    Ok(outcome)
}

fn decay(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let section = config.decay.clone().unwrap_or_default();
    let grid = config.grid_spec()?;
    let time = config.time_grid()?;
    let u0 = initial_profile(config);
    let series = norm_decay_study(
        &config.model.params(),
        &section.gammas,
        &grid,
        &time,
        &*u0,
        &config.settings(),
    )?;
    let mut outcome = RunOutcome::default();
    outcome.files.push(output::write_decay(out, &series)?);
    // Monotone decay is only guaranteed for κ ≥ 0, γ ≤ 0.
    if config.model.kappa >= 0.0 {
        for s in series.iter().filter(|s| s.gamma <= 0.0) {
            let worst = s
                .norms_sq
                .windows(2)
                .map(|p| p[1] - p[0])
                .fold(f64::NEG_INFINITY, f64::max);
            outcome.gate(
                format!("gamma {}: norm nonincreasing", s.gamma),
                worst <= 1e-10,
                format!("largest step change {worst:.3e}"),
            );
        }
    }
    Ok(outcome)
}

fn inviscid(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let section = config.inviscid.clone().unwrap_or_default();
    let grid = config.grid_spec()?;
    let time = config.time_grid()?;
    let u0 = initial_profile(config);
    let report = inviscid_limit_study(
        &config.model.params(),
        &section.sequence,
        &grid,
        &time,
        &*u0,
        &config.settings(),
    )?;
    let mut outcome = RunOutcome::default();
    outcome
        .files
        .extend(output::write_inviscid(out, &grid, &report)?);
    let devs: Vec<String> = report
        .points
        .iter()
        .map(|p| format!("{:.3e}", p.deviation))
        .collect();
    outcome.gate(
        "deviation strictly decreasing",
        report.strictly_decreasing(),
        devs.join(" > "),
    );
    Ok(outcome)
}

fn verify(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let opts = VerifyOptions {
        section: config.verify.clone().unwrap_or_default(),
        run: config.clone(),
        perturbation: None,
    };
    let report = verify_suite(&opts)?;
    let mut outcome = RunOutcome::default();
    outcome.files.push(output::write_verify(out, &report)?);
    for c in &report.checks {
        let cells = c.cells.map(|m| format!(", M = {m}")).unwrap_or_default();
        outcome.gate(
            format!("{} (alpha {}{cells}): {}", c.suite, c.alpha, c.name),
            c.passed,
            format!("margin {:.3e}", c.margin),
        );
    }
    Ok(outcome)
}
