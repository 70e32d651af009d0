//! CSV artifacts. Floats use 17 significant digits in scientific notation,
//! which round-trips exactly and does not depend on locale.

use std::fs::File;
use std::path::{Path, PathBuf};

use fgle::experiments::{ConvergenceRow, DecaySeries, InviscidReport};
use fgle::stepper::{Snapshot, Trajectory};
use fgle::{ComplexField, GridSpec};

use crate::verify::VerifyReport;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_convergence(dir: &Path, rows: &[ConvergenceRow]) -> csv::Result<PathBuf> {
    let path = dir.join("convergence.csv");
    write_table(
        &path,
        &["tau", "h", "err_l2", "err_linf", "order1", "order2"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.tau),
                fmt_f64(r.h),
                fmt_f64(r.err_l2),
                fmt_f64(r.err_linf),
                fmt_opt(r.order1),
                fmt_opt(r.order2),
            ]
        }),
    )?;
    Ok(path)
}

pub fn write_norms(dir: &Path, times: &[f64], norms_sq: &[f64]) -> csv::Result<PathBuf> {
    let path = dir.join("norms.csv");
    write_table(
        &path,
        &["t", "norm_sq"],
        times
            .iter()
            .zip(norms_sq)
            .map(|(&t, &n)| vec![fmt_f64(t), fmt_f64(n)]),
    )?;
    Ok(path)
}

pub fn write_diagnostics(dir: &Path, traj: &Trajectory) -> csv::Result<PathBuf> {
    let path = dir.join("diagnostics.csv");
    write_table(
        &path,
        &["n", "iterations", "increment", "identity_residual"],
        traj.diagnostics.iter().enumerate().map(|(n, d)| {
            vec![
                n.to_string(),
                d.iterations.to_string(),
                fmt_f64(d.final_increment),
                fmt_f64(d.energy_identity_residual),
            ]
        }),
    )?;
    Ok(path)
}

fn field_rows<'a>(
    grid: &'a GridSpec,
    u: &'a ComplexField,
) -> impl Iterator<Item = Vec<String>> + 'a {
    grid.interior_nodes()
        .into_iter()
        .zip(u.values())
        .map(|(x, v)| vec![fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm())])
}

/// `snapshot_t<time>.csv`, the time printed in shortest round-trip form.
pub fn write_snapshot(dir: &Path, grid: &GridSpec, snap: &Snapshot) -> csv::Result<PathBuf> {
    let path = dir.join(format!("snapshot_t{}.csv", snap.time));
    write_table(
        &path,
        &["x", "re", "im", "abs"],
        field_rows(grid, &snap.field),
    )?;
    Ok(path)
}

pub fn write_decay(dir: &Path, series: &[DecaySeries]) -> csv::Result<PathBuf> {
    let path = dir.join("decay.csv");
    write_table(
        &path,
        &["gamma", "t", "norm_sq"],
        series.iter().flat_map(|s| {
            s.times
                .iter()
                .zip(&s.norms_sq)
                .map(|(&t, &n)| vec![fmt_f64(s.gamma), fmt_f64(t), fmt_f64(n)])
        }),
    )?;
    Ok(path)
}

/// `inviscid.csv` holds the deviations; `inviscid_profiles.csv` the final
/// states, the Schrödinger limit listed with `upsilon = kappa = 0`.
pub fn write_inviscid(
    dir: &Path,
    grid: &GridSpec,
    report: &InviscidReport,
) -> csv::Result<Vec<PathBuf>> {
    let summary = dir.join("inviscid.csv");
    write_table(
        &summary,
        &["alpha", "upsilon", "kappa", "deviation"],
        report.points.iter().map(|p| {
            vec![
                fmt_f64(report.alpha),
                fmt_f64(p.upsilon),
                fmt_f64(p.kappa),
                fmt_f64(p.deviation),
            ]
        }),
    )?;
    let profiles = dir.join("inviscid_profiles.csv");
    let runs = std::iter::once((0.0, 0.0, &report.limit)).chain(
        report
            .points
            .iter()
            .zip(&report.finals)
            .map(|(p, u)| (p.upsilon, p.kappa, u)),
    );
    write_table(
        &profiles,
        &["upsilon", "kappa", "x", "re", "im", "abs"],
        runs.flat_map(|(ups, kap, u)| {
            field_rows(grid, u).map(move |mut row| {
                row.splice(0..0, [fmt_f64(ups), fmt_f64(kap)]);
                row
            })
        }),
    )?;
    Ok(vec![summary, profiles])
}

pub fn write_verify(dir: &Path, report: &VerifyReport) -> csv::Result<PathBuf> {
    let path = dir.join("verify.csv");
    write_table(
        &path,
        &["suite", "alpha", "cells", "check", "passed", "margin"],
        report.checks.iter().map(|c| {
            vec![
                c.suite.to_string(),
                fmt_f64(c.alpha),
                c.cells.map(|m| m.to_string()).unwrap_or_default(),
                c.name.clone(),
                c.passed.to_string(),
                fmt_f64(c.margin),
            ]
        }),
    )?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 5.5462e-3, -2.0f64.sqrt(), 1e-300, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
            assert!(!s.contains(','));
        }
    }
}
