//! CSV and JSON artifacts.

use std::io::Write;

use serde::Serialize;

use crate::criticality::{CrossingReport, GapPoint};
use crate::eigensolver::EigenOptions;
use crate::error::Result;
use crate::hamiltonian::LadderConfig;
use crate::reduction::{ReductionOptions, ReductionTrajectory, StopReason};

pub const TRAJECTORY_HEADER: &str =
    "step,n,g,lambda1,lambda2,lambda3,e1,e2,e3,p1,p2,p3,entropy,eliminated,elim_amp,root_iters";

pub const GAP_CURVE_HEADER: &str = "param,lambda1,lambda2,gap";

/// Decimal rendering with 15 significant digits; tiny magnitudes switch to
/// exponent notation so no digits are lost.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..=15).contains(&mag) {
        return format!("{v:.14e}");
    }
    let decimals = (14 - mag).max(1) as usize;
    format!("{v:.decimals$}")
}

fn column(values: &[f64], i: usize) -> String {
    values.get(i).map(|&v| fmt_num(v)).unwrap_or_default()
}

pub fn write_trajectory_csv<W: Write>(traj: &ReductionTrajectory, mut w: W) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in &traj.steps {
        let eliminated = s.eliminated.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";");
        let elim_amp =
            s.eliminated_amplitude.iter().copied().fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a))));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.step,
            s.n,
            fmt_num(s.g),
            column(&s.lambdas, 0),
            column(&s.lambdas, 1),
            column(&s.lambdas, 2),
            column(&s.per_site, 0),
            column(&s.per_site, 1),
            column(&s.per_site, 2),
            column(&s.p, 0),
            column(&s.p, 1),
            column(&s.p, 2),
            fmt_num(s.entropy),
            eliminated,
            elim_amp.map(fmt_num).unwrap_or_default(),
            s.root_iterations,
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct TrajectorySummary<'a> {
    pub config: &'a LadderConfig,
    pub eigen_options: &'a EigenOptions,
    pub reduction_options: &'a ReductionOptions,
    pub dimension: usize,
    pub initial_g: f64,
    pub initial_spectrum: &'a [f64],
    pub initial_per_site: &'a [f64],
    pub initial_residuals: &'a [f64],
    pub initial_iterations: usize,
    pub stop_reason: StopReason,
    pub stop_detail: Option<&'a str>,
    pub steps: usize,
    pub final_n: usize,
    pub final_g: f64,
}

pub fn trajectory_summary(traj: &ReductionTrajectory) -> TrajectorySummary<'_> {
    let first = &traj.steps[0];
    let last = traj.steps.last().unwrap();
    TrajectorySummary {
        config: &traj.config,
        eigen_options: &traj.eigen_options,
        reduction_options: &traj.options,
        dimension: first.n,
        initial_g: traj.initial_g,
        initial_spectrum: &traj.initial.values,
        initial_per_site: &first.per_site,
        initial_residuals: &traj.initial.residuals,
        initial_iterations: traj.initial.iterations,
        stop_reason: traj.stop_reason,
        stop_detail: traj.stop_detail.as_deref(),
        steps: traj.steps.len() - 1,
        final_n: last.n,
        final_g: last.g,
    }
}

pub fn write_gap_curve_csv<W: Write>(curve: &[GapPoint], mut w: W) -> Result<()> {
    writeln!(w, "{GAP_CURVE_HEADER}")?;
    for p in curve {
        writeln!(w, "{},{},{},{}", fmt_num(p.param), fmt_num(p.lambda1), fmt_num(p.lambda2), fmt_num(p.gap))?;
    }
    Ok(())
}

pub fn write_crossing_json<W: Write>(report: &CrossingReport, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_significant_digits() {
        for v in [15.0, -11.25, 0.123456789012345, 48620.0, 3.3e-7, -67.4999999999, 1e20] {
            let s = fmt_num(v);
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= 1e-12 * v.abs(), "{v} -> {s}");
        }
        assert_eq!(fmt_num(15.0), "15.0000000000000");
        assert_eq!(fmt_num(0.0), "0.0");
    }
}
