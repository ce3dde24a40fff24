//! Experiment driver behind the `hsred` binary.
//!
//! Configuration is a flat TOML file; every key is optional except the
//! ladder couplings:
//!
//! ```toml
//! L = 6
//! J_t = 15.0
//! J_l = 5.0
//! J_c = 3.0
//! M_tot = 0
//! boundary = "open"      # or "periodic"
//! k = 3
//! tol = 1e-10
//! max_iter = 500
//! seed = 1
//! n_min = 8
//! p_max = 5.0
//! batch = 1
//! coarse_above = 2000    # optional coarse elimination above this dimension
//! coarse_fraction = 0.05
//! root_method = "auto"   # or "bracketing"
//! ordering = "refresh"   # or "initial"
//! dump_matrix = false
//! scan.path = "leg_equals_diagonal"
//! scan.from = 10.0
//! scan.to = 14.0
//! scan.points = 41
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::HalfInt;
use crate::criticality::{scan_crossing, ScanPath, ScanRange};
use crate::eigensolver::{dense_spectrum, lowest_k, EigenOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ladder, Boundary, LadderConfig};
use crate::observables::energy_per_site;
use crate::output::{fmt_num, trajectory_summary, write_crossing_json, write_gap_curve_csv, write_trajectory_csv};
use crate::reduction::{run_reduction, AmplitudeOrdering, CoarseSchedule, ReductionOptions, RootMethod};

/// Largest deviation tolerated by `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Reduce,
    Scan,
    OracleCheck,
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectrum" => Ok(Command::Spectrum),
            "reduce" => Ok(Command::Reduce),
            "scan" => Ok(Command::Scan),
            "oracle-check" => Ok(Command::OracleCheck),
            other => Err(Error::Config(format!("unknown command '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub path: ScanPath,
    pub from: f64,
    pub to: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    41
}

/// Fully resolved run configuration (what `config.toml` echoes back).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub sites_per_leg: usize,
    #[serde(rename = "J_t")]
    pub j_t: f64,
    #[serde(rename = "J_l")]
    pub j_l: f64,
    #[serde(rename = "J_c")]
    pub j_c: f64,
    #[serde(rename = "M_tot", default)]
    pub m_tot: HalfInt,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default = "defaults::k")]
    pub k: usize,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::n_min")]
    pub n_min: usize,
    #[serde(default = "defaults::p_max")]
    pub p_max: f64,
    #[serde(default = "defaults::batch")]
    pub batch: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_above: Option<usize>,
    #[serde(default = "defaults::coarse_fraction")]
    pub coarse_fraction: f64,
    #[serde(default)]
    pub root_method: RootMethod,
    #[serde(default)]
    pub ordering: AmplitudeOrdering,
    #[serde(default)]
    pub dump_matrix: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

mod defaults {
    use super::*;

    pub fn k() -> usize {
        EigenOptions::default().k
    }
    pub fn tol() -> f64 {
        EigenOptions::default().tol
    }
    pub fn max_iter() -> usize {
        500
    }
    pub fn seed() -> u64 {
        EigenOptions::default().seed
    }
    pub fn n_min() -> usize {
        ReductionOptions::default().n_min
    }
    pub fn p_max() -> f64 {
        ReductionOptions::default().p_max
    }
    pub fn batch() -> usize {
        1
    }
    pub fn coarse_fraction() -> f64 {
        0.05
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn ladder(&self) -> LadderConfig {
        LadderConfig::new(self.sites_per_leg, self.j_t, self.j_l, self.j_c)
            .with_boundary(self.boundary)
            .with_m_tot(self.m_tot)
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions { k: self.k, tol: self.tol, max_iter: Some(self.max_iter), seed: self.seed }
    }

    pub fn reduction_options(&self) -> ReductionOptions {
        ReductionOptions {
            n_min: self.n_min,
            p_max: self.p_max,
            batch: self.batch,
            coarse: self.coarse_above.map(|above| CoarseSchedule { above, fraction: self.coarse_fraction }),
            root_method: self.root_method,
            ordering: self.ordering,
            ..ReductionOptions::default()
        }
    }

    pub fn scan_range(&self) -> Result<ScanRange> {
        let s = self.scan.ok_or_else(|| Error::Config("scan requires scan.from and scan.to".into()))?;
        Ok(ScanRange { path: s.path, from: s.from, to: s.to, points: s.points })
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub echo: RunConfig,
}

impl RunManifest {
    /// Reads and resolves the config; `seed` overrides the file's value.
    pub fn load(command: Command, config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<Self> {
        let text =
            fs::read_to_string(config_path).map_err(|e| Error::Config(format!("{}: {e}", config_path.display())))?;
        let mut echo = RunConfig::parse(&text)?;
        if let Some(seed) = seed {
            echo.seed = seed;
        }
        Ok(RunManifest { command, config_path: config_path.to_path_buf(), out_dir: out_dir.to_path_buf(), echo })
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Runs one command and writes its artifacts; returns the list of files written.
pub fn execute(manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let out = &manifest.out_dir;
    fs::create_dir_all(out)?;
    let cfg = &manifest.echo;
    fs::write(out.join("config.toml"), cfg.to_toml())?;
    let mut written = vec![out.join("config.toml")];
    match manifest.command {
        Command::Spectrum => spectrum(cfg, out, &mut written)?,
        Command::Reduce => reduce(cfg, out, &mut written)?,
        Command::Scan => scan(cfg, out, &mut written)?,
        Command::OracleCheck => oracle_check(cfg, out, &mut written)?,
    }
    Ok(written)
}

fn spectrum(cfg: &RunConfig, out: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let ladder = cfg.ladder();
    let (basis, ham) = build_ladder(&ladder)?;
    let eopts = EigenOptions { k: cfg.k.min(ham.dim()), ..cfg.eigen_options() };
    let res = lowest_k(&ham, ladder.j_t, &eopts)?;
    let dense = if ham.dim() <= 4096 { Some(dense_spectrum(&ham, ladder.j_t)?) } else { None };

    let mut w = create(out, "spectrum.csv")?;
    writeln!(w, "level,lambda,e,residual,lambda_dense")?;
    for (i, (&l, &r)) in res.values.iter().zip(&res.residuals).enumerate() {
        let d = dense.as_ref().map(|d| fmt_num(d[i])).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            i + 1,
            fmt_num(l),
            fmt_num(energy_per_site(l, ladder.sites_per_leg)),
            fmt_num(r),
            d
        )?;
    }
    w.flush()?;
    written.push(out.join("spectrum.csv"));

    let summary = serde_json::json!({
        "config": ladder,
        "dimension": basis.dim(),
        "lambdas": res.values,
        "per_site": res.values.iter().map(|&l| energy_per_site(l, ladder.sites_per_leg)).collect::<Vec<_>>(),
        "residuals": res.residuals,
        "iterations": res.iterations,
        "degenerate": res.degenerate,
    });
    serde_json::to_writer_pretty(create(out, "spectrum.json")?, &summary)?;
    written.push(out.join("spectrum.json"));

    if cfg.dump_matrix {
        let mut w = create(out, "h1.coo")?;
        ham.h1().write_coordinate(&mut w)?;
        w.flush()?;
        written.push(out.join("h1.coo"));
    }
    Ok(())
}

fn reduce(cfg: &RunConfig, out: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let traj = run_reduction(&cfg.ladder(), &cfg.eigen_options(), &cfg.reduction_options())?;
    let mut w = create(out, "trajectory.csv")?;
    write_trajectory_csv(&traj, &mut w)?;
    w.flush()?;
    written.push(out.join("trajectory.csv"));
    serde_json::to_writer_pretty(create(out, "summary.json")?, &trajectory_summary(&traj))?;
    written.push(out.join("summary.json"));
    Ok(())
}

fn scan(cfg: &RunConfig, out: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let range = cfg.scan_range()?;
    let eopts = EigenOptions { k: cfg.k.max(2), ..cfg.eigen_options() };
    let report = scan_crossing(&cfg.ladder(), &range, &eopts)?;
    let mut w = create(out, "gap_curve.csv")?;
    write_gap_curve_csv(&report.curve, &mut w)?;
    w.flush()?;
    written.push(out.join("gap_curve.csv"));
    write_crossing_json(&report, create(out, "crossing.json")?)?;
    written.push(out.join("crossing.json"));
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleRow {
    sites_per_leg: usize,
    m_tot: HalfInt,
    dim: usize,
    max_deviation: f64,
}

/// Dense-vs-Lanczos deviations over every sector with L ≤ 3.
pub fn oracle_deviations(cfg: &RunConfig) -> Result<Vec<(usize, HalfInt, usize, f64)>> {
    let mut rows = Vec::new();
    for l in 1..=3usize {
        for m in -(l as i64)..=(l as i64) {
            let ladder = LadderConfig::new(l, cfg.j_t, cfg.j_l, cfg.j_c).with_m_tot(HalfInt::from_int(m));
            let ladder = if l < 3 { ladder } else { ladder.with_boundary(cfg.boundary) };
            let (_, ham) = build_ladder(&ladder)?;
            let eopts = EigenOptions { k: cfg.k.min(ham.dim()), ..cfg.eigen_options() };
            let lz = lowest_k(&ham, ladder.j_t, &eopts)?;
            let dense = dense_spectrum(&ham, ladder.j_t)?;
            let dev = lz.values.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rows.push((l, HalfInt::from_int(m), ham.dim(), dev));
        }
    }
    Ok(rows)
}

fn oracle_check(cfg: &RunConfig, out: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let rows = oracle_deviations(cfg)?;
    let max_dev = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let sectors: Vec<OracleRow> = rows
        .into_iter()
        .map(|(sites_per_leg, m_tot, dim, max_deviation)| OracleRow { sites_per_leg, m_tot, dim, max_deviation })
        .collect();
    let report = serde_json::json!({
        "max_deviation": max_dev,
        "tolerance": ORACLE_TOL,
        "pass": max_dev < ORACLE_TOL,
        "sectors": sectors,
    });
    serde_json::to_writer_pretty(create(out, "oracle_check.json")?, &report)?;
    written.push(out.join("oracle_check.json"));
    if max_dev >= ORACLE_TOL {
        return Err(Error::NoConvergence { iterations: 0, residuals: vec![max_dev] });
    }
    Ok(())
}

/// Machine-readable error body written on failure.
pub fn error_json(err: &Error) -> serde_json::Value {
    serde_json::json!({ "error": err.kind(), "message": err.to_string() })
}
