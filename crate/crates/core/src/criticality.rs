//! Level crossings in coupling space and the fixed-point check of the
//! reduction flow.
//!
//! Degeneracies of the two lowest levels are located on the real axis as
//! minima of λ₂ − λ₁ along a one-parameter path of ladder couplings. At such
//! a point the renormalized coupling should stay put while states are
//! removed, which [`fixed_point_drift`] measures on a trajectory.

use serde::{Deserialize, Serialize};

use crate::eigensolver::{lowest_k, EigenOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ladder, CouplingHamiltonian, LadderConfig};
use crate::reduction::{ReductionStep, ReductionTrajectory};

/// Gap below which (relative to |λ₁|) two levels count as crossing.
pub const CROSSING_RTOL: f64 = 1e-6;

/// Default relative parameter tolerance of the refinement.
pub const DEFAULT_PARAM_RTOL: f64 = 1e-9;

const INVGOLD: f64 = 0.618_033_988_749_894_9;

/// Which couplings move during a scan (J_t stays fixed unless scanned itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScanPath {
    /// J_l = J_c = parameter.
    #[default]
    LegEqualsDiagonal,
    Leg,
    Diagonal,
    Rung,
}

impl ScanPath {
    pub fn apply(self, template: &LadderConfig, value: f64) -> LadderConfig {
        let mut cfg = *template;
        match self {
            ScanPath::LegEqualsDiagonal => {
                cfg.j_l = value;
                cfg.j_c = value;
            }
            ScanPath::Leg => cfg.j_l = value,
            ScanPath::Diagonal => cfg.j_c = value,
            ScanPath::Rung => cfg.j_t = value,
        }
        cfg
    }

    pub fn describe(self) -> &'static str {
        match self {
            ScanPath::LegEqualsDiagonal => "J_l = J_c varied, J_t fixed",
            ScanPath::Leg => "J_l varied, J_t and J_c fixed",
            ScanPath::Diagonal => "J_c varied, J_t and J_l fixed",
            ScanPath::Rung => "J_t varied, J_l and J_c fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub path: ScanPath,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub param: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub parameter_path: String,
    /// Crossing location in the scanned parameter.
    pub g_e: f64,
    pub min_gap: f64,
    pub bracket: (f64, f64),
    /// J_t / J_l at the crossing.
    pub ratio: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// True when min_gap < CROSSING_RTOL · |λ₁|.
    pub is_crossing: bool,
    pub evaluations: usize,
    /// The coarse scan, in scan order.
    #[serde(skip)]
    pub curve: Vec<GapPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCheck {
    /// max over steps with n ≥ n_floor of |g⁽ⁿ⁾ − g⁽ᴺ⁾| / g⁽ᴺ⁾
    pub drift: f64,
    pub n_floor: usize,
    /// Dimension at which the largest deviation occurs.
    pub worst_n: usize,
}

/// λ₂ − λ₁ of h0 + g h1 (clamped at zero).
pub fn degeneracy_gap(ham: &CouplingHamiltonian, g: f64, eopts: &EigenOptions) -> Result<f64> {
    let opts = EigenOptions { k: eopts.k.max(2), ..*eopts };
    let res = lowest_k(ham, g, &opts)?;
    Ok((res.values[1] - res.values[0]).max(0.0))
}

/// Two lowest levels of the ladder at its own J_t.
pub fn ladder_gap(cfg: &LadderConfig, eopts: &EigenOptions) -> Result<GapPoint> {
    let (_, ham) = build_ladder(cfg)?;
    let opts = EigenOptions { k: eopts.k.max(2), ..*eopts };
    let res = lowest_k(&ham, cfg.j_t, &opts)?;
    let (l1, l2) = (res.values[0], res.values[1]);
    Ok(GapPoint { param: f64::NAN, lambda1: l1, lambda2: l2, gap: (l2 - l1).max(0.0) })
}

/// Gap curve on an evenly spaced grid.
pub fn gap_curve(template: &LadderConfig, scan: &ScanRange, eopts: &EigenOptions) -> Result<Vec<GapPoint>> {
    if scan.points < 2 || !(scan.from.is_finite() && scan.to.is_finite()) || scan.from == scan.to {
        return Err(Error::InvalidConfig("scan needs two distinct finite endpoints and at least 2 points".into()));
    }
    let step = (scan.to - scan.from) / (scan.points - 1) as f64;
    (0..scan.points)
        .map(|i| {
            let param = if i + 1 == scan.points { scan.to } else { scan.from + i as f64 * step };
            let mut p = ladder_gap(&scan.path.apply(template, param), eopts)?;
            p.param = param;
            Ok(p)
        })
        .collect()
}

/// Scans the gap along `scan`, then refines its minimum by golden-section search
/// to `param_rtol`.
pub fn scan_crossing_with(
    template: &LadderConfig,
    scan: &ScanRange,
    eopts: &EigenOptions,
    param_rtol: f64,
) -> Result<CrossingReport> {
    let curve = gap_curve(template, scan, eopts)?;
    let mut evaluations = curve.len();
    let (imin, best) = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap).then(a.0.cmp(&b.0)))
        .map(|(i, p)| (i, *p))
        .unwrap();
    let last = curve.len() - 1;
    let threshold = CROSSING_RTOL * best.lambda1.abs();
    let noise = 1e-8 * best.lambda1.abs().max(1.0);
    let edge_gap = curve[0].gap.min(curve[last].gap);
    let interior = imin > 0 && imin < last && best.gap < edge_gap - noise;

    let report = |pt: GapPoint, bracket: (f64, f64), evaluations: usize, curve: Vec<GapPoint>| {
        let cfg = scan.path.apply(template, pt.param);
        CrossingReport {
            parameter_path: scan.path.describe().to_string(),
            g_e: pt.param,
            min_gap: pt.gap,
            bracket,
            ratio: cfg.j_t / cfg.j_l,
            lambda1: pt.lambda1,
            lambda2: pt.lambda2,
            is_crossing: pt.gap < CROSSING_RTOL * pt.lambda1.abs(),
            evaluations,
            curve,
        }
    };

    if !interior {
        if best.gap < threshold {
            return Ok(report(best, (best.param, best.param), evaluations, curve));
        }
        return Err(Error::NoCrossing { min_gap: best.gap });
    }

    let eval = |param: f64| -> Result<GapPoint> {
        let mut p = ladder_gap(&scan.path.apply(template, param), eopts)?;
        p.param = param;
        Ok(p)
    };
    let (mut a, mut b) = (curve[imin - 1], curve[imin + 1]);
    if a.param > b.param {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = eval(b.param - INVGOLD * (b.param - a.param))?;
    let mut d = eval(a.param + INVGOLD * (b.param - a.param))?;
    evaluations += 2;
    for _ in 0..200 {
        let width = b.param - a.param;
        if width <= param_rtol * a.param.abs().max(b.param.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if c.gap <= d.gap {
            b = d;
            d = c;
            c = eval(b.param - INVGOLD * (b.param - a.param))?;
        } else {
            a = c;
            c = d;
            d = eval(a.param + INVGOLD * (b.param - a.param))?;
        }
        evaluations += 1;
        if c.gap == 0.0 || d.gap == 0.0 {
            break;
        }
    }
    let pt = if c.gap <= d.gap { c } else { d };
    Ok(report(pt, (a.param, b.param), evaluations, curve))
}

/// [`scan_crossing_with`] at the default parameter tolerance.
pub fn scan_crossing(template: &LadderConfig, scan: &ScanRange, eopts: &EigenOptions) -> Result<CrossingReport> {
    scan_crossing_with(template, scan, eopts, DEFAULT_PARAM_RTOL)
}

/// Largest relative departure of g from its unreduced value over steps with n ≥ n_floor.
pub fn fixed_point_drift_steps(steps: &[ReductionStep], n_floor: usize) -> Result<FixedPointCheck> {
    let g_full = steps.first().ok_or(Error::EmptyWindow(n_floor))?.g;
    let mut window = steps.iter().filter(|s| s.n >= n_floor).peekable();
    if window.peek().is_none() {
        return Err(Error::EmptyWindow(n_floor));
    }
    let (drift, worst_n) = window
        .map(|s| ((s.g - g_full).abs() / g_full.abs(), s.n))
        .fold((0.0f64, steps[0].n), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(FixedPointCheck { drift, n_floor, worst_n })
}

pub fn fixed_point_drift(traj: &ReductionTrajectory, n_floor: usize) -> Result<FixedPointCheck> {
    fixed_point_drift_steps(&traj.steps, n_floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: usize, g: f64) -> ReductionStep {
        ReductionStep {
            step: 0,
            n,
            g,
            lambdas: vec![],
            per_site: vec![],
            p: vec![],
            entropy: 0.0,
            eliminated: vec![],
            eliminated_amplitude: vec![],
            root_iterations: 0,
        }
    }

    #[test]
    fn constant_coupling_has_no_drift() {
        let steps: Vec<_> = (0..10).map(|i| step(100 - i, 15.0)).collect();
        let fp = fixed_point_drift_steps(&steps, 90).unwrap();
        assert_eq!(fp.drift, 0.0);
    }

    #[test]
    fn drift_respects_the_window() {
        let steps = vec![step(10, 2.0), step(9, 2.1), step(8, 3.0)];
        let fp = fixed_point_drift_steps(&steps, 9).unwrap();
        assert!((fp.drift - 0.05).abs() < 1e-12);
        assert_eq!(fp.worst_n, 9);
        assert!(matches!(fixed_point_drift_steps(&steps, 11), Err(Error::EmptyWindow(11))));
        assert!(matches!(fixed_point_drift_steps(&[], 1), Err(Error::EmptyWindow(1))));
    }

    #[test]
    fn single_rung_gap_is_g() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 1.0, 0.0, 0.0)).unwrap();
        let opts = EigenOptions::default().with_k(2);
        for g in [0.5, 3.0, 15.0] {
            assert!((degeneracy_gap(&h, g, &opts).unwrap() - g).abs() < 1e-12);
        }
        assert_eq!(degeneracy_gap(&h, 0.0, &opts).unwrap(), 0.0);
    }

    #[test]
    fn bad_scan_ranges() {
        let cfg = LadderConfig::new(2, 1.0, 0.5, 0.5);
        let e = EigenOptions::default();
        let one_point = ScanRange { path: ScanPath::Leg, from: 0.0, to: 1.0, points: 1 };
        assert!(gap_curve(&cfg, &one_point, &e).is_err());
        let empty = ScanRange { path: ScanPath::Leg, from: 1.0, to: 1.0, points: 5 };
        assert!(gap_curve(&cfg, &empty, &e).is_err());
    }
}
