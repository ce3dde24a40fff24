//! Hilbert-space reduction with coupling renormalization.
//!
//! Starting from the full sector, every step
//!
//! 1. orders the current basis states by descending |ground-state amplitude|,
//! 2. removes the smallest one (or a batch of them),
//! 3. re-solves g so the lowest eigenvalue of the restricted H0 + g H1 equals
//!    the full-space ground energy λ₁,
//! 4. re-diagonalizes at the new g and records energies and observables.
//!
//! λ₁ is held fixed for the whole run; excited levels are only observed.

use serde::{Deserialize, Serialize};

use crate::eigensolver::{lowest_k_guided, EigenOptions, EigenResult};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ladder, CouplingHamiltonian, LadderConfig};
use crate::observables::{energy_per_site, ObservableSet};
use crate::rootfind::{bracket_geometric, brent, Bracket};

/// How the renormalized coupling is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    /// Closed form g = λ₁/μ_min when H0 vanishes, bracketing otherwise.
    #[default]
    Auto,
    /// Always bracket and refine λ_min(g) − λ₁ = 0.
    Bracketing,
}

/// Which amplitudes decide the elimination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeOrdering {
    /// Re-rank by the current ground state before every step.
    #[default]
    Refresh,
    /// Rank once by the full-space ground state and follow that order.
    Initial,
}

/// Larger elimination batches while the space is still big.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseSchedule {
    /// Coarse steps are taken only while n > `above`; they never cross it.
    pub above: usize,
    /// Fraction of the current dimension removed per coarse step.
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionOptions {
    pub n_min: usize,
    /// Stop once p(1) exceeds this many percent.
    pub p_max: f64,
    pub batch: usize,
    pub coarse: Option<CoarseSchedule>,
    pub g_bracket_factor: f64,
    /// Pinning tolerance relative to |λ₁|.
    pub lambda_rtol: f64,
    pub max_expansions: usize,
    pub root_method: RootMethod,
    #[serde(default)]
    pub ordering: AmplitudeOrdering,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            n_min: 8,
            p_max: 5.0,
            batch: 1,
            coarse: None,
            g_bracket_factor: 2.0,
            lambda_rtol: 1e-10,
            max_expansions: 60,
            root_method: RootMethod::Auto,
            ordering: AmplitudeOrdering::Refresh,
        }
    }
}

impl ReductionOptions {
    pub fn validate(&self, eopts: &EigenOptions) -> Result<()> {
        if self.n_min < eopts.k + 2 {
            return Err(Error::InvalidConfig(format!(
                "n_min = {} must be at least k + 2 = {}",
                self.n_min,
                eopts.k + 2
            )));
        }
        if self.batch == 0 {
            return Err(Error::InvalidConfig("batch must be at least 1".into()));
        }
        if self.g_bracket_factor.is_nan() || self.g_bracket_factor <= 1.0 {
            return Err(Error::InvalidConfig("g_bracket_factor must exceed 1".into()));
        }
        if let Some(c) = self.coarse {
            if !(c.fraction > 0.0 && c.fraction < 1.0) {
                return Err(Error::InvalidConfig("coarse fraction must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    /// Number of states removed from a space of dimension `n`.
    pub fn batch_at(&self, n: usize) -> usize {
        let mut b = self.batch;
        let mut floor = self.n_min;
        if let Some(c) = self.coarse {
            if n > c.above {
                b = b.max((c.fraction * n as f64) as usize);
                floor = floor.max(c.above);
            }
        }
        b.min(n.saturating_sub(floor)).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedNMin,
    AccuracyExceeded,
    RootFailure,
    PositiveGround,
}

/// One record of the trajectory. Step 0 is the unreduced space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub step: usize,
    pub n: usize,
    pub g: f64,
    pub lambdas: Vec<f64>,
    /// λ / L for each tracked level.
    pub per_site: Vec<f64>,
    /// Accuracy loss p(i) in percent against the full-space values.
    pub p: Vec<f64>,
    pub entropy: f64,
    /// Original basis ordinals removed in this step.
    pub eliminated: Vec<usize>,
    /// |ground amplitude| of each removed state, before removal.
    pub eliminated_amplitude: Vec<f64>,
    pub root_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionTrajectory {
    pub config: LadderConfig,
    pub eigen_options: EigenOptions,
    pub options: ReductionOptions,
    pub initial: EigenResult,
    pub initial_g: f64,
    pub steps: Vec<ReductionStep>,
    pub stop_reason: StopReason,
    /// Error text when the run ended on a numerical failure.
    pub stop_detail: Option<String>,
}

impl ReductionTrajectory {
    pub fn lambda1(&self) -> f64 {
        self.initial.values[0]
    }

    /// Original ordinals still present after the last step.
    pub fn surviving_labels(&self) -> Vec<usize> {
        let n = self.steps[0].n;
        let mut alive = vec![true; n];
        for s in &self.steps {
            for &e in &s.eliminated {
                alive[e] = false;
            }
        }
        (0..n).filter(|&i| alive[i]).collect()
    }
}

/// Positions sorted by descending |amplitude|; ties keep the lower position first.
pub fn order_by_amplitude(ground: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ground.len()).collect();
    order.sort_by(|&a, &b| ground[b].abs().total_cmp(&ground[a].abs()).then(a.cmp(&b)));
    order
}

/// Coupling together with the spectrum it produces.
#[derive(Debug, Clone)]
pub struct Renormalized {
    pub g: f64,
    pub eigen: EigenResult,
    pub root_iterations: usize,
}

fn closed_form(
    ham: &CouplingHamiltonian,
    target: f64,
    eopts: &EigenOptions,
    guesses: &[Vec<f64>],
) -> Result<Renormalized> {
    let mu = lowest_k_guided(ham, 1.0, eopts, guesses)?;
    let mu_min = mu.values[0];
    let g = target / mu_min;
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::NoRoot { target, mu_min });
    }
    // eigenvectors of g h1 do not depend on g > 0
    let eigen = EigenResult {
        values: mu.values.iter().map(|m| g * m).collect(),
        residuals: mu.residuals.iter().map(|r| g * r).collect(),
        ..mu
    };
    Ok(Renormalized { g, eigen, root_iterations: 0 })
}

fn bracketing(
    ham: &CouplingHamiltonian,
    target: f64,
    g_prev: f64,
    ropts: &ReductionOptions,
    eopts: &EigenOptions,
    guesses: &[Vec<f64>],
) -> Result<Renormalized> {
    let single = EigenOptions { k: 1, ..*eopts };
    let guess = guesses.first().cloned().into_iter().collect::<Vec<_>>();
    let lambda_min = |g: f64| -> Result<f64> { Ok(lowest_k_guided(ham, g, &single, &guess)?.values[0] - target) };
    if ham.h0_is_zero() {
        // lowest eigenvalue of g h1 is g μ_min for g > 0: reachable only with matching sign
        let mu_min = lambda_min(1.0)? + target;
        if mu_min == 0.0 || mu_min.signum() != target.signum() {
            return Err(Error::NoRoot { target, mu_min });
        }
    }
    let center = if g_prev > 0.0 { g_prev } else { g_prev.abs().max(1.0) };
    let Bracket { interval, values, evaluations: bracket_evals } =
        bracket_geometric(lambda_min, center, ropts.g_bracket_factor, ropts.max_expansions)?;
    let ftol = 0.1 * ropts.lambda_rtol * target.abs();
    let root = brent(lambda_min, interval, values, 4.0 * f64::EPSILON * center, ftol, 200)?;
    let eigen = lowest_k_guided(ham, root.x, eopts, guesses)?;
    Ok(Renormalized { g: root.x, eigen, root_iterations: bracket_evals + root.evaluations })
}

/// Coupling and spectrum with λ_min(h0 + g h1) pinned at `lambda_target`.
pub fn renormalize_with_spectrum(
    ham: &CouplingHamiltonian,
    lambda_target: f64,
    g_prev: f64,
    ropts: &ReductionOptions,
    eopts: &EigenOptions,
    guesses: &[Vec<f64>],
) -> Result<Renormalized> {
    let k = eopts.k.min(ham.dim());
    let eopts = EigenOptions { k, ..*eopts };
    let out = match ropts.root_method {
        RootMethod::Auto if ham.h0_is_zero() => closed_form(ham, lambda_target, &eopts, guesses)?,
        _ => bracketing(ham, lambda_target, g_prev, ropts, &eopts, guesses)?,
    };
    let miss = (out.eigen.values[0] - lambda_target).abs();
    if miss > ropts.lambda_rtol * lambda_target.abs() {
        return Err(Error::NoRoot { target: lambda_target, mu_min: out.eigen.values[0] / out.g });
    }
    Ok(out)
}

/// Coupling g with λ_min(h0 + g h1) = `lambda_target`.
pub fn renormalize_coupling(
    ham: &CouplingHamiltonian,
    lambda_target: f64,
    g_prev: f64,
    ropts: &ReductionOptions,
    eopts: &EigenOptions,
) -> Result<f64> {
    let one = EigenOptions { k: 1, ..*eopts };
    Ok(renormalize_with_spectrum(ham, lambda_target, g_prev, ropts, &one, &[])?.g)
}

/// Space, coupling and spectrum between two steps.
#[derive(Debug, Clone)]
pub struct ReductionState {
    pub ham: CouplingHamiltonian,
    pub g: f64,
    pub eigen: EigenResult,
}

/// Fixed inputs of a reduction run.
#[derive(Debug, Clone)]
pub struct Reducer {
    pub lambda1: f64,
    /// Full-space per-site energies used as the p(i) reference.
    pub reference: Vec<f64>,
    pub sites_per_leg: usize,
    pub options: ReductionOptions,
    pub eigen_options: EigenOptions,
    /// |full-space ground amplitude| by original ordinal; used for
    /// [`AmplitudeOrdering::Initial`], ignored when `None`.
    pub ranking: Option<Vec<f64>>,
}

impl Reducer {
    pub fn record(&self, step: usize, state: &ReductionState, root_iterations: usize) -> Result<ReductionStep> {
        let per_site: Vec<f64> = state.eigen.values.iter().map(|&l| energy_per_site(l, self.sites_per_leg)).collect();
        let obs = ObservableSet::compute(&self.reference, &per_site, state.eigen.ground(), self.sites_per_leg)?;
        Ok(ReductionStep {
            step,
            n: state.ham.dim(),
            g: state.g,
            lambdas: state.eigen.values.clone(),
            per_site,
            p: obs.p,
            entropy: obs.entropy,
            eliminated: Vec::new(),
            eliminated_amplitude: Vec::new(),
            root_iterations,
        })
    }

    /// Removes the `batch` smallest-amplitude states and renormalizes.
    pub fn step(&self, state: &ReductionState, step: usize, batch: usize) -> Result<(ReductionState, ReductionStep)> {
        let n = state.ham.dim();
        if batch == 0 || batch >= n {
            return Err(Error::InvalidConfig(format!("cannot remove {batch} of {n} states")));
        }
        let ranked: Vec<f64> = match &self.ranking {
            Some(full) => state.ham.labels().iter().map(|&l| full[l]).collect(),
            None => state.eigen.ground().to_vec(),
        };
        let order = order_by_amplitude(&ranked);
        let (kept, dropped) = order.split_at(n - batch);
        let mut keep = kept.to_vec();
        keep.sort_unstable();
        let eliminated: Vec<usize> = dropped.iter().map(|&p| state.ham.labels()[p]).collect();
        let eliminated_amplitude: Vec<f64> = dropped.iter().map(|&p| ranked[p].abs()).collect();

        let ham = state.ham.restrict(&keep)?;
        let guesses: Vec<Vec<f64>> = state.eigen.vectors.iter().map(|v| keep.iter().map(|&p| v[p]).collect()).collect();
        let ren = renormalize_with_spectrum(&ham, self.lambda1, state.g, &self.options, &self.eigen_options, &guesses)?;
        let next = ReductionState { ham, g: ren.g, eigen: ren.eigen };
        let mut rec = self.record(step, &next, ren.root_iterations)?;
        rec.eliminated = eliminated;
        rec.eliminated_amplitude = eliminated_amplitude;
        Ok((next, rec))
    }
}

/// One elimination step from `state` (ordered by its own ground state), pinned at the full-space ground energy `lambda1`.
pub fn reduce_step(
    state: &ReductionState,
    lambda1: f64,
    reference: &[f64],
    sites_per_leg: usize,
    ropts: &ReductionOptions,
    eopts: &EigenOptions,
) -> Result<(ReductionState, ReductionStep)> {
    let reducer = Reducer {
        lambda1,
        reference: reference.to_vec(),
        sites_per_leg,
        options: *ropts,
        eigen_options: *eopts,
        ranking: None,
    };
    reducer.step(state, 1, ropts.batch_at(state.ham.dim()))
}

/// Reduction of an arbitrary H0 + g H1 starting at coupling `g0`.
///
/// Returns the trajectory pieces: initial solve, steps and stop reason.
pub fn run_reduction_on(
    ham: CouplingHamiltonian,
    g0: f64,
    sites_per_leg: usize,
    eopts: &EigenOptions,
    ropts: &ReductionOptions,
) -> Result<(EigenResult, Vec<ReductionStep>, StopReason, Option<String>)> {
    ropts.validate(eopts)?;
    let initial = lowest_k_guided(&ham, g0, eopts, &[])?;
    let lambda1 = initial.values[0];
    let reference: Vec<f64> = initial.values.iter().map(|&l| energy_per_site(l, sites_per_leg)).collect();
    let ranking = match ropts.ordering {
        AmplitudeOrdering::Refresh => None,
        AmplitudeOrdering::Initial => {
            let labels = ham.labels();
            let mut full = vec![0.0; labels.iter().max().map_or(0, |m| m + 1)];
            for (&l, &a) in labels.iter().zip(initial.ground()) {
                full[l] = a.abs();
            }
            Some(full)
        }
    };
    let reducer = Reducer { lambda1, reference, sites_per_leg, options: *ropts, eigen_options: *eopts, ranking };
    let mut state = ReductionState { ham, g: g0, eigen: initial.clone() };
    let mut steps = vec![reducer.record(0, &state, 0)?];

    if lambda1 >= 0.0 {
        return Ok((initial, steps, StopReason::PositiveGround, None));
    }
    let mut stop = StopReason::ReachedNMin;
    let mut detail = None;
    while state.ham.dim() > ropts.n_min {
        let batch = ropts.batch_at(state.ham.dim());
        match reducer.step(&state, steps.len(), batch) {
            Ok((next, rec)) => {
                let exceeded = rec.p[0] > ropts.p_max;
                steps.push(rec);
                state = next;
                if exceeded {
                    stop = StopReason::AccuracyExceeded;
                    break;
                }
            }
            Err(e) => {
                stop = StopReason::RootFailure;
                detail = Some(e.to_string());
                break;
            }
        }
    }
    Ok((initial, steps, stop, detail))
}

/// Builds the ladder and reduces it from g = J_t.
pub fn run_reduction(
    cfg: &LadderConfig,
    eopts: &EigenOptions,
    ropts: &ReductionOptions,
) -> Result<ReductionTrajectory> {
    let (_, ham) = build_ladder(cfg)?;
    if ham.dim() <= ropts.n_min {
        return Err(Error::InvalidConfig(format!(
            "sector dimension {} does not exceed n_min = {}",
            ham.dim(),
            ropts.n_min
        )));
    }
    let (initial, steps, stop_reason, stop_detail) = run_reduction_on(ham, cfg.j_t, cfg.sites_per_leg, eopts, ropts)?;
    Ok(ReductionTrajectory {
        config: *cfg,
        eigen_options: *eopts,
        options: *ropts,
        initial,
        initial_g: cfg.j_t,
        steps,
        stop_reason,
        stop_detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_examples() {
        assert_eq!(order_by_amplitude(&[0.9, 0.1, 0.42]), vec![0, 2, 1]);
        assert_eq!(order_by_amplitude(&[0.5, -0.5, 0.5, -0.5]), vec![0, 1, 2, 3]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(order_by_amplitude(&[s, -s]), vec![0, 1]);
    }

    #[test]
    fn single_rung_renormalizes_to_three_jt() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 0.0, 0.0)).unwrap();
        let one = h.restrict(&[0]).unwrap();
        let eopts = EigenOptions::default().with_k(1);
        let ropts = ReductionOptions::default();
        let g = renormalize_coupling(&one, -11.25, 15.0, &ropts, &eopts).unwrap();
        assert!((g - 45.0).abs() < 1e-12);
        let bracketed = ReductionOptions { root_method: RootMethod::Bracketing, ..ropts };
        let g2 = renormalize_coupling(&one, -11.25, 15.0, &bracketed, &eopts).unwrap();
        assert!((g2 - 45.0).abs() < 1e-9 * 45.0);
    }

    #[test]
    fn single_rung_step() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 0.0, 0.0)).unwrap();
        let eopts = EigenOptions::default().with_k(1);
        let eigen = lowest_k_guided(&h, 15.0, &eopts, &[]).unwrap();
        let lambda1 = eigen.values[0];
        let state = ReductionState { ham: h, g: 15.0, eigen };
        let ropts = ReductionOptions { n_min: 1, ..ReductionOptions::default() };
        let (next, rec) = reduce_step(&state, lambda1, &[lambda1], 1, &ropts, &eopts).unwrap();
        assert_eq!(rec.n, 1);
        assert!((rec.g - 45.0).abs() < 1e-12);
        assert!((rec.lambdas[0] + 11.25).abs() < 1e-12);
        let removed = rec.eliminated[0];
        assert_eq!(next.ham.labels(), &[1 - removed]);
        assert!(rec.eliminated_amplitude[0] <= state.eigen.ground()[1 - removed].abs());
        assert_eq!(rec.entropy, 0.0);
    }

    #[test]
    fn unreachable_target() {
        let h = CouplingHamiltonian::new(
            crate::sparse::SymmetricCsr::zeros(2),
            crate::sparse::SymmetricCsr::from_dense(2, &[1.0, 0.0, 0.0, 2.0]),
        )
        .unwrap();
        let eopts = EigenOptions::default().with_k(1);
        for method in [RootMethod::Auto, RootMethod::Bracketing] {
            let ropts = ReductionOptions { root_method: method, ..ReductionOptions::default() };
            assert!(matches!(renormalize_coupling(&h, -1.0, 1.0, &ropts, &eopts), Err(Error::NoRoot { .. })));
        }
    }

    #[test]
    fn batch_schedule() {
        let r = ReductionOptions {
            n_min: 8,
            coarse: Some(CoarseSchedule { above: 2000, fraction: 0.05 }),
            ..ReductionOptions::default()
        };
        assert_eq!(r.batch_at(48620), 2431);
        assert_eq!(r.batch_at(2050), 50);
        assert_eq!(r.batch_at(2000), 1);
        assert_eq!(r.batch_at(9), 1);
        let big = ReductionOptions { batch: 100, ..ReductionOptions::default() };
        assert_eq!(big.batch_at(50), 42);
    }

    #[test]
    fn options_validation() {
        let e = EigenOptions::default();
        assert!(ReductionOptions { n_min: 4, ..Default::default() }.validate(&e).is_err());
        assert!(ReductionOptions { batch: 0, ..Default::default() }.validate(&e).is_err());
        assert!(ReductionOptions::default().validate(&e).is_ok());
    }
}
