//! Lowest eigenpairs of H0 + g H1.
//!
//! Each eigenpair is obtained by a separate Lanczos run with full
//! reorthogonalization, started from a seeded random vector (optionally mixed
//! with a guess) and deflated against every pair already converged. A single
//! Krylov sequence cannot see more than one vector of a degenerate eigenspace,
//! so deflating and restarting is what resolves the two members of a level
//! crossing. A dense solver is kept alongside as an oracle for small spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::CouplingHamiltonian;
use crate::tridiag;

/// Relative gap below which the two lowest levels are reported as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-8;

/// Deflated runs accept residuals up to this multiple of the worst locked residual.
const LOCKED_RESIDUAL_FACTOR: f64 = 4.0;

/// Largest dimension accepted by [`dense_spectrum`].
pub const DENSE_MAX_DIM: usize = 4096;

/// Weight of the random component mixed into a user-supplied start vector.
const GUESS_NOISE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub k: usize,
    pub tol: f64,
    /// Krylov dimension cap per run; `None` means min(dim, 500).
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { k: 3, tol: 1e-10, max_iter: None, seed: 0x5eed_1a7c }
    }
}

impl EigenOptions {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn krylov_cap(&self, dim: usize) -> usize {
        self.max_iter.unwrap_or(500).min(dim).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unit eigenvectors matching `values`; the largest-magnitude component of each is positive.
    pub vectors: Vec<Vec<f64>>,
    /// ‖(h0 + g h1) v − λ v‖₂ per pair.
    pub residuals: Vec<f64>,
    /// Total Lanczos iterations over all runs.
    pub iterations: usize,
    /// Set when |λ₂ − λ₁| ≤ DEGENERACY_RTOL · |λ₁|.
    pub degenerate: bool,
}

impl EigenResult {
    /// Ground-state amplitudes.
    pub fn ground(&self) -> &[f64] {
        &self.vectors[0]
    }
}

/// Symmetric linear map that can be applied to a vector.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// H0 + g H1 at fixed g.
pub struct AtCoupling<'a> {
    pub ham: &'a CouplingHamiltonian,
    pub g: f64,
}

impl SymmetricOperator for AtCoupling<'_> {
    fn dim(&self) -> usize {
        self.ham.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.ham.apply_into(self.g, x, y);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Classical Gram-Schmidt against `against`, repeated once if the norm drops sharply.
fn orthogonalize<'a>(w: &mut [f64], against: impl Iterator<Item = &'a Vec<f64>> + Clone) -> f64 {
    let before = norm(w);
    for u in against.clone() {
        let c = dot(u, w);
        axpy(-c, u, w);
    }
    let mut after = norm(w);
    if after < std::f64::consts::FRAC_1_SQRT_2 * before {
        for u in against {
            let c = dot(u, w);
            axpy(-c, u, w);
        }
        after = norm(w);
    }
    after
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

fn residual_norm<O: SymmetricOperator>(op: &O, x: &[f64], theta: f64, scratch: &mut [f64]) -> f64 {
    op.apply(x, scratch);
    scratch.iter().zip(x).map(|(ax, xi)| (ax - theta * xi).powi(2)).sum::<f64>().sqrt()
}

struct Run {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
    next_ritz: Option<Vec<f64>>,
}

/// Lowest eigenpair of `op` on the orthogonal complement of `locked`.
///
/// `floor` is the smallest residual worth demanding: deflation against
/// inexact locked vectors leaves errors of their own residual size.
fn lowest_deflated<O: SymmetricOperator>(
    op: &O,
    locked: &[Vec<f64>],
    start: Vec<f64>,
    tol: f64,
    floor: f64,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Run> {
    let n = op.dim();
    let steps = cap.min(n - locked.len()).max(1);
    let mut krylov: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut anorm = 0.0f64;
    let mut best = f64::INFINITY;

    let mut v = start;
    for j in 0..steps {
        krylov.push(std::mem::take(&mut v));
        op.apply(&krylov[j], &mut w);
        let a = dot(&w, &krylov[j]);
        alpha.push(a);
        axpy(-a, &krylov[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &krylov[j - 1], &mut w);
        }
        let b = orthogonalize(&mut w, locked.iter().chain(krylov.iter()));
        anorm = anorm.max(a.abs() + b + if j > 0 { beta[j - 1] } else { 0.0 });
        let breakdown = b <= 1e-12 * anorm.max(f64::MIN_POSITIVE);
        let last = j + 1 == steps;

        let off = &beta[..j];
        let theta = tridiag::eigenvalue(&alpha, off, 0);
        let s = tridiag::eigenvector(&alpha, off, theta);
        let estimate = b * s[j].abs();
        let threshold = (tol * theta.abs().max(1.0)).max(floor);
        if estimate <= threshold || breakdown || last {
            let mut x = vec![0.0; n];
            for (coef, q) in s.iter().zip(&krylov) {
                axpy(*coef, q, &mut x);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|xi| *xi /= nx);
            let res = residual_norm(op, &x, theta, &mut scratch);
            best = best.min(res);
            // exhausted Krylov spaces are exact up to rounding
            if res <= threshold || (breakdown && res <= 1e3 * f64::EPSILON * anorm) {
                let next_ritz = (j > 0).then(|| {
                    let theta2 = tridiag::eigenvalue(&alpha, off, 1);
                    let s2 = tridiag::eigenvector(&alpha, off, theta2);
                    let mut y = vec![0.0; n];
                    for (coef, q) in s2.iter().zip(&krylov) {
                        axpy(*coef, q, &mut y);
                    }
                    y
                });
                return Ok(Run { value: theta, vector: x, residual: res, iterations: j + 1, next_ritz });
            }
            if last {
                break;
            }
        }

        if breakdown {
            // invariant subspace without convergence: continue from a fresh direction
            let mut fresh = random_unit(rng, n);
            let nf = orthogonalize(&mut fresh, locked.iter().chain(krylov.iter()));
            if nf <= 1e-8 {
                break;
            }
            fresh.iter_mut().for_each(|x| *x /= nf);
            beta.push(0.0);
            v = fresh;
        } else {
            beta.push(b);
            v = w.iter().map(|x| x / b).collect();
        }
    }
    Err(Error::NoConvergence { iterations: krylov.len(), residuals: vec![best] })
}

/// The `opts.k` lowest eigenpairs of a generic symmetric operator.
///
/// `guesses[r]`, when present and of the right length, seeds the r-th run.
pub fn lowest_k_operator<O: SymmetricOperator>(
    op: &O,
    opts: &EigenOptions,
    guesses: &[Vec<f64>],
) -> Result<EigenResult> {
    let n = op.dim();
    if opts.k == 0 || opts.k > n {
        return Err(Error::DimensionTooSmall { dim: n, k: opts.k });
    }
    let cap = opts.krylov_cap(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(opts.k);
    let mut values = Vec::with_capacity(opts.k);
    let mut residuals = Vec::with_capacity(opts.k);
    let mut iterations = 0;
    let mut carried: Option<Vec<f64>> = None;

    for r in 0..opts.k {
        let noise = random_unit(&mut rng, n);
        let guess = guesses.get(r).filter(|g| g.len() == n).cloned().or(carried.take());
        let mut start = match guess {
            Some(g) => {
                let ng = norm(&g);
                if ng > 0.0 && ng.is_finite() {
                    g.iter().zip(&noise).map(|(gi, ni)| gi / ng + GUESS_NOISE * ni).collect()
                } else {
                    noise
                }
            }
            None => noise,
        };
        let mut ns = orthogonalize(&mut start, locked.iter());
        if ns <= 1e-8 {
            start = random_unit(&mut rng, n);
            ns = orthogonalize(&mut start, locked.iter());
        }
        start.iter_mut().for_each(|x| *x /= ns);

        let floor = LOCKED_RESIDUAL_FACTOR * residuals.iter().copied().fold(0.0, f64::max);
        let run = lowest_deflated(op, &locked, start, opts.tol, floor, cap, &mut rng).map_err(|e| match e {
            Error::NoConvergence { iterations: it, residuals: mut best } => {
                let mut all = residuals.clone();
                all.append(&mut best);
                Error::NoConvergence { iterations: iterations + it, residuals: all }
            }
            other => other,
        })?;
        iterations += run.iterations;
        values.push(run.value);
        residuals.push(run.residual);
        locked.push(run.vector);
        carried = run.next_ritz;
    }

    let mut order: Vec<usize> = (0..opts.k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v = locked[i].clone();
            fix_sign(&mut v);
            v
        })
        .collect();
    let degenerate = values.len() >= 2 && (values[1] - values[0]).abs() <= DEGENERACY_RTOL * values[0].abs();
    Ok(EigenResult { values, vectors, residuals, iterations, degenerate })
}

/// Makes the largest-magnitude component positive. Components within a
/// relative 1e-10 of the largest count as tied and the first of them wins.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lead = v.iter().copied().find(|x| x.abs() >= max * (1.0 - 1e-10));
    if lead.is_some_and(|x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// The `opts.k` lowest eigenpairs of h0 + g h1.
pub fn lowest_k(ham: &CouplingHamiltonian, g: f64, opts: &EigenOptions) -> Result<EigenResult> {
    lowest_k_operator(&AtCoupling { ham, g }, opts, &[])
}

/// As [`lowest_k`], seeding the runs with approximate eigenvectors.
pub fn lowest_k_guided(
    ham: &CouplingHamiltonian,
    g: f64,
    opts: &EigenOptions,
    guesses: &[Vec<f64>],
) -> Result<EigenResult> {
    lowest_k_operator(&AtCoupling { ham, g }, opts, guesses)
}

/// Full ascending spectrum by dense diagonalization.
pub fn dense_spectrum(ham: &CouplingHamiltonian, g: f64) -> Result<Vec<f64>> {
    let n = ham.dim();
    if n > DENSE_MAX_DIM {
        return Err(Error::DenseTooLarge { dim: n, max: DENSE_MAX_DIM });
    }
    let h0 = ham.h0().to_dense();
    let h1 = ham.h1().to_dense();
    let m = nalgebra::DMatrix::from_fn(n, n, |r, c| h0[r * n + c] + g * h1[r * n + c]);
    let mut values: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_ladder, LadderConfig};
    use crate::sparse::SymmetricCsr;

    #[test]
    fn single_rung_pairs() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 0.0, 0.0)).unwrap();
        let res = lowest_k(&h, 15.0, &EigenOptions::default().with_k(2)).unwrap();
        assert!((res.values[0] + 11.25).abs() < 1e-12);
        assert!((res.values[1] - 3.75).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // tie on magnitude: the first component is made positive
        assert!((res.ground()[0] - s).abs() < 1e-12);
        assert!((res.ground()[1] + s).abs() < 1e-12);
        assert!(!res.degenerate);
    }

    #[test]
    fn dense_single_rung() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 1.0, 0.0, 0.0)).unwrap();
        let spec = dense_spectrum(&h, 1.0).unwrap();
        assert!((spec[0] + 0.75).abs() < 1e-14 && (spec[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn zero_operator_is_fully_degenerate() {
        let (_, h) = build_ladder(&LadderConfig::new(3, 1.0, 1.0, 1.0)).unwrap();
        let res = lowest_k(&h, 0.0, &EigenOptions::default()).unwrap();
        assert_eq!(res.values, vec![0.0; 3]);
        assert!(res.degenerate);
    }

    #[test]
    fn too_many_pairs() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(lowest_k(&h, 1.0, &EigenOptions::default()), Err(Error::DimensionTooSmall { dim: 2, k: 3 })));
    }

    #[test]
    fn dense_guard() {
        let big = CouplingHamiltonian::new(SymmetricCsr::zeros(5000), SymmetricCsr::zeros(5000)).unwrap();
        assert!(matches!(dense_spectrum(&big, 1.0), Err(Error::DenseTooLarge { .. })));
    }

    #[test]
    fn exact_degeneracy_is_resolved() {
        // diag(1, 1, 2, 3) rotated: the lowest level is doubly degenerate
        let m = SymmetricCsr::from_dense(
            4,
            &[1.5, 0.5, 0.0, 0.0, 0.5, 1.5, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0],
        );
        let h = CouplingHamiltonian::new(SymmetricCsr::zeros(4), m).unwrap();
        let res = lowest_k(&h, 1.0, &EigenOptions::default()).unwrap();
        assert!((res.values[0] - 1.0).abs() < 1e-12);
        assert!((res.values[1] - 1.0).abs() < 1e-12);
        assert!((res.values[2] - 2.0).abs() < 1e-12);
        assert!(res.degenerate);
    }

    #[test]
    fn tiny_budget_reports_no_convergence() {
        let (_, h) = build_ladder(&LadderConfig::new(5, 1.0, 0.8, 0.3)).unwrap();
        let opts = EigenOptions { max_iter: Some(3), ..EigenOptions::default() };
        assert!(matches!(lowest_k(&h, 1.0, &opts), Err(Error::NoConvergence { .. })));
    }
}
