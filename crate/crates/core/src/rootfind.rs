//! Bracketing root finder for scalar functions (Brent's method).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Function evaluations, including those spent bracketing.
    pub evaluations: usize,
}

/// Sign-changing interval and the number of function evaluations spent finding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub interval: (f64, f64),
    pub values: (f64, f64),
    pub evaluations: usize,
}

/// Grows `[lo, hi]` around a positive `center` geometrically until `f` changes sign.
///
/// The interval starts at `[center / factor, center * factor]`; each expansion
/// multiplies the ratio hi/lo by `factor²`.
pub fn bracket_geometric<F>(mut f: F, center: f64, factor: f64, max_expansions: usize) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(center > 0.0 && factor > 1.0);
    let mut lo = center / factor;
    let mut hi = center * factor;
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    let mut evals = 2;
    for _ in 0..max_expansions {
        if flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum() {
            return Ok(Bracket { interval: (lo, hi), values: (flo, fhi), evaluations: evals });
        }
        lo /= factor;
        hi *= factor;
        flo = f(lo)?;
        fhi = f(hi)?;
        evals += 2;
    }
    if flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum() {
        return Ok(Bracket { interval: (lo, hi), values: (flo, fhi), evaluations: evals });
    }
    Err(Error::BracketFailure { expansions: max_expansions })
}

/// Brent's method on a sign-changing bracket. Stops when the bracket is
/// narrower than `xtol` or |f| ≤ `ftol`.
pub fn brent<F>(
    mut f: F,
    (mut a, mut b): (f64, f64),
    (mut fa, mut fb): (f64, f64),
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, evaluations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, evaluations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { expansions: 0 });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for evals in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= ftol {
            return Ok(Root { x: b, fx: fb, evaluations: evals });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // interpolation step (secant or inverse quadratic)
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)), (qa - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::BracketFailure { expansions: max_iter })
}
