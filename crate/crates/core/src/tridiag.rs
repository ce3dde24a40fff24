//! Small helpers for the symmetric tridiagonal matrices produced by Lanczos.
//!
//! `diag` has length m and `off` length m - 1 (off[i] couples i and i + 1).

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
fn count_below(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let m = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < m { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based) by bisection.
pub fn eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    assert!(index < diag.len());
    if diag.len() == 1 {
        return diag[0];
    }
    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.sqrt() * scale.max(1.0);
    lo -= 2.0 * f64::EPSILON * scale;
    hi += 2.0 * f64::EPSILON * scale;
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
            break;
        }
        if count_below(diag, off, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector for the (accurate) eigenvalue `theta` by inverse iteration,
/// using LU with partial pivoting of T - theta I.
pub fn eigenvector(diag: &[f64], off: &[f64], theta: f64) -> Vec<f64> {
    let m = diag.len();
    if m == 1 {
        return vec![1.0];
    }
    let (lo, hi) = gershgorin(diag, off);
    let tiny = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);

    // factorization (LAPACK dgttrf layout)
    let mut d: Vec<f64> = diag.iter().map(|a| a - theta).collect();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    let mut du2 = vec![0.0; m.saturating_sub(2)];
    let mut swapped = vec![false; m - 1];
    for i in 0..m - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < m {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if d[m - 1] == 0.0 {
        d[m - 1] = tiny;
    }
    for di in d.iter_mut() {
        if di.abs() < tiny {
            *di = tiny.copysign(*di);
        }
    }

    let solve = |b: &mut [f64]| {
        for i in 0..m - 1 {
            if swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[m - 1] /= d[m - 1];
        b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / d[m - 2];
        for i in (0..m.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    };

    // fixed, slightly non-uniform start so no eigenvector is exactly missed
    let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0).collect();
    for _ in 0..3 {
        solve(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}
