//! Sparse representation of H = H0 + g H1 and the frustrated two-leg ladder.
//!
//! Only coupling-free matrix elements are stored; `g` is supplied whenever
//! the operator is evaluated so renormalizing it never triggers a rebuild.

use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_sector, HalfInt, SpinBasis, SpinConfig};
use crate::error::{Error, Result};
use crate::sparse::SymmetricCsr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Couplings and geometry of a frustrated spin-1/2 ladder.
///
/// `j_t` acts across rungs, `j_l` along the legs and `j_c` across the
/// nearest-neighbour diagonals (site i of one leg with site i+1 of the other).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub sites_per_leg: usize,
    pub j_t: f64,
    pub j_l: f64,
    pub j_c: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub m_tot: HalfInt,
}

impl LadderConfig {
    pub fn new(sites_per_leg: usize, j_t: f64, j_l: f64, j_c: f64) -> Self {
        LadderConfig { sites_per_leg, j_t, j_l, j_c, boundary: Boundary::Open, m_tot: HalfInt::ZERO }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_m_tot(mut self, m_tot: HalfInt) -> Self {
        self.m_tot = m_tot;
        self
    }

    /// J_l / J_t
    pub fn gamma_leg(&self) -> f64 {
        self.j_l / self.j_t
    }

    /// J_c / J_t
    pub fn gamma_diag(&self) -> f64 {
        self.j_c / self.j_t
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = self.j_t.is_finite() && self.j_l.is_finite() && self.j_c.is_finite();
        if !all_finite || self.j_t <= 0.0 || self.j_l < 0.0 || self.j_c < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "need J_t > 0 and J_l, J_c >= 0 (got J_t={}, J_l={}, J_c={})",
                self.j_t, self.j_l, self.j_c
            )));
        }
        if !(self.gamma_leg().is_finite() && self.gamma_diag().is_finite()) {
            return Err(Error::InvalidConfig("coupling ratios are not finite".into()));
        }
        if self.boundary == Boundary::Periodic && self.sites_per_leg < 3 {
            return Err(Error::InvalidConfig("periodic boundary needs at least 3 sites per leg".into()));
        }
        Ok(())
    }
}

/// A Heisenberg bond between two bit positions with coefficient `coef` (in units of g).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub coef: f64,
}

/// Bonds of H1: rungs with coefficient 1, legs with J_l/J_t, diagonals with J_c/J_t.
pub fn ladder_bonds(cfg: &LadderConfig) -> Vec<Bond> {
    let l = cfg.sites_per_leg;
    let (gl, gc) = (cfg.gamma_leg(), cfg.gamma_diag());
    let bit = SpinConfig::bit;
    let mut bonds: Vec<Bond> = (0..l).map(|i| Bond { a: bit(i, 1), b: bit(i, 2), coef: 1.0 }).collect();
    let neighbours = match cfg.boundary {
        Boundary::Open => l.saturating_sub(1),
        Boundary::Periodic => l,
    };
    for i in 0..neighbours {
        let j = (i + 1) % l;
        if gl != 0.0 {
            bonds.push(Bond { a: bit(i, 1), b: bit(j, 1), coef: gl });
            bonds.push(Bond { a: bit(i, 2), b: bit(j, 2), coef: gl });
        }
        if gc != 0.0 {
            bonds.push(Bond { a: bit(i, 1), b: bit(j, 2), coef: gc });
            bonds.push(Bond { a: bit(i, 2), b: bit(j, 1), coef: gc });
        }
    }
    bonds
}

/// H = H0 + g H1 over a (possibly reduced) basis.
#[derive(Debug, Clone)]
pub struct CouplingHamiltonian {
    h0: SymmetricCsr,
    h1: SymmetricCsr,
    labels: Vec<usize>,
}

impl CouplingHamiltonian {
    /// Wraps explicit matrices; labels default to `0..dim`.
    pub fn new(h0: SymmetricCsr, h1: SymmetricCsr) -> Result<Self> {
        if h0.dim() != h1.dim() {
            return Err(Error::LengthMismatch { expected: h1.dim(), got: h0.dim() });
        }
        for m in [&h0, &h1] {
            let scale = (0..m.dim()).flat_map(|r| m.row(r)).fold(0.0f64, |a, (_, v)| a.max(v.abs()));
            if m.asymmetry() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidConfig("matrix is not symmetric".into()));
            }
        }
        let labels = (0..h1.dim()).collect();
        Ok(CouplingHamiltonian { h0, h1, labels })
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h0(&self) -> &SymmetricCsr {
        &self.h0
    }

    pub fn h1(&self) -> &SymmetricCsr {
        &self.h1
    }

    /// Original basis ordinals of the surviving states, in current position order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn h0_is_zero(&self) -> bool {
        self.h0.is_zero()
    }

    /// (h0 + g h1) v
    pub fn apply(&self, g: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.h1.check_len(v.len())?;
        let mut out = vec![0.0; v.len()];
        self.apply_into(g, v, &mut out);
        Ok(out)
    }

    /// Unchecked kernel behind [`apply`](Self::apply).
    pub fn apply_into(&self, g: f64, v: &[f64], out: &mut [f64]) {
        self.h1.mul_into(v, g, out);
        if self.h0.nnz() > 0 {
            self.h0.mul_add_into(v, 1.0, out);
        }
    }

    /// Diagonal of h0 + g h1.
    pub fn diagonal(&self, g: f64) -> Vec<f64> {
        self.h0.diagonal().into_iter().zip(self.h1.diagonal()).map(|(d0, d1)| d0 + g * d1).collect()
    }

    /// Principal submatrix on `keep` (strictly increasing current positions).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        let dim = self.dim();
        let mut prev: Option<usize> = None;
        for &k in keep {
            if k >= dim || prev.is_some_and(|p| k <= p) {
                return Err(Error::RestrictionOutOfRange { index: k, dim });
            }
            prev = Some(k);
        }
        Ok(CouplingHamiltonian {
            h0: self.h0.principal_submatrix(keep),
            h1: self.h1.principal_submatrix(keep),
            labels: keep.iter().map(|&k| self.labels[k]).collect(),
        })
    }
}

/// Sector basis plus H1 of the ladder (H0 = 0, g = J_t reproduces the full Hamiltonian).
pub fn build_ladder(cfg: &LadderConfig) -> Result<(SpinBasis, CouplingHamiltonian)> {
    cfg.validate()?;
    let basis = enumerate_sector(cfg.sites_per_leg, cfg.m_tot)?;
    let bonds = ladder_bonds(cfg);
    let rows: Vec<Vec<(usize, f64)>> = basis
        .configs()
        .iter()
        .enumerate()
        .map(|(pos, &c)| {
            let mut row = Vec::with_capacity(bonds.len() + 1);
            let mut diag = 0.0;
            for bond in &bonds {
                if c.is_up(bond.a) == c.is_up(bond.b) {
                    diag += 0.25 * bond.coef;
                } else {
                    diag -= 0.25 * bond.coef;
                    let flipped = SpinConfig(c.0 ^ (1 << bond.a) ^ (1 << bond.b));
                    let col = basis.index_of(flipped).expect("spin exchange leaves the sector");
                    row.push((col, 0.5 * bond.coef));
                }
            }
            row.push((pos, diag));
            row
        })
        .collect();
    let h1 = SymmetricCsr::from_rows(rows);
    let dim = h1.dim();
    let ham = CouplingHamiltonian { h0: SymmetricCsr::zeros(dim), h1, labels: (0..dim).collect() };
    Ok((basis, ham))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rung_matrix() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 5.0, 3.0)).unwrap();
        assert_eq!(h.h1().to_dense(), vec![-0.25, 0.5, 0.5, -0.25]);
        assert!(h.h0_is_zero());
    }

    #[test]
    fn apply_on_singlet() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 0.0, 0.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let out = h.apply(15.0, &[s, -s]).unwrap();
        assert!((out[0] + 11.25 * s).abs() < 1e-14);
        assert!((out[1] - 11.25 * s).abs() < 1e-14);
        assert_eq!(h.apply(0.0, &[s, -s]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn apply_unit_vector_extracts_column() {
        let (_, h) = build_ladder(&LadderConfig::new(3, 1.0, 0.7, 0.4)).unwrap();
        let g = 2.5;
        let mut e = vec![0.0; h.dim()];
        e[4] = 1.0;
        let col = h.apply(g, &e).unwrap();
        for (r, &v) in col.iter().enumerate() {
            assert_eq!(v, g * h.h1().get(r, 4));
        }
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let (_, h) = build_ladder(&LadderConfig::new(2, 1.0, 1.0, 1.0)).unwrap();
        assert!(matches!(h.apply(1.0, &[1.0; 5]), Err(Error::LengthMismatch { expected: 6, got: 5 })));
    }

    #[test]
    fn diagonal_examples() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 7.0, 0.0, 0.0)).unwrap();
        assert_eq!(h.diagonal(7.0), vec![-1.75, -1.75]);
        let zero = CouplingHamiltonian::new(SymmetricCsr::zeros(3), SymmetricCsr::zeros(3)).unwrap();
        assert_eq!(zero.diagonal(4.0), vec![0.0; 3]);
    }

    #[test]
    fn restrict_examples() {
        let (_, h) = build_ladder(&LadderConfig::new(1, 15.0, 0.0, 0.0)).unwrap();
        let r = h.restrict(&[0]).unwrap();
        assert_eq!(r.h1().to_dense(), vec![-0.25]);
        assert_eq!(r.labels(), &[0]);
        let all = h.restrict(&[0, 1]).unwrap();
        assert_eq!(all.h1(), h.h1());
        assert!(matches!(h.restrict(&[]), Err(Error::EmptyRestriction)));
        assert!(matches!(h.restrict(&[2]), Err(Error::RestrictionOutOfRange { .. })));
        assert!(matches!(h.restrict(&[1, 0]), Err(Error::RestrictionOutOfRange { .. })));
    }

    #[test]
    fn labels_compose_across_restrictions() {
        let (_, h) = build_ladder(&LadderConfig::new(2, 1.0, 0.5, 0.5)).unwrap();
        let a = h.restrict(&[1, 2, 4, 5]).unwrap();
        let b = a.restrict(&[0, 3]).unwrap();
        assert_eq!(b.labels(), &[1, 5]);
        assert_eq!(b.h1().get(1, 1), h.h1().get(5, 5));
    }

    #[test]
    fn invalid_configs() {
        assert!(LadderConfig::new(3, 0.0, 1.0, 1.0).validate().is_err());
        assert!(LadderConfig::new(3, 1.0, -1.0, 1.0).validate().is_err());
        assert!(LadderConfig::new(3, 1.0, 1.0, f64::NAN).validate().is_err());
        assert!(LadderConfig::new(2, 1.0, 1.0, 1.0).with_boundary(Boundary::Periodic).validate().is_err());
        assert!(LadderConfig::new(3, 1.0, 1.0, 1.0).with_boundary(Boundary::Periodic).validate().is_ok());
    }

    #[test]
    fn generic_constructor_checks_symmetry() {
        let bad = SymmetricCsr::from_dense(2, &[1.0, 2.0, 3.0, 1.0]);
        assert!(CouplingHamiltonian::new(SymmetricCsr::zeros(2), bad).is_err());
    }
}
