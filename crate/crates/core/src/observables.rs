//! Accuracy-loss percentages and ground-state amplitude entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO_GUARD: f64 = 1e-30;
const NORM_TOL: f64 = 1e-8;

/// Energy normalization used for all reported per-site energies: λ / L,
/// i.e. the energy per rung of a ladder with L sites per leg.
pub fn energy_per_site(lambda: f64, sites_per_leg: usize) -> f64 {
    lambda / sites_per_leg as f64
}

/// |(e_ref − e_now)/e_ref| × 100
pub fn accuracy_loss(e_ref: f64, e_now: f64) -> Result<f64> {
    if e_ref.abs() < ZERO_GUARD {
        return Err(Error::ZeroReference(e_ref));
    }
    Ok(((e_ref - e_now) / e_ref).abs() * 100.0)
}

/// −(1/2L) Σ Pᵢ ln Pᵢ with Pᵢ = aᵢ², in nats per site (0 ln 0 = 0).
pub fn ground_entropy(ground: &[f64], sites_per_leg: usize) -> Result<f64> {
    let norm2: f64 = ground.iter().map(|a| a * a).sum();
    if (norm2.sqrt() - 1.0).abs() > NORM_TOL {
        return Err(Error::NormViolation(norm2.sqrt()));
    }
    let shannon: f64 = ground.iter().map(|a| a * a).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
    Ok(shannon / (2 * sites_per_leg) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    /// p(1), p(2), p(3) in percent.
    pub p: Vec<f64>,
    pub entropy: f64,
    pub n: usize,
}

impl ObservableSet {
    /// Observables of a reduced space of dimension `n` against full-space per-site energies.
    pub fn compute(reference: &[f64], current: &[f64], ground: &[f64], sites_per_leg: usize) -> Result<Self> {
        let p = reference.iter().zip(current).map(|(&r, &c)| accuracy_loss(r, c)).collect::<Result<Vec<_>>>()?;
        Ok(ObservableSet { p, entropy: ground_entropy(ground, sites_per_leg)?, n: ground.len() })
    }
}
