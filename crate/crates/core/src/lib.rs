//! Hilbert-space reduction with coupling renormalization.
//!
//! A Hamiltonian H = H0 + g H1 is diagonalized in a product basis; basis
//! states with the smallest ground-state amplitudes are removed one at a time
//! while g is re-solved so the ground-state energy stays at its full-space
//! value. The frustrated two-leg spin-1/2 ladder is the built-in model, and
//! the [`criticality`] module checks that level-crossing couplings are left
//! invariant by the reduction.

pub mod basis;
pub mod cli;
pub mod criticality;
pub mod eigensolver;
pub mod error;
pub mod hamiltonian;
pub mod observables;
pub mod output;
pub mod reduction;
pub mod rootfind;
pub mod sparse;
mod tridiag;

pub use basis::{enumerate_sector, magnetization, HalfInt, SpinBasis, SpinConfig};
pub use criticality::{degeneracy_gap, fixed_point_drift, scan_crossing, CrossingReport, FixedPointCheck};
pub use eigensolver::{dense_spectrum, lowest_k, EigenOptions, EigenResult};
pub use error::{Error, Result};
pub use hamiltonian::{build_ladder, Boundary, CouplingHamiltonian, LadderConfig};
pub use observables::{accuracy_loss, energy_per_site, ground_entropy};
pub use reduction::{
    order_by_amplitude, reduce_step, renormalize_coupling, run_reduction, AmplitudeOrdering, CoarseSchedule,
    ReductionOptions, ReductionStep, ReductionTrajectory, RootMethod, StopReason,
};
