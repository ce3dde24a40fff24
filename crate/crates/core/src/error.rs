use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sector dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: u128, cap: usize },
    #[error("magnetization sector M_tot = {m_tot} is not reachable with {sites} spins")]
    EmptySector { m_tot: HalfIntDisplay, sites: usize },
    #[error("sites per leg must lie in 1..={max}, got {got}")]
    InvalidLength { got: usize, max: usize },
    #[error("invalid ladder configuration: {0}")]
    InvalidConfig(String),
    #[error("vector length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("restriction keeps no states")]
    EmptyRestriction,
    #[error("restriction index {index} out of range for dimension {dim} (or not strictly increasing)")]
    RestrictionOutOfRange { index: usize, dim: usize },
    #[error("dimension {dim} too small for {k} eigenpairs")]
    DimensionTooSmall { dim: usize, k: usize },
    #[error("dense solve limited to dimension {max}, got {dim}")]
    DenseTooLarge { dim: usize, max: usize },
    #[error("Lanczos did not converge after {iterations} iterations (best residuals {residuals:?})")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },
    #[error("target eigenvalue {target} unreachable: lowest coupling-matrix eigenvalue is {mu_min}")]
    NoRoot { target: f64, mu_min: f64 },
    #[error("failed to bracket a root after {expansions} expansions")]
    BracketFailure { expansions: usize },
    #[error("reference energy {0} too close to zero")]
    ZeroReference(f64),
    #[error("amplitude vector norm {0} differs from one")]
    NormViolation(f64),
    #[error("no level crossing in scanned range (smallest gap {min_gap} at the range boundary)")]
    NoCrossing { min_gap: f64 },
    #[error("no trajectory steps with n >= {0}")]
    EmptyWindow(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::EmptySector { .. } => "empty_sector",
            Error::InvalidLength { .. } => "invalid_length",
            Error::InvalidConfig(_) => "invalid_config",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::EmptyRestriction => "empty_restriction",
            Error::RestrictionOutOfRange { .. } => "restriction_out_of_range",
            Error::DimensionTooSmall { .. } => "dimension_too_small",
            Error::DenseTooLarge { .. } => "dense_too_large",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NoRoot { .. } => "no_root",
            Error::BracketFailure { .. } => "bracket_failure",
            Error::ZeroReference(_) => "zero_reference",
            Error::NormViolation(_) => "norm_violation",
            Error::NoCrossing { .. } => "no_crossing",
            Error::EmptyWindow(_) => "empty_window",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

/// Display helper so error messages print half-integers as `1/2`, `-3/2`, `0`.
#[derive(Debug, Clone, Copy)]
pub struct HalfIntDisplay(pub i64);

impl std::fmt::Display for HalfIntDisplay {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
