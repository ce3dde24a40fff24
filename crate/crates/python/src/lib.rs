//! Python bindings for the Hilbert-space reduction library.
//!
//! Long-running calls (diagonalization, reduction, scans) release the GIL.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use hsred_core::criticality::{self, ScanPath, ScanRange, DEFAULT_PARAM_RTOL};
use hsred_core::output::write_trajectory_csv;
use hsred_core::reduction::{AmplitudeOrdering, CoarseSchedule, RootMethod};
use hsred_core::{Boundary, CouplingHamiltonian, EigenOptions, HalfInt, ReductionOptions, SpinBasis};

create_exception!(hsred, HsredError, PyException, "Error raised by the hsred core library.");

fn to_py(err: hsred_core::Error) -> PyErr {
    HsredError::new_err(format!("{}: {}", err.kind(), err))
}

fn parse_boundary(s: &str) -> PyResult<Boundary> {
    match s {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(PyValueError::new_err(format!("unknown boundary {s:?}; expected 'open' or 'periodic'"))),
    }
}

fn parse_root_method(s: &str) -> PyResult<RootMethod> {
    match s {
        "auto" => Ok(RootMethod::Auto),
        "bracketing" => Ok(RootMethod::Bracketing),
        _ => Err(PyValueError::new_err(format!("unknown root_method {s:?}; expected 'auto' or 'bracketing'"))),
    }
}

fn parse_ordering(s: &str) -> PyResult<AmplitudeOrdering> {
    match s {
        "refresh" => Ok(AmplitudeOrdering::Refresh),
        "initial" => Ok(AmplitudeOrdering::Initial),
        _ => Err(PyValueError::new_err(format!("unknown ordering {s:?}; expected 'refresh' or 'initial'"))),
    }
}

fn parse_scan_path(s: &str) -> PyResult<ScanPath> {
    match s {
        "leg_equals_diagonal" => Ok(ScanPath::LegEqualsDiagonal),
        "leg" => Ok(ScanPath::Leg),
        "diagonal" => Ok(ScanPath::Diagonal),
        "rung" => Ok(ScanPath::Rung),
        _ => Err(PyValueError::new_err(format!(
            "unknown scan path {s:?}; expected 'leg_equals_diagonal', 'leg', 'diagonal' or 'rung'"
        ))),
    }
}

fn half_int(m_tot: f64) -> PyResult<HalfInt> {
    let h = HalfInt::from_f64(m_tot);
    if h.to_f64() != m_tot {
        return Err(PyValueError::new_err(format!("M_tot = {m_tot} is not a half-integer")));
    }
    Ok(h)
}

fn eigen_options(k: usize, tol: f64, max_iter: Option<usize>, seed: Option<u64>) -> EigenOptions {
    let d = EigenOptions::default();
    EigenOptions { k, tol, max_iter, seed: seed.unwrap_or(d.seed) }
}

/// Couplings and geometry of a frustrated two-leg ladder.
#[pyclass(name = "LadderConfig", module = "hsred", frozen)]
struct PyLadderConfig {
    inner: hsred_core::LadderConfig,
}

#[pymethods]
impl PyLadderConfig {
    #[new]
    #[pyo3(signature = (sites_per_leg, j_t, j_l, j_c, boundary = "open", m_tot = 0.0))]
    fn new(sites_per_leg: usize, j_t: f64, j_l: f64, j_c: f64, boundary: &str, m_tot: f64) -> PyResult<Self> {
        let inner = hsred_core::LadderConfig::new(sites_per_leg, j_t, j_l, j_c)
            .with_boundary(parse_boundary(boundary)?)
            .with_m_tot(half_int(m_tot)?);
        inner.validate().map_err(to_py)?;
        Ok(PyLadderConfig { inner })
    }

    #[getter]
    fn sites_per_leg(&self) -> usize {
        self.inner.sites_per_leg
    }

    #[getter]
    fn j_t(&self) -> f64 {
        self.inner.j_t
    }

    #[getter]
    fn j_l(&self) -> f64 {
        self.inner.j_l
    }

    #[getter]
    fn j_c(&self) -> f64 {
        self.inner.j_c
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        match self.inner.boundary {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }

    #[getter]
    fn m_tot(&self) -> f64 {
        self.inner.m_tot.to_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "LadderConfig(sites_per_leg={}, j_t={}, j_l={}, j_c={}, boundary='{}', m_tot={})",
            self.inner.sites_per_leg,
            self.inner.j_t,
            self.inner.j_l,
            self.inner.j_c,
            self.boundary(),
            self.inner.m_tot
        )
    }
}

/// Spin configurations of one magnetization sector, in ascending bit order.
#[pyclass(name = "SpinBasis", module = "hsred", frozen)]
struct PySpinBasis {
    inner: SpinBasis,
}

#[pymethods]
impl PySpinBasis {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn sites_per_leg(&self) -> usize {
        self.inner.sites_per_leg()
    }

    #[getter]
    fn m_tot(&self) -> f64 {
        self.inner.m_tot().to_f64()
    }

    /// Bit patterns; bit 2i+k is set when spin (site i, leg k) points up.
    fn configs(&self) -> Vec<u64> {
        self.inner.configs().iter().map(|c| c.0).collect()
    }

    fn index_of(&self, bits: u64) -> Option<usize> {
        self.inner.index_of(hsred_core::SpinConfig(bits))
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpinBasis(sites_per_leg={}, m_tot={}, dim={})",
            self.inner.sites_per_leg(),
            self.inner.m_tot(),
            self.inner.dim()
        )
    }
}

/// Lowest eigenpairs in ascending order.
#[pyclass(name = "EigenResult", module = "hsred", frozen, get_all)]
struct PyEigenResult {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    iterations: usize,
    degenerate: bool,
}

impl From<hsred_core::EigenResult> for PyEigenResult {
    fn from(r: hsred_core::EigenResult) -> Self {
        PyEigenResult {
            values: r.values,
            vectors: r.vectors,
            residuals: r.residuals,
            iterations: r.iterations,
            degenerate: r.degenerate,
        }
    }
}

#[pymethods]
impl PyEigenResult {
    fn __repr__(&self) -> String {
        format!("EigenResult(values={:?}, iterations={})", self.values, self.iterations)
    }
}

/// Sparse H = H0 + g H1 over a subset of basis states.
#[pyclass(name = "Hamiltonian", module = "hsred", frozen)]
struct PyHamiltonian {
    inner: CouplingHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Original basis ordinals of the rows still present.
    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn h0_is_zero(&self) -> bool {
        self.inner.h0_is_zero()
    }

    fn apply(&self, g: f64, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(g, &v).map_err(to_py)
    }

    fn diagonal(&self, g: f64) -> Vec<f64> {
        self.inner.diagonal(g)
    }

    /// Dense matrix as a list of rows (small spaces only).
    fn to_dense(&self, g: f64) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.dim();
        if n > hsred_core::eigensolver::DENSE_MAX_DIM {
            return Err(to_py(hsred_core::Error::DenseTooLarge {
                dim: n,
                max: hsred_core::eigensolver::DENSE_MAX_DIM,
            }));
        }
        let mut rows = Vec::with_capacity(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            rows.push(self.inner.apply(g, &e).map_err(to_py)?);
            e[j] = 0.0;
        }
        Ok(rows)
    }

    fn restrict(&self, keep: Vec<usize>) -> PyResult<PyHamiltonian> {
        Ok(PyHamiltonian { inner: self.inner.restrict(&keep).map_err(to_py)? })
    }

    #[pyo3(signature = (g, k = 3, tol = 1e-10, max_iter = None, seed = None))]
    fn lowest_k(
        &self,
        py: Python<'_>,
        g: f64,
        k: usize,
        tol: f64,
        max_iter: Option<usize>,
        seed: Option<u64>,
    ) -> PyResult<PyEigenResult> {
        let opts = eigen_options(k, tol, max_iter, seed);
        let res = py.detach(|| hsred_core::lowest_k(&self.inner, g, &opts)).map_err(to_py)?;
        Ok(res.into())
    }

    /// Full spectrum by dense diagonalization (small spaces only).
    fn dense_spectrum(&self, py: Python<'_>, g: f64) -> PyResult<Vec<f64>> {
        py.detach(|| hsred_core::dense_spectrum(&self.inner, g)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(dim={})", self.inner.dim())
    }
}

/// One record of a reduction run; step 0 is the unreduced space.
#[pyclass(name = "ReductionStep", module = "hsred", frozen, get_all)]
struct PyReductionStep {
    step: usize,
    n: usize,
    g: f64,
    lambdas: Vec<f64>,
    per_site: Vec<f64>,
    p: Vec<f64>,
    entropy: f64,
    eliminated: Vec<usize>,
    eliminated_amplitude: Vec<f64>,
    root_iterations: usize,
}

#[pymethods]
impl PyReductionStep {
    fn __repr__(&self) -> String {
        format!("ReductionStep(step={}, n={}, g={}, p={:?})", self.step, self.n, self.g, self.p)
    }
}

/// Result of a full reduction run.
#[pyclass(name = "Trajectory", module = "hsred", frozen)]
struct PyTrajectory {
    inner: hsred_core::ReductionTrajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn lambda1(&self) -> f64 {
        self.inner.lambda1()
    }

    #[getter]
    fn initial_g(&self) -> f64 {
        self.inner.initial_g
    }

    #[getter]
    fn initial(&self) -> PyEigenResult {
        self.inner.initial.clone().into()
    }

    #[getter]
    fn stop_reason(&self) -> String {
        format!("{:?}", self.inner.stop_reason)
    }

    #[getter]
    fn stop_detail(&self) -> Option<String> {
        self.inner.stop_detail.clone()
    }

    #[getter]
    fn steps(&self) -> Vec<PyReductionStep> {
        self.inner
            .steps
            .iter()
            .map(|s| PyReductionStep {
                step: s.step,
                n: s.n,
                g: s.g,
                lambdas: s.lambdas.clone(),
                per_site: s.per_site.clone(),
                p: s.p.clone(),
                entropy: s.entropy,
                eliminated: s.eliminated.clone(),
                eliminated_amplitude: s.eliminated_amplitude.clone(),
                root_iterations: s.root_iterations,
            })
            .collect()
    }

    /// (n, g) pairs, in step order.
    fn couplings(&self) -> Vec<(usize, f64)> {
        self.inner.steps.iter().map(|s| (s.n, s.g)).collect()
    }

    fn surviving_labels(&self) -> Vec<usize> {
        self.inner.surviving_labels()
    }

    /// Largest relative deviation of g from its initial value over steps with n ≥ n_floor.
    fn fixed_point_drift(&self, n_floor: usize) -> PyResult<f64> {
        Ok(criticality::fixed_point_drift(&self.inner, n_floor).map_err(to_py)?.drift)
    }

    /// The trajectory in the CSV layout written by the command-line tool.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_trajectory_csv(&self.inner, &mut buf).map_err(to_py)?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.steps.len()
    }

    fn __repr__(&self) -> String {
        let last = self.inner.steps.last().expect("trajectory has an initial record");
        format!(
            "Trajectory(steps={}, final_n={}, final_g={}, stop_reason={:?})",
            self.inner.steps.len() - 1,
            last.n,
            last.g,
            self.inner.stop_reason
        )
    }
}

/// Location of a ground-state level crossing.
#[pyclass(name = "CrossingReport", module = "hsred", frozen, get_all)]
struct PyCrossingReport {
    parameter_path: String,
    g_e: f64,
    min_gap: f64,
    bracket: (f64, f64),
    ratio: f64,
    lambda1: f64,
    lambda2: f64,
    is_crossing: bool,
    evaluations: usize,
    /// (param, lambda1, lambda2, gap) for each coarse scan point.
    curve: Vec<(f64, f64, f64, f64)>,
}

#[pymethods]
impl PyCrossingReport {
    fn __repr__(&self) -> String {
        format!(
            "CrossingReport(g_e={}, ratio={}, min_gap={:e}, is_crossing={})",
            self.g_e, self.ratio, self.min_gap, self.is_crossing
        )
    }
}

#[pyfunction]
#[pyo3(signature = (sites_per_leg, m_tot = 0.0))]
fn enumerate_sector(sites_per_leg: usize, m_tot: f64) -> PyResult<PySpinBasis> {
    let inner = hsred_core::enumerate_sector(sites_per_leg, half_int(m_tot)?).map_err(to_py)?;
    Ok(PySpinBasis { inner })
}

/// Builds the sector basis and the coupling Hamiltonian (H0 = 0, H1 = H/J_t).
#[pyfunction]
fn build_ladder(py: Python<'_>, config: PyRef<'_, PyLadderConfig>) -> PyResult<(PySpinBasis, PyHamiltonian)> {
    let cfg = config.inner;
    let (basis, ham) = py.detach(|| hsred_core::build_ladder(&cfg)).map_err(to_py)?;
    Ok((PySpinBasis { inner: basis }, PyHamiltonian { inner: ham }))
}

/// Lowest eigenpairs of the ladder at g = J_t.
#[pyfunction]
#[pyo3(signature = (config, k = 3, tol = 1e-10, max_iter = None, seed = None))]
fn spectrum(
    py: Python<'_>,
    config: PyRef<'_, PyLadderConfig>,
    k: usize,
    tol: f64,
    max_iter: Option<usize>,
    seed: Option<u64>,
) -> PyResult<PyEigenResult> {
    let cfg = config.inner;
    let opts = eigen_options(k, tol, max_iter, seed);
    let res = py
        .detach(|| {
            let (_, ham) = hsred_core::build_ladder(&cfg)?;
            hsred_core::lowest_k(&ham, cfg.j_t, &opts)
        })
        .map_err(to_py)?;
    Ok(res.into())
}

#[pyfunction]
#[pyo3(signature = (
    config, n_min = 8, p_max = 5.0, batch = 1, coarse_above = None, coarse_fraction = 0.05,
    root_method = "auto", ordering = "refresh", k = 3, tol = 1e-10, max_iter = Some(500), seed = None
))]
#[allow(clippy::too_many_arguments)]
fn run_reduction(
    py: Python<'_>,
    config: PyRef<'_, PyLadderConfig>,
    n_min: usize,
    p_max: f64,
    batch: usize,
    coarse_above: Option<usize>,
    coarse_fraction: f64,
    root_method: &str,
    ordering: &str,
    k: usize,
    tol: f64,
    max_iter: Option<usize>,
    seed: Option<u64>,
) -> PyResult<PyTrajectory> {
    let cfg = config.inner;
    let eopts = eigen_options(k, tol, max_iter, seed);
    let ropts = ReductionOptions {
        n_min,
        p_max,
        batch,
        coarse: coarse_above.map(|above| CoarseSchedule { above, fraction: coarse_fraction }),
        root_method: parse_root_method(root_method)?,
        ordering: parse_ordering(ordering)?,
        ..ReductionOptions::default()
    };
    let inner = py.detach(|| hsred_core::run_reduction(&cfg, &eopts, &ropts)).map_err(to_py)?;
    Ok(PyTrajectory { inner })
}

/// Scans one coupling path for the minimum of λ₂ − λ₁ and refines it.
#[pyfunction]
#[pyo3(signature = (config, start, stop, points = 41, path = "leg_equals_diagonal", k = 3, tol = 1e-10, seed = None))]
#[allow(clippy::too_many_arguments)]
fn scan_crossing(
    py: Python<'_>,
    config: PyRef<'_, PyLadderConfig>,
    start: f64,
    stop: f64,
    points: usize,
    path: &str,
    k: usize,
    tol: f64,
    seed: Option<u64>,
) -> PyResult<PyCrossingReport> {
    let cfg = config.inner;
    let scan = ScanRange { path: parse_scan_path(path)?, from: start, to: stop, points };
    let eopts = eigen_options(k, tol, Some(500), seed);
    let r = py.detach(|| criticality::scan_crossing_with(&cfg, &scan, &eopts, DEFAULT_PARAM_RTOL)).map_err(to_py)?;
    Ok(PyCrossingReport {
        parameter_path: r.parameter_path,
        g_e: r.g_e,
        min_gap: r.min_gap,
        bracket: r.bracket,
        ratio: r.ratio,
        lambda1: r.lambda1,
        lambda2: r.lambda2,
        is_crossing: r.is_crossing,
        evaluations: r.evaluations,
        curve: r.curve.iter().map(|p| (p.param, p.lambda1, p.lambda2, p.gap)).collect(),
    })
}

/// |(e_ref − e_now) / e_ref| in percent.
#[pyfunction]
fn accuracy_loss(e_ref: f64, e_now: f64) -> PyResult<f64> {
    hsred_core::accuracy_loss(e_ref, e_now).map_err(to_py)
}

/// Amplitude entropy −(1/2L) Σ P ln P of a normalized ground state.
#[pyfunction]
fn ground_entropy(ground: Vec<f64>, sites_per_leg: usize) -> PyResult<f64> {
    hsred_core::ground_entropy(&ground, sites_per_leg).map_err(to_py)
}

#[pymodule]
fn hsred(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HsredError", m.py().get_type::<HsredError>())?;
    m.add_class::<PyLadderConfig>()?;
    m.add_class::<PySpinBasis>()?;
    m.add_class::<PyEigenResult>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyReductionStep>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyCrossingReport>()?;
    m.add_function(wrap_pyfunction!(enumerate_sector, m)?)?;
    m.add_function(wrap_pyfunction!(build_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(run_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(scan_crossing, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy_loss, m)?)?;
    m.add_function(wrap_pyfunction!(ground_entropy, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn option_strings_parse() {
        assert_eq!(parse_boundary("periodic").unwrap(), Boundary::Periodic);
        assert_eq!(parse_root_method("bracketing").unwrap(), RootMethod::Bracketing);
        assert_eq!(parse_ordering("initial").unwrap(), AmplitudeOrdering::Initial);
        assert_eq!(parse_scan_path("rung").unwrap(), ScanPath::Rung);
        assert!(parse_boundary("twisted").is_err());
        assert!(parse_ordering("random").is_err());
    }

    #[test]
    fn magnetization_must_be_a_half_integer() {
        assert_eq!(half_int(-1.5).unwrap(), HalfInt::from_twice(-3));
        assert!(half_int(0.25).is_err());
    }

    #[test]
    fn eigen_defaults_fill_the_seed() {
        let o = eigen_options(2, 1e-9, None, None);
        assert_eq!(o.seed, EigenOptions::default().seed);
        assert_eq!(eigen_options(2, 1e-9, None, Some(5)).seed, 5);
    }
}
