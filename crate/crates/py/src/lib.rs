//! Python bindings: systems, commutativity checks, pair synthesis, cascade
//! simulation, the transmitter/receiver demo and the catalog.
//!
//! Every failure surfaces as `pycommutant.CommutantError`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use commutant::catalog::{self, Class};
use commutant::channel::{self, enumerate_structures, CommutativePair, DemoSettings, K0Choice};
use commutant::commutativity::{self, a0_bracket, check_commutativity, f_of, PairConstants, Verdict};
use commutant::expr::{parse_expr, Params};
use commutant::io;
use commutant::sim::{self, InputSignal, Trajectory};
use commutant::system::{Domain, LtvSystem};

create_exception!(pycommutant, CommutantError, PyException);

fn err(e: impl Display) -> PyErr {
    CommutantError::new_err(e.to_string())
}

fn domain_of(d: (f64, f64)) -> PyResult<Domain> {
    Domain::new(d.0, d.1).map_err(err)
}

fn k0_of(name: &str) -> PyResult<K0Choice> {
    match name {
        "derived" => Ok(K0Choice::Derived),
        "stated" => Ok(K0Choice::Stated),
        other => Err(err(format!("unknown k0 choice `{other}` (expected derived or stated)"))),
    }
}

fn input_of(spec: &str) -> PyResult<InputSignal> {
    InputSignal::from_spec(spec).map_err(err)
}

fn trajectory_dict<'py>(py: Python<'py>, traj: &Trajectory) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let t: Vec<f64> = (0..traj.len()).map(|k| traj.time(k)).collect();
    d.set_item("t", t)?;
    for (name, col) in traj.columns() {
        d.set_item(name, col.to_vec())?;
    }
    Ok(d)
}

/// A second-order LTV system `a2 y'' + a1 y' + a0 y = x` on a closed domain.
#[pyclass(name = "System", module = "pycommutant", frozen)]
pub struct PySystem {
    inner: LtvSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (a2, a1, a0, domain, params = None, name = "system", rhs = None))]
    fn new(
        a2: &str,
        a1: &str,
        a0: &str,
        domain: (f64, f64),
        params: Option<Params>,
        name: &str,
        rhs: Option<&str>,
    ) -> PyResult<Self> {
        let p = |s: &str| parse_expr(s).map_err(err);
        let forcing = rhs.map(p).transpose()?;
        let inner = LtvSystem::new(
            name,
            p(a2)?,
            p(a1)?,
            p(a0)?,
            forcing,
            params.unwrap_or_default(),
            domain_of(domain)?,
        )
        .map_err(err)?;
        Ok(PySystem { inner })
    }

    /// Instantiate a catalog entry, optionally under one of its conditions.
    #[staticmethod]
    #[pyo3(signature = (name, params = None, condition = None, domain = None))]
    fn from_catalog(
        name: &str,
        params: Option<Params>,
        condition: Option<&str>,
        domain: Option<(f64, f64)>,
    ) -> PyResult<Self> {
        let domain = domain.map(domain_of).transpose()?;
        let inner = catalog::instantiate(name, &params.unwrap_or_default(), domain, condition).map_err(err)?;
        Ok(PySystem { inner })
    }

    /// Read a system definition file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PySystem {
            inner: io::load_system(path).map_err(err)?,
        })
    }

    /// Parse system definition text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySystem {
            inner: io::parse_system(text, "<string>").map_err(err)?,
        })
    }

    /// The reference system `A` of the transmitter/receiver demo.
    #[staticmethod]
    #[pyo3(signature = (w0 = channel::W0_DEFAULT))]
    fn reference_a(w0: f64) -> PyResult<Self> {
        Ok(PySystem {
            inner: channel::system_a(w0).map_err(err)?,
        })
    }

    /// The partner `B` of the reference system, with `k0` "derived" or "stated".
    #[staticmethod]
    #[pyo3(signature = (w0 = channel::W0_DEFAULT, k0 = "derived"))]
    fn reference_b(w0: f64, k0: &str) -> PyResult<Self> {
        Ok(PySystem {
            inner: channel::system_b(w0, k0_of(k0)?).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::save_system(&self.inner, path).map_err(err)
    }

    /// The system in file format.
    fn render(&self) -> String {
        io::render_system(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        let d = self.inner.domain();
        (d.lo, d.hi)
    }

    #[getter]
    fn params(&self) -> BTreeMap<String, f64> {
        self.inner.params().clone()
    }

    /// Coefficient expressions `(a2, a1, a0)` as text.
    #[getter]
    fn expressions(&self) -> (String, String, String) {
        let [a2, a1, a0] = self.inner.coeffs();
        (a2.to_string(), a1.to_string(), a0.to_string())
    }

    /// Coefficient values `(a2, a1, a0)` at `t`.
    fn coefficients(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        let [a2, a1, a0] = self.inner.coeff_values(t).map_err(err)?;
        Ok((a2, a1, a0))
    }

    /// The commutativity invariant `A0(t)`.
    fn a0(&self, t: f64) -> PyResult<f64> {
        a0_bracket(&self.inner, t).map_err(err)
    }

    /// `f(t) = (2 a1 - a2') / (4 sqrt(a2))`.
    fn f(&self, t: f64) -> PyResult<f64> {
        f_of(&self.inner, t).map_err(err)
    }

    /// Decide whether `A0` is constant on the domain.
    #[pyo3(signature = (grid = commutativity::DEFAULT_GRID, tol = commutativity::DEFAULT_TOL))]
    fn check(&self, grid: usize, tol: f64) -> PyResult<CheckReport> {
        let r = check_commutativity(&self.inner, grid, tol).map_err(err)?;
        let (value, witness, message) = match &r.verdict {
            Verdict::Always { value } => (Some(*value), None, None),
            Verdict::NotConstant { t_min, t_max } => (None, Some((*t_min, *t_max)), None),
            Verdict::DomainError { t, message } => (None, Some((*t, *t)), Some(message.clone())),
        };
        Ok(CheckReport {
            verdict: r.verdict.label().to_string(),
            value,
            witness,
            message,
            a0_min: r.a0_min,
            a0_max: r.a0_max,
            tolerance: r.tolerance,
            samples: r.samples,
        })
    }

    /// The commutative partner for constants `(c2, c1, c0)`.
    fn pair(&self, c2: f64, c1: f64, c0: f64) -> PyResult<PySystem> {
        let inner = commutativity::synthesize_pair(&self.inner, PairConstants::new(c2, c1, c0)).map_err(err)?;
        Ok(PySystem { inner })
    }

    /// The `c1 = 0` partner, which commutes with any system.
    fn feedback_pair(&self, c2: f64, c0: f64) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: commutativity::feedback_pair(&self.inner, c2, c0).map_err(err)?,
        })
    }

    /// Roots of the characteristic polynomial of the coefficients averaged
    /// over `[lo, hi]`.
    fn averaged_eigenvalues<'py>(&self, py: Python<'py>, lo: f64, hi: f64) -> PyResult<Vec<Bound<'py, PyComplex>>> {
        let roots = sim::averaged_eigenvalues(&self.inner, lo, hi).map_err(err)?;
        Ok(roots.iter().map(|z| PyComplex::from_doubles(py, z.re, z.im)).collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.domain();
        format!("System(name={:?}, domain=({lo}, {hi}))", self.inner.name())
    }
}

/// Result of [`PySystem::check`].
#[pyclass(module = "pycommutant", frozen, get_all)]
pub struct CheckReport {
    /// "Always", "NotConstant" or "DomainError".
    verdict: String,
    /// The constant value of `A0` when the verdict is "Always".
    value: Option<f64>,
    /// Locations of the extreme samples (or of the failing point).
    witness: Option<(f64, f64)>,
    message: Option<String>,
    a0_min: f64,
    a0_max: f64,
    tolerance: f64,
    samples: Vec<(f64, f64)>,
}

#[pymethods]
impl CheckReport {
    #[getter]
    fn is_constant(&self) -> bool {
        self.verdict == "Always"
    }

    fn __repr__(&self) -> String {
        match self.value {
            Some(v) => format!("CheckReport(verdict='Always', value={v})"),
            None => format!(
                "CheckReport(verdict='{}', a0_min={}, a0_max={})",
                self.verdict, self.a0_min, self.a0_max
            ),
        }
    }
}

/// Outcome of [`run_demo`].
#[pyclass(module = "pycommutant", frozen)]
pub struct DemoReport {
    inner: channel::DemoReport,
}

#[pymethods]
impl DemoReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn output_agreement(&self) -> f64 {
        self.inner.output_agreement
    }

    #[getter]
    fn transmitted_divergence(&self) -> f64 {
        self.inner.transmitted_divergence
    }

    #[getter]
    fn structures(&self) -> Vec<String> {
        self.inner.runs.iter().map(|r| r.structure.to_string()).collect()
    }

    #[getter]
    fn provenance(&self) -> String {
        self.inner.provenance.to_string()
    }

    /// Receiver output of each structure.
    fn outputs(&self) -> BTreeMap<String, Vec<f64>> {
        self.inner
            .runs
            .iter()
            .map(|r| (r.structure.to_string(), r.output().to_vec()))
            .collect()
    }

    /// Signal crossing the channel in each structure.
    fn transmitted(&self) -> BTreeMap<String, Vec<f64>> {
        self.inner
            .runs
            .iter()
            .map(|r| (r.structure.to_string(), r.transmitted().to_vec()))
            .collect()
    }

    /// Write one CSV per structure plus report.txt; returns the paths.
    fn write(&self, dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        io::write_demo(&self.inner, dir).map_err(err)
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!(
            "DemoReport(passed={}, output_agreement={:e}, transmitted_divergence={:e}, structures={})",
            self.inner.passed(),
            self.inner.output_agreement,
            self.inner.transmitted_divergence,
            self.inner.runs.len()
        )
    }
}

/// Co-integrate a cascade from rest. `input` is "sine-saw", "pulse", "zero"
/// or "expr:<expression in t>". Returns a dict of columns keyed by name.
#[pyfunction]
#[pyo3(signature = (chain, input = "sine-saw", t0 = 0.0, t1 = 20.0, dt = 1e-3))]
fn simulate<'py>(
    py: Python<'py>,
    chain: Vec<PyRef<'py, PySystem>>,
    input: &str,
    t0: f64,
    t1: f64,
    dt: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let systems: Vec<LtvSystem> = chain.iter().map(|s| s.inner.clone()).collect();
    let input = input_of(input)?;
    let traj = py
        .detach(|| sim::simulate_chain(&systems, &input, &[], t0, t1, dt))
        .map_err(err)?;
    trajectory_dict(py, &traj)
}

/// Run every transmitter/receiver split of a cascade of `stages` systems,
/// half `a` and half `b`. `b` must commute with `a` unless `force` is set.
#[pyfunction]
#[pyo3(signature = (
    a, b, input = "sine-saw", stages = 2, t1 = 20.0, dt = 1e-3,
    eps_out = channel::EPS_OUT, delta_min = channel::DELTA_MIN, force = false
))]
#[allow(clippy::too_many_arguments)]
fn run_demo(
    py: Python<'_>,
    a: &PySystem,
    b: &PySystem,
    input: &str,
    stages: usize,
    t1: f64,
    dt: f64,
    eps_out: f64,
    delta_min: f64,
    force: bool,
) -> PyResult<DemoReport> {
    if !stages.is_multiple_of(2) {
        return Err(err(format!("stages must be even, got {stages}")));
    }
    let pair = CommutativePair::new(a.inner.clone(), b.inner.clone(), force).map_err(err)?;
    let structures = enumerate_structures(stages / 2, stages / 2).map_err(err)?;
    let input = input_of(input)?;
    let settings = DemoSettings {
        t1,
        dt,
        eps_out,
        delta_min,
        ..DemoSettings::default()
    };
    let inner = py
        .detach(|| channel::run_demo(&pair, &input, &structures, settings))
        .map_err(err)?;
    Ok(DemoReport { inner })
}

/// Transmitter/receiver splits for `n_a` copies of A and `n_b` of B.
#[pyfunction]
fn structures(n_a: usize, n_b: usize) -> PyResult<Vec<String>> {
    Ok(enumerate_structures(n_a, n_b)
        .map_err(err)?
        .iter()
        .map(ToString::to_string)
        .collect())
}

/// Evaluate an expression in `t` with optional parameters.
#[pyfunction]
#[pyo3(signature = (expr, t, params = None))]
fn evaluate(expr: &str, t: f64, params: Option<Params>) -> PyResult<f64> {
    parse_expr(expr)
        .map_err(err)?
        .eval(t, &params.unwrap_or_default())
        .map_err(err)
}

fn class_name(c: Class) -> String {
    c.to_string()
}

/// The catalog as a list of dicts.
#[pyfunction]
fn catalog_entries(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    catalog::list_entries()
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("id", e.id)?;
            d.set_item("key", e.key)?;
            d.set_item("title", e.title)?;
            d.set_item("expected_class", class_name(e.expected))?;
            d.set_item("domain", e.domain)?;
            d.set_item("defaults", e.defaults.iter().copied().collect::<BTreeMap<_, _>>())?;
            d.set_item("conditions", e.conditions.iter().map(|c| c.label).collect::<Vec<_>>())?;
            d.set_item("evaluable", e.evaluable())?;
            Ok(d)
        })
        .collect()
}

/// Computed versus expected classification of one catalog entry.
#[pyfunction]
#[pyo3(signature = (name, grid = commutativity::DEFAULT_GRID, tol = commutativity::DEFAULT_TOL))]
fn classify<'py>(py: Python<'py>, name: &str, grid: usize, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = catalog::classify(name, grid, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("key", c.key)?;
    d.set_item("expected", class_name(c.expected))?;
    d.set_item("computed", c.computed.map(class_name))?;
    d.set_item("agrees", c.agrees())?;
    d.set_item(
        "conditions",
        c.conditions
            .iter()
            .map(|(label, v)| (*label, v.label()))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Cross-check all catalog tables. Returns a dict with the verdict and the
/// documented and unexpected discrepancies as text.
#[pyfunction]
#[pyo3(signature = (tol = commutativity::DEFAULT_TOL))]
fn verify_tables(py: Python<'_>, tol: f64) -> PyResult<Bound<'_, PyDict>> {
    let r = py.detach(|| catalog::verify_tables(tol));
    let d = PyDict::new(py);
    d.set_item("clean", r.is_clean())?;
    d.set_item(
        "documented",
        r.documented().map(ToString::to_string).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "unexpected",
        r.unexpected().map(ToString::to_string).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "unobserved",
        r.unobserved_errata.iter().map(|e| e.summary).collect::<Vec<_>>(),
    )?;
    d.set_item("final_forms_checked", r.final_forms_checked)?;
    d.set_item("conjugates_checked", r.conjugates_checked)?;
    Ok(d)
}

#[pymodule]
fn pycommutant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CommutantError", m.py().get_type::<CommutantError>())?;
    m.add_class::<PySystem>()?;
    m.add_class::<CheckReport>()?;
    m.add_class::<DemoReport>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_demo, m)?)?;
    m.add_function(wrap_pyfunction!(structures, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_entries, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tables, m)?)?;
    m.add("K0_DERIVED", channel::K0_DERIVED)?;
    m.add("K0_STATED", channel::K0_STATED)?;
    Ok(())
}
