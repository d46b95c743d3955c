//! Python bindings: lattices, mode sets, drives and particle-number sweeps.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tline_core::dynamics::{self, IntegratorOptions, Method};
use tline_core::lattice::{CircuitFamily, CircuitSpec, DriveClass};
use tline_core::observables::{self, SweepOptions};
use tline_core::quantization::{FieldState, ModeSet};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_family(name: &str) -> PyResult<CircuitFamily> {
    name.parse().map_err(value_err)
}

fn parse_method(name: &str) -> PyResult<Method> {
    match name {
        "analytic" => Ok(Method::AnalyticMultiscale),
        "numeric" => Ok(Method::NumericOde),
        other => Err(PyValueError::new_err(format!(
            "unknown method {other:?}, expected \"analytic\" or \"numeric\""
        ))),
    }
}

/// One lattice: family, cell count and element values in SI units.
#[pyclass(name = "CircuitSpec", module = "tline_dce", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCircuitSpec {
    inner: CircuitSpec,
}

#[pymethods]
impl PyCircuitSpec {
    #[new]
    #[pyo3(signature = (
        family,
        cells = 200,
        delta_x = 1.0,
        capacitance = 0.4e-12,
        junction_capacitance = 0.02e-12,
        inductance = 60e-12,
        critical_current = 1.25e-6,
        rhtl2_approx = false,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        family: &str,
        cells: usize,
        delta_x: f64,
        capacitance: f64,
        junction_capacitance: f64,
        inductance: f64,
        critical_current: f64,
        rhtl2_approx: bool,
    ) -> PyResult<Self> {
        let inner = CircuitSpec::new(
            parse_family(family)?,
            cells,
            delta_x,
            capacitance,
            junction_capacitance,
            inductance,
            critical_current,
        )
        .map_err(value_err)?
        .with_rhtl2_approx(rhtl2_approx);
        Ok(Self { inner })
    }

    #[staticmethod]
    fn reference(family: &str) -> PyResult<Self> {
        Ok(Self { inner: CircuitSpec::reference(parse_family(family)?) })
    }

    fn with_cells(&self, cells: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_cells(cells).map_err(value_err)? })
    }

    fn with_critical_current(&self, critical_current: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_critical_current(critical_current).map_err(value_err)? })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    #[getter]
    fn cells(&self) -> usize {
        self.inner.cells()
    }

    #[getter]
    fn half(&self) -> i64 {
        self.inner.half()
    }

    #[getter]
    fn capacitance(&self) -> f64 {
        self.inner.capacitance()
    }

    #[getter]
    fn junction_capacitance(&self) -> f64 {
        self.inner.junction_capacitance()
    }

    #[getter]
    fn inductance(&self) -> f64 {
        self.inner.inductance()
    }

    #[getter]
    fn critical_current(&self) -> f64 {
        self.inner.critical_current()
    }

    #[getter]
    fn delta_x(&self) -> f64 {
        self.inner.delta_x()
    }

    #[getter]
    fn e0(&self) -> f64 {
        self.inner.e0()
    }

    /// "massless" or "massive".
    #[getter]
    fn drive_class(&self) -> &'static str {
        match self.inner.drive_class() {
            DriveClass::Massless => "massless",
            DriveClass::Massive => "massive",
        }
    }

    fn omega0(&self, j: i64) -> PyResult<f64> {
        self.inner.omega0(j).map_err(value_err)
    }

    fn dispersion(&self, j: i64, energy: f64) -> PyResult<f64> {
        self.inner.dispersion(j, energy).map_err(value_err)
    }

    fn wave_vector(&self, j: i64) -> PyResult<f64> {
        self.inner.wave_vector(j).map_err(value_err)
    }

    /// Group velocity at Josephson energy `energy` (defaults to E0).
    #[pyo3(signature = (j, energy = None))]
    fn group_velocity(&self, j: i64, energy: Option<f64>) -> PyResult<f64> {
        let e = energy.unwrap_or_else(|| self.inner.e0());
        self.inner.group_velocity(j, e).map_err(value_err)
    }

    fn chi(&self, j: i64) -> PyResult<f64> {
        self.inner.chi(j).map_err(value_err)
    }

    fn epsilon0(&self, j: i64) -> PyResult<f64> {
        self.inner.epsilon0(j).map_err(value_err)
    }

    fn epsilon0_over_hbar(&self, j: i64) -> PyResult<f64> {
        self.inner.epsilon0_over_hbar(j).map_err(value_err)
    }

    /// `(exact, approximate)` band-edge frequency; LHTL1 only.
    fn infrared_limit(&self) -> PyResult<(f64, f64)> {
        let ir = self.inner.infrared_limit().map_err(value_err)?;
        Ok((ir.exact, ir.approx))
    }

    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().iter().map(|w| w.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "CircuitSpec({:?}, cells={}, C={:e}, C_J={:e}, L={:e}, I_c={:e})",
            self.family(),
            self.inner.cells(),
            self.inner.capacitance(),
            self.inner.junction_capacitance(),
            self.inner.inductance(),
            self.inner.critical_current()
        )
    }
}

/// Normal modes of a lattice at E0, with field embedding and amplitude extraction.
#[pyclass(name = "ModeSet", module = "tline_dce", frozen)]
struct PyModeSet {
    inner: ModeSet,
}

#[pymethods]
impl PyModeSet {
    #[new]
    fn new(spec: &PyCircuitSpec) -> PyResult<Self> {
        Ok(Self { inner: ModeSet::new(&spec.inner).map_err(value_err)? })
    }

    /// Mode labels in storage order.
    #[getter]
    fn indices(&self) -> Vec<i64> {
        self.inner.modes().iter().map(|m| m.j).collect()
    }

    #[getter]
    fn cells(&self) -> usize {
        self.inner.cells()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn mode_function(&self, j: i64, n: usize, t: f64) -> PyResult<Complex64> {
        self.inner.mode_function(j, n, t).map_err(value_err)
    }

    fn normalization(&self, i: i64, j: i64) -> PyResult<Complex64> {
        self.inner.normalization_check(i, j).map_err(value_err)
    }

    fn commutator(&self, j: i64, h: i64) -> PyResult<Complex64> {
        self.inner.commutator(j, h).map_err(value_err)
    }

    /// Nodal `(flux, momentum)` of the field with the given amplitudes (one per index).
    #[pyo3(signature = (amplitudes, t, real = true))]
    fn embed(&self, amplitudes: Vec<Complex64>, t: f64, real: bool) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
        let s = self.inner.embed(&amplitudes, t, real).map_err(value_err)?;
        Ok((s.flux, s.momentum))
    }

    /// Mode amplitudes of a nodal field, in the order of `indices`.
    fn extract(&self, flux: Vec<Complex64>, momentum: Vec<Complex64>, t: f64) -> PyResult<Vec<Complex64>> {
        self.inner
            .extract_all(&FieldState { flux, momentum }, t)
            .map_err(value_err)
    }
}

/// Sinusoidal modulation `E(t) = E0[1 + 4η sin Ωt]` for `0 ≤ t ≤ t_final`.
#[pyclass(name = "DriveSpec", module = "tline_dce", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDriveSpec {
    inner: dynamics::DriveSpec,
}

#[pymethods]
impl PyDriveSpec {
    #[new]
    fn new(eta: f64, omega: f64, t_final: f64) -> PyResult<Self> {
        Ok(Self { inner: dynamics::DriveSpec::new(eta, omega, t_final).map_err(value_err)? })
    }

    /// `Ω = 2ω0_j`, lasting `t_f = τ/η`.
    #[staticmethod]
    fn resonant(spec: &PyCircuitSpec, j: i64, eta: f64, tau: f64) -> PyResult<Self> {
        Ok(Self { inner: dynamics::DriveSpec::resonant(&spec.inner, j, eta, tau).map_err(value_err)? })
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    #[getter]
    fn t_final(&self) -> f64 {
        self.inner.t_final()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau()
    }

    fn is_resonant(&self, spec: &PyCircuitSpec, j: i64) -> PyResult<bool> {
        let w0 = spec.inner.omega0(j).map_err(value_err)?;
        Ok(dynamics::is_resonant(&self.inner, w0))
    }
}

/// Bogoliubov coefficients of one driven mode.
#[pyclass(name = "BogoliubovResult", module = "tline_dce", frozen, get_all)]
struct PyBogoliubov {
    mode: i64,
    alpha: Complex64,
    beta: Complex64,
    method: &'static str,
    tau: f64,
    resonant: bool,
    /// `None` for the analytic method.
    max_wronskian_drift: Option<f64>,
}

#[pymethods]
impl PyBogoliubov {
    #[getter]
    fn particles(&self) -> f64 {
        self.beta.norm_sqr()
    }

    #[getter]
    fn unitarity(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    fn __repr__(&self) -> String {
        format!(
            "BogoliubovResult(mode={}, method={:?}, N={:e})",
            self.mode,
            self.method,
            self.particles()
        )
    }
}

/// Analytic `N_j = sinh²(gτ)` after resonant driving for slow time `tau`.
#[pyfunction]
fn particle_number(spec: &PyCircuitSpec, j: i64, tau: f64) -> PyResult<f64> {
    Ok(observables::particle_number_analytic(&spec.inner, j, tau).map_err(value_err)?.n)
}

#[pyfunction]
#[pyo3(signature = (spec, drive, j, method = "analytic", rtol = dynamics::DEFAULT_RTOL, atol = dynamics::DEFAULT_ATOL))]
fn evolve(
    spec: &PyCircuitSpec,
    drive: &PyDriveSpec,
    j: i64,
    method: &str,
    rtol: f64,
    atol: f64,
) -> PyResult<PyBogoliubov> {
    let (r, drift) = match parse_method(method)? {
        Method::AnalyticMultiscale => (
            dynamics::analytic_bogoliubov(&spec.inner, &drive.inner, j).map_err(value_err)?,
            None,
        ),
        Method::NumericOde => {
            let opts = IntegratorOptions { rtol, atol, ..IntegratorOptions::default() };
            let (r, traj) = dynamics::numeric_bogoliubov(&spec.inner, &drive.inner, j, &opts).map_err(runtime_err)?;
            (r, Some(traj.max_wronskian_drift()))
        }
    };
    Ok(PyBogoliubov {
        mode: r.mode,
        alpha: r.alpha,
        beta: r.beta,
        method: r.method.name(),
        tau: r.tau,
        resonant: r.resonant,
        max_wronskian_drift: drift,
    })
}

/// Resonant sweep over `j = 1..N/2`; one dict per row.
#[pyfunction]
#[pyo3(signature = (spec, tau, method = "analytic", eta = None, numeric_mode_cap = None))]
fn sweep<'py>(
    py: Python<'py>,
    spec: &PyCircuitSpec,
    tau: f64,
    method: &str,
    eta: Option<f64>,
    numeric_mode_cap: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let opts = SweepOptions {
        methods: vec![parse_method(method)?],
        eta,
        numeric_mode_cap,
        ..SweepOptions::default()
    };
    let specs = [spec.inner.clone()];
    let result = py
        .detach(|| observables::sweep_spectrum(&specs, tau, &opts))
        .map_err(runtime_err)?;
    result[0]
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("j", r.j)?;
            d.set_item("omega0", r.omega0)?;
            d.set_item("epsilon_over_hbar", r.epsilon_over_hbar)?;
            d.set_item("Omega", r.omega_drive)?;
            d.set_item("N", r.n)?;
            d.set_item("log10N", r.log10_n)?;
            d.set_item("E_over_hbar", r.e_over_hbar)?;
            d.set_item("method", r.method.name())?;
            Ok(d)
        })
        .collect()
}

/// `(j, k·Δx, ω0, ε/ħ)` over the positive branch.
#[pyfunction]
fn dispersion_table(spec: &PyCircuitSpec) -> PyResult<Vec<(i64, f64, f64, f64)>> {
    let rows = observables::dispersion_table(std::slice::from_ref(&spec.inner), true).map_err(value_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.j, r.k_dx, r.omega0, r.epsilon_over_hbar.unwrap_or(f64::NAN)))
        .collect())
}

#[pymodule(name = "tline_dce")]
fn tline_dce_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuitSpec>()?;
    m.add_class::<PyModeSet>()?;
    m.add_class::<PyDriveSpec>()?;
    m.add_class::<PyBogoliubov>()?;
    m.add_function(wrap_pyfunction!(particle_number, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_table, m)?)?;
    m.add("FAMILIES", ("LHTL1", "LHTL2", "RHTL1", "RHTL2"))?;
    Ok(())
}
