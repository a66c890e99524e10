//! Python bindings for the radial critical wave equation laboratory.
//!
//! The module mirrors the core building blocks — grids, initial data, the
//! leapfrog evolution, the d'Alembert oracle, energy functionals and the
//! experiment registry — behind thin wrapper classes that move data as plain
//! Python lists of floats.

use nlw_core::config::RunConfig;
use nlw_core::free_wave::DalembertOracle;
use nlw_core::grid::{Field, FieldState, RadialGrid};
use nlw_core::initial_data::{self, DataMode, InitialData};
use nlw_core::solver::{self, SolverConfig};
use nlw_core::{experiments, functionals, report};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: nlw_core::NlwError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<DataMode> {
    match mode {
        "displacement" => Ok(DataMode::Displacement),
        "velocity" => Ok(DataMode::Velocity),
        other => Err(PyValueError::new_err(format!(
            "data mode must be \"displacement\" or \"velocity\", got {other:?}"
        ))),
    }
}

/// Uniform radial mesh on `[0, r_max]` in dimension `n_dim >= 3`.
#[pyclass(name = "Grid", skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: RadialGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n_dim: u32, dr: f64, r_max: f64) -> PyResult<Self> {
        Ok(PyGrid {
            inner: RadialGrid::new(n_dim, dr, r_max).map_err(err)?,
        })
    }

    #[getter]
    fn n_dim(&self) -> u32 {
        self.inner.n_dim
    }

    #[getter]
    fn dr(&self) -> f64 {
        self.inner.dr
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.inner.r_max
    }

    /// Node radii `0, dr, 2 dr, ..., r_max`.
    fn radii(&self) -> Vec<f64> {
        (0..self.inner.len()).map(|i| self.inner.r(i)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `integral_{B_R} q(|x|) dx` of nodal values by trapezoidal quadrature;
    /// `radius=None` integrates over the whole domain.
    #[pyo3(signature = (values, radius=None))]
    fn integrate_ball(&self, values: Vec<f64>, radius: Option<f64>) -> PyResult<f64> {
        if values.len() != self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "expected {} nodal values, got {}",
                self.inner.len(),
                values.len()
            )));
        }
        Ok(self.inner.integrate_ball(&Field(values), radius))
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(n_dim={}, dr={}, r_max={})",
            self.inner.n_dim, self.inner.dr, self.inner.r_max
        )
    }
}

/// A snapshot `(u, u_t)` of the field at time `t`.
#[pyclass(name = "State", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: FieldState,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(u: Vec<f64>, ut: Vec<f64>, t: f64) -> PyResult<Self> {
        if u.len() != ut.len() {
            return Err(PyValueError::new_err(format!(
                "u has {} nodes but ut has {}",
                u.len(),
                ut.len()
            )));
        }
        Ok(PyState {
            inner: FieldState::new(Field(u), Field(ut), t),
        })
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.u.0.clone()
    }

    #[getter]
    fn ut(&self) -> Vec<f64> {
        self.inner.ut.0.clone()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    fn __repr__(&self) -> String {
        format!("State(t={}, nodes={})", self.inner.t, self.inner.u.len())
    }
}

/// Initial data `(f, g)` for the Cauchy problem.
#[pyclass(name = "Data", skip_from_py_object)]
#[derive(Clone)]
struct PyData {
    inner: InitialData,
}

#[pymethods]
impl PyData {
    #[new]
    fn new(f: Vec<f64>, g: Vec<f64>) -> PyResult<Self> {
        if f.len() != g.len() {
            return Err(PyValueError::new_err(format!(
                "f has {} nodes but g has {}",
                f.len(),
                g.len()
            )));
        }
        Ok(PyData {
            inner: InitialData {
                f: Field(f),
                g: Field(g),
                support_radius: None,
            },
        })
    }

    /// Gaussian bump `amplitude * exp(-(r/width)^2)` in the chosen component.
    #[staticmethod]
    #[pyo3(signature = (grid, amplitude, width, mode="displacement"))]
    fn gaussian(grid: &PyGrid, amplitude: f64, width: f64, mode: &str) -> PyResult<Self> {
        let data = initial_data::gaussian_bump(&grid.inner, amplitude, width, parse_mode(mode)?)
            .map_err(err)?;
        Ok(PyData { inner: data })
    }

    /// Compactly supported smooth bump of radius `rho`.
    #[staticmethod]
    #[pyo3(signature = (grid, amplitude, rho, mode="displacement"))]
    fn compact(grid: &PyGrid, amplitude: f64, rho: f64, mode: &str) -> PyResult<Self> {
        let data = initial_data::compact_bump(&grid.inner, amplitude, rho, parse_mode(mode)?)
            .map_err(err)?;
        Ok(PyData { inner: data })
    }

    /// `alpha` times the static ground-state profile, with zero velocity.
    #[staticmethod]
    fn ground_state(grid: &PyGrid, alpha: f64) -> Self {
        PyData {
            inner: initial_data::scaled_ground_state(&grid.inner, alpha),
        }
    }

    #[getter]
    fn f(&self) -> Vec<f64> {
        self.inner.f.0.clone()
    }

    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.0.clone()
    }

    /// The data as a time-zero state.
    fn state(&self) -> PyState {
        PyState {
            inner: self.inner.state(),
        }
    }

    /// Conserved energy of the data for coupling `lambda`.
    fn energy(&self, grid: &PyGrid, lambda: f64) -> f64 {
        initial_data::data_energy(&grid.inner, &self.inner, lambda)
    }
}

/// Outcome of an evolution: final state, sampled states, step count, and the
/// blow-up stop time if the amplitude escaped.
#[pyclass(name = "Run")]
struct PyRun {
    #[pyo3(get)]
    steps: usize,
    #[pyo3(get)]
    dt: f64,
    #[pyo3(get)]
    blowup_time: Option<f64>,
    final_state: FieldState,
    samples: Vec<FieldState>,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn final_state(&self) -> PyState {
        PyState {
            inner: self.final_state.clone(),
        }
    }

    #[getter]
    fn samples(&self) -> Vec<PyState> {
        self.samples
            .iter()
            .map(|s| PyState { inner: s.clone() })
            .collect()
    }
}

/// Evolve initial data with the leapfrog scheme to time `t_max`. The
/// nonlinearity is `-lambda u |u|^{2*-2}`; `cfl = dt/dr` must respect the
/// origin-rule stability limit `max_cfl(n_dim)`. `sample_stride > 0` records
/// every that-many-th state (plus the initial one) in `Run.samples`.
#[pyfunction]
#[pyo3(signature = (grid, data, lambda, t_max, cfl=0.5, sample_stride=0))]
fn evolve(
    grid: &PyGrid,
    data: &PyData,
    lambda: f64,
    t_max: f64,
    cfl: f64,
    sample_stride: usize,
) -> PyResult<PyRun> {
    let cfg = SolverConfig { lambda, cfl };
    let mut samples: Vec<FieldState> = Vec::new();
    let mut seen = 0usize;
    let mut sampler = |_g: &RadialGrid, s: &FieldState| {
        if sample_stride > 0 {
            if seen.is_multiple_of(sample_stride) {
                samples.push(s.clone());
            }
            seen += 1;
        }
    };
    let traj =
        solver::evolve(&grid.inner, &data.inner, &cfg, t_max, &mut [&mut sampler]).map_err(err)?;
    Ok(PyRun {
        steps: traj.steps,
        dt: traj.dt,
        blowup_time: traj.blowup.map(|b| b.t),
        final_state: traj.final_state,
        samples,
    })
}

/// Exact free-wave (`lambda = 0`, `n = 3`) state of the data at time `t`,
/// from the closed-form spherical-means propagator.
#[pyfunction]
fn free_state(grid: &PyGrid, data: &PyData, t: f64) -> PyResult<PyState> {
    let oracle = DalembertOracle::from_data(&grid.inner, &data.inner).map_err(err)?;
    Ok(PyState {
        inner: oracle.state(&grid.inner, t).map_err(err)?,
    })
}

/// Energy split of a state over the ball of radius `radius` (`None` = whole
/// domain): a dict with `kinetic`, `gradient`, `potential`, `total`, `t`.
#[pyfunction]
#[pyo3(signature = (grid, state, lambda, radius=None))]
fn energy(
    py: Python<'_>,
    grid: &PyGrid,
    state: &PyState,
    lambda: f64,
    radius: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let e = functionals::energy_in_ball(&grid.inner, &state.inner, lambda, radius);
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("kinetic", e.kinetic)?;
    dict.set_item("gradient", e.gradient)?;
    dict.set_item("potential", e.potential)?;
    dict.set_item("total", e.total)?;
    dict.set_item("t", e.t)?;
    Ok(dict.into_any().unbind())
}

/// `integral (u_t^2 - |grad u|^2) dx`, the quantity driven to zero in time
/// average by the free dispersion.
#[pyfunction]
fn equipartition_defect(grid: &PyGrid, state: &PyState) -> f64 {
    functionals::equipartition_defect(&grid.inner, &state.inner)
}

/// Critical Lebesgue norm `||u(t)||_{L^{2*}}`.
#[pyfunction]
fn l2star_norm(grid: &PyGrid, state: &PyState) -> f64 {
    functionals::l2star_norm(&grid.inner, &state.inner)
}

/// Critical Sobolev exponent `2n/(n-2)`.
#[pyfunction]
fn two_star(n_dim: u32) -> f64 {
    functionals::two_star(n_dim)
}

/// Largest stable Courant ratio `dt/dr` for the scheme in dimension `n_dim`.
#[pyfunction]
fn max_cfl(n_dim: u32) -> f64 {
    solver::max_cfl(n_dim)
}

/// Names of all registered experiments.
#[pyfunction]
fn list_experiments() -> Vec<String> {
    experiments::REGISTRY
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn build_config(overrides: Vec<String>) -> PyResult<RunConfig> {
    let mut cfg = RunConfig::default();
    for assignment in &overrides {
        cfg.apply_set(assignment).map_err(err)?;
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Run one experiment. `overrides` are `"key = value"` assignments on top of
/// the default configuration. Returns the full report as a JSON string
/// (schema-stable; parse with `json.loads`).
#[pyfunction]
#[pyo3(signature = (name, overrides=vec![]))]
fn run_experiment(py: Python<'_>, name: &str, overrides: Vec<String>) -> PyResult<String> {
    let mut cfg = build_config(overrides)?;
    cfg.experiment = name.to_string();
    let report = py.detach(|| experiments::run(name, &cfg)).map_err(err)?;
    Ok(serde_json::to_string(&report).expect("report serialization is infallible"))
}

/// Canonical `key = value` serialization of the default configuration with
/// the given overrides applied.
#[pyfunction]
#[pyo3(signature = (overrides=vec![]))]
fn config_text(overrides: Vec<String>) -> PyResult<String> {
    Ok(build_config(overrides)?.serialize())
}

/// Content hash naming the artifacts a configuration produces.
#[pyfunction]
#[pyo3(signature = (overrides=vec![]))]
fn config_hash(overrides: Vec<String>) -> PyResult<String> {
    Ok(report::config_hash(&build_config(overrides)?))
}

#[pymodule]
fn nlw_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyData>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(free_state, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(equipartition_defect, m)?)?;
    m.add_function(wrap_pyfunction!(l2star_norm, m)?)?;
    m.add_function(wrap_pyfunction!(two_star, m)?)?;
    m.add_function(wrap_pyfunction!(max_cfl, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(config_text, m)?)?;
    m.add_function(wrap_pyfunction!(config_hash, m)?)?;
    Ok(())
}
