//! Python bindings: the main types and operations of the separability
//! toolkit, exposed as the `sepprob` extension module.
//!
//! Exact rationals cross the boundary as "p/q" strings; matrices as nested
//! `[re, im]` lists; experiment and battery reports as JSON-compatible dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use sepprob_core::chi::{chi1_closed, chi_poly_coeffs, ChiEvaluator};
use sepprob_core::harness::{run_experiment, Ensemble, ExperimentConfig};
use sepprob_core::prob;
use sepprob_core::rational::rat;
use sepprob_core::real::Prec;
use sepprob_core::states;
use sepprob_core::states::linalg::CMat;
use sepprob_core::states::rng::RngStream;
use sepprob_core::verify;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn prec() -> Prec {
    Prec::from_env()
}

/// Unit-trace positive-semidefinite matrix with the block structure the
/// partial-transpose test applies to.
#[pyclass(name = "DensityMatrix")]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Build from a nested list of [re, im] pairs (or bare floats).
    #[new]
    fn new(entries: Vec<Vec<Py<PyAny>>>, py: Python<'_>) -> PyResult<Self> {
        let n = entries.len();
        if n != 4 && n != 6 {
            return Err(PyValueError::new_err("dimension must be 4 or 6"));
        }
        let mut mat = CMat::zero(n);
        let mut any_imag = false;
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(PyValueError::new_err("matrix must be square"));
            }
            for (j, cell) in row.iter().enumerate() {
                let bound = cell.bind(py);
                let c = if let Ok(x) = bound.extract::<f64>() {
                    Complex64::new(x, 0.0)
                } else if let Ok((re, im)) = bound.extract::<(f64, f64)>() {
                    Complex64::new(re, im)
                } else if let Ok(v) = bound.extract::<Vec<f64>>() {
                    if v.len() != 2 {
                        return Err(PyValueError::new_err("complex cells are [re, im]"));
                    }
                    Complex64::new(v[0], v[1])
                } else {
                    // python complex
                    let re: f64 = bound.getattr("real")?.extract()?;
                    let im: f64 = bound.getattr("imag")?.extract()?;
                    Complex64::new(re, im)
                };
                if c.im != 0.0 {
                    any_imag = true;
                }
                mat.a[i][j] = c;
            }
        }
        let field = if any_imag {
            states::FieldKind::Complex
        } else {
            states::FieldKind::Real
        };
        let dm = states::DensityMatrix { mat, field };
        dm.validate().map_err(err)?;
        Ok(PyDensityMatrix { inner: dm })
    }

    fn is_ppt(&self) -> bool {
        states::is_ppt(&self.inner)
    }

    fn negative_eigenvalue_count(&self) -> PyResult<u32> {
        let pt = states::partial_transpose(&self.inner.mat);
        states::negative_eigenvalue_count(&pt, states::PSD_TOL).map_err(err)
    }

    /// Singular-value ratio eps of V = D2^(1/2) D1^(-1/2) (pair for 6x6).
    fn sigma_ratio(&self) -> PyResult<(f64, Option<f64>)> {
        let s = states::sigma_ratio(&self.inner).map_err(err)?;
        Ok((s.eps, s.eps2))
    }

    fn mu_ratio(&self) -> PyResult<f64> {
        states::mu_ratio(&self.inner).map_err(err)
    }

    fn entries(&self, py: Python<'_>) -> PyResult<Py<PyList>> {
        let n = self.inner.n();
        let rows = PyList::empty(py);
        for i in 0..n {
            let row = PyList::empty(py);
            for j in 0..n {
                let c = self.inner.mat.a[i][j];
                row.append((c.re, c.im))?;
            }
            rows.append(row)?;
        }
        Ok(rows.into())
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityMatrix(n={}, field={:?})",
            self.inner.n(),
            self.inner.field
        )
    }
}

/// Exact separability probability P(d) as "p/q" (even d).
#[pyfunction]
fn prob_dunkl_exact(d: u32) -> PyResult<String> {
    Ok(format!("{}", prob::prob_dunkl_exact(d).map_err(err)?))
}

/// Ansatz-denominator normalization as "p/q".
#[pyfunction]
fn denominator_exact(d: u32) -> PyResult<String> {
    Ok(format!("{}", prob::denominator_exact(d).map_err(err)?))
}

/// Concise-series probability at alpha = alpha_num/alpha_den.
#[pyfunction]
#[pyo3(signature = (alpha_num, alpha_den=1, tol=1e-12))]
fn prob_concise(alpha_num: i64, alpha_den: i64, tol: f64) -> PyResult<f64> {
    let r = prob::prob_concise(&rat(alpha_num, alpha_den), tol, prec()).map_err(err)?;
    Ok(r.value.to_f64())
}

#[pyfunction]
#[pyo3(signature = (d, tol=1e-8))]
fn prob_induced_6f5(d: u32, tol: f64) -> PyResult<f64> {
    Ok(prob::prob_induced_6f5(d, tol, prec()).map_err(err)?.to_f64())
}

#[pyfunction]
#[pyo3(signature = (d, tol=1e-10))]
fn prob_via_t_integral(d: u32, tol: f64) -> PyResult<f64> {
    Ok(prob::prob_via_t_integral(d, tol, prec())
        .map_err(err)?
        .to_f64())
}

/// All applicable formulas at one d, as a dict.
#[pyfunction]
#[pyo3(signature = (d, tol=1e-8))]
fn prob_all(py: Python<'_>, d: u32, tol: f64) -> PyResult<Py<PyDict>> {
    let rep = prob::single_report(d, tol, prec()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("d", rep.d)?;
    out.set_item("value_dunkl", rep.value_dunkl)?;
    out.set_item("value_concise", rep.value_concise)?;
    out.set_item("value_6f5", rep.value_6f5)?;
    out.set_item("value_integral", rep.value_integral)?;
    out.set_item("value_ansatz2d", rep.value_ansatz2d)?;
    out.set_item("max_pairwise_dev", rep.max_pairwise_dev)?;
    Ok(out.into())
}

/// chi_d(eps).
#[pyfunction]
fn chi(d: u32, eps: f64) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(PyValueError::new_err("eps must lie in [0, 1]"));
    }
    let ev = ChiEvaluator::new(d, prec()).map_err(err)?;
    Ok(ev.eval(&prec().f64(eps)).to_f64())
}

/// chi_1 closed polylog form.
#[pyfunction]
fn chi1(eps: f64) -> PyResult<f64> {
    Ok(chi1_closed(&prec().f64(eps), prec()).map_err(err)?.to_f64())
}

/// Exact chi_d coefficients (even d) as "p/q" strings on powers d, d+2, ...
#[pyfunction]
fn chi_coeffs(d: u32) -> PyResult<Vec<String>> {
    Ok(chi_poly_coeffs(d)
        .map_err(err)?
        .iter()
        .map(|c| format!("{}", c))
        .collect())
}

/// Hilbert-Schmidt random density matrix (Ginibre).
#[pyfunction]
#[pyo3(signature = (field="complex", n=4, seed=0, stream=0))]
fn sample_density_matrix(field: &str, n: usize, seed: u64, stream: u64) -> PyResult<PyDensityMatrix> {
    let f = match field {
        "real" => states::FieldKind::Real,
        "complex" => states::FieldKind::Complex,
        _ => return Err(PyValueError::new_err("field is 'real' or 'complex'")),
    };
    let mut rng = RngStream::new(seed, stream);
    Ok(PyDensityMatrix {
        inner: states::sample_hs_ginibre(f, n, &mut rng),
    })
}

/// Monte Carlo experiment; returns the summary dict.
#[pyfunction]
#[pyo3(signature = (ensemble, n, seed=0, workers=2, bins=200))]
fn sample_experiment(
    py: Python<'_>,
    ensemble: &str,
    n: u64,
    seed: u64,
    workers: u32,
    bins: usize,
) -> PyResult<Py<PyDict>> {
    let mut cfg = ExperimentConfig::new(Ensemble::parse(ensemble).map_err(err)?, n, seed);
    cfg.worker_count = workers;
    cfg.bin_count = bins;
    let r = run_experiment(&cfg).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("ensemble", cfg.ensemble.name())?;
    out.set_item("total", r.total)?;
    out.set_item("separable", r.separable)?;
    out.set_item("p_hat", r.p_hat)?;
    out.set_item("stderr", r.stderr)?;
    out.set_item("neg2_fraction", r.neg2_fraction)?;
    out.set_item("dominance_violations", r.dominance_violations)?;
    Ok(out.into())
}

/// Verification battery; returns the report as a dict (via JSON).
#[pyfunction]
#[pyo3(signature = (suite="exact", mc_samples=200_000))]
fn run_battery(py: Python<'_>, suite: &str, mc_samples: u64) -> PyResult<Py<PyAny>> {
    let suites = match suite {
        "all" => vec!["exact".into(), "numeric".into(), "mc".into()],
        s @ ("exact" | "numeric" | "mc") => vec![s.to_string()],
        _ => return Err(PyValueError::new_err("suite: exact|numeric|mc|all")),
    };
    let opts = verify::BatteryOptions {
        suites,
        mc_samples,
        workers: 2,
        seed: 2024,
        inject_failure: None,
        prec: prec(),
    };
    let report = verify::run_full_battery(&opts).map_err(err)?;
    let json = serde_json::to_string(&report).map_err(err)?;
    let loads = py.import("json")?.getattr("loads")?;
    Ok(loads.call1((json,))?.unbind())
}

#[pymodule]
fn sepprob(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(prob_dunkl_exact, m)?)?;
    m.add_function(wrap_pyfunction!(denominator_exact, m)?)?;
    m.add_function(wrap_pyfunction!(prob_concise, m)?)?;
    m.add_function(wrap_pyfunction!(prob_induced_6f5, m)?)?;
    m.add_function(wrap_pyfunction!(prob_via_t_integral, m)?)?;
    m.add_function(wrap_pyfunction!(prob_all, m)?)?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(chi1, m)?)?;
    m.add_function(wrap_pyfunction!(chi_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(sample_density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(sample_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_battery, m)?)?;
    Ok(())
}
