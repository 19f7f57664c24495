//! Python bindings for the `tripleline` crate.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tripleline::contact_line::{
    classical_young_residual, line_force_residual, modified_young_residual, ConormalStress,
    ContactAngles, LineConfig, RelativeDeformation, Side, YoungForm,
};
use tripleline::fields::{apply_scaling, ray_limit_named, scaled_displacement, FieldSample, Limit};
use tripleline::potentials::{eval_potentials, Material};
use tripleline::scaling::{build_problem, ScaledProblem};
use tripleline::suite::{run_suite, SuiteConfig};
use tripleline::verification::{elastic_energy, QuadratureSpec};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Isotropic plane-strain material.
#[pyclass(
    name = "Material",
    module = "pytripleline",
    frozen,
    skip_from_py_object
)]
#[derive(Clone, Copy)]
struct PyMaterial {
    inner: Material,
}

#[pymethods]
impl PyMaterial {
    #[new]
    fn new(lam: f64, mu: f64) -> PyResult<Self> {
        Material::new(lam, mu)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    #[getter]
    fn kolosov(&self) -> f64 {
        self.inner.kolosov()
    }

    fn __repr__(&self) -> String {
        format!(
            "Material(lam={}, mu={})",
            self.inner.lambda(),
            self.inner.mu()
        )
    }
}

/// Physical problem assembled from the line balance.
#[pyclass(name = "Problem", module = "pytripleline", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyProblem {
    material: Material,
    inner: ScaledProblem,
}

fn sample_dict<'py>(
    py: Python<'py>,
    z: Complex64,
    s: &FieldSample,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("z", z)?;
    d.set_item("u", s.u)?;
    let g = s.grad_u;
    d.set_item("grad_u", [[g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]])?;
    let strain = PyDict::new(py);
    strain.set_item("xx", s.strain.xx)?;
    strain.set_item("yy", s.strain.yy)?;
    strain.set_item("xy", s.strain.xy)?;
    d.set_item("strain", strain)?;
    let stress = PyDict::new(py);
    stress.set_item("xx", s.stress.xx)?;
    stress.set_item("yy", s.stress.yy)?;
    stress.set_item("xy", s.stress.xy)?;
    stress.set_item("zz", s.stress.zz)?;
    d.set_item("stress", stress)?;
    Ok(d)
}

#[pymethods]
impl PyProblem {
    #[getter]
    fn material(&self) -> PyMaterial {
        PyMaterial {
            inner: self.material,
        }
    }
    #[getter]
    fn a_prime(&self) -> f64 {
        self.inner.a_prime
    }
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }
    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }

    /// Prescribed boundary displacement `-a / (|y| + b)`.
    fn boundary_displacement(&self, y: f64) -> f64 {
        self.inner.boundary_displacement(y)
    }

    /// Physical displacement `ux + i uy`.
    fn displacement(&self, z: Complex64) -> PyResult<Complex64> {
        scaled_displacement(&self.inner, &self.material, z).map_err(value_error)
    }

    /// Physical displacement gradient, strain and stress.
    fn fields<'py>(&self, py: Python<'py>, z: Complex64) -> PyResult<Bound<'py, PyDict>> {
        let s = apply_scaling(&self.inner, &self.material, z).map_err(value_error)?;
        sample_dict(py, z, &s)
    }
}

/// `[F, F', F'', F''']`, with `None` where an entry is undefined.
#[pyfunction]
fn potentials(z: Complex64, material: &PyMaterial) -> PyResult<Vec<Option<Complex64>>> {
    let chain = eval_potentials(z, &material.inner).map_err(value_error)?;
    Ok((0..4).map(|n| chain.f(n)).collect())
}

/// Unscaled fields at `z != 0`.
#[pyfunction]
fn fields<'py>(
    py: Python<'py>,
    z: Complex64,
    material: &PyMaterial,
) -> PyResult<Bound<'py, PyDict>> {
    let s = FieldSample::eval(z, &material.inner).map_err(value_error)?;
    sample_dict(py, z, &s)
}

/// Limit of a strain or stress component along the ray at angle `theta`:
/// a float, `inf`, or `None` when the limit depends on the direction.
#[pyfunction]
fn ray_limit(theta: f64, material: &PyMaterial, component: &str) -> PyResult<Option<f64>> {
    Ok(
        match ray_limit_named(theta, &material.inner, component).map_err(value_error)? {
            Limit::Finite(v) => Some(v),
            Limit::PlusInfinity => Some(f64::INFINITY),
            Limit::DirectionDependent => None,
        },
    )
}

#[pyfunction]
#[pyo3(name = "build_problem", signature = (sigma_l, sigma_s, lam=1.0, mu=1.0, a_prime=None, b=1.0))]
fn py_build_problem(
    sigma_l: f64,
    sigma_s: f64,
    lam: f64,
    mu: f64,
    a_prime: Option<f64>,
    b: f64,
) -> PyResult<PyProblem> {
    let (material, inner) =
        build_problem(sigma_l, sigma_s, lam, mu, a_prime, b).map_err(value_error)?;
    Ok(PyProblem { material, inner })
}

/// Elastic energy of the truncated half-disk: `(value, error)`.
#[pyfunction]
#[pyo3(name = "elastic_energy", signature = (material, eps, r0=1.0))]
fn py_elastic_energy(material: &PyMaterial, eps: f64, r0: f64) -> PyResult<(f64, f64)> {
    let q = QuadratureSpec {
        r0,
        eps,
        ..QuadratureSpec::default()
    };
    let e = elastic_energy(&material.inner, &q).map_err(value_error)?;
    Ok((e.value, e.error))
}

/// Run the verification criteria for a problem; returns
/// `(id, name, status, detail)` tuples.
#[pyfunction]
#[pyo3(signature = (problem, only=None, tolerance_scale=1.0))]
fn verify(
    problem: &PyProblem,
    only: Option<&str>,
    tolerance_scale: f64,
) -> PyResult<Vec<(u8, String, String, String)>> {
    let group = only
        .map(str::parse)
        .transpose()
        .map_err(PyValueError::new_err)?;
    let mut cfg = SuiteConfig::new(problem.material, problem.inner);
    cfg.tolerance_scale = tolerance_scale;
    Ok(run_suite(&cfg, group)
        .into_iter()
        .map(|o| (o.id, o.name, o.status.to_string(), o.detail))
        .collect())
}

/// Residuals of the line equations. Each side is `(energy, normal, shear)`;
/// angles are `(first_fluid, second_fluid, body)`; `relative` holds the
/// normal and shear components of the relative deformation.
#[pyfunction]
#[pyo3(signature = (first, second, tension, angles, relative=(1.0, 0.0)))]
fn line_residuals<'py>(
    py: Python<'py>,
    first: (f64, f64, f64),
    second: (f64, f64, f64),
    tension: f64,
    angles: (f64, f64, f64),
    relative: (f64, f64),
) -> PyResult<Bound<'py, PyDict>> {
    let side = |(energy, normal, shear): (f64, f64, f64)| Side {
        energy,
        stress: ConormalStress { normal, shear },
    };
    let c = LineConfig::new(
        side(first),
        side(second),
        tension,
        ContactAngles {
            first_fluid: angles.0,
            second_fluid: angles.1,
            body: angles.2,
        },
        RelativeDeformation {
            normal: relative.0,
            shear: relative.1,
        },
    )
    .map_err(value_error)?;
    let d = PyDict::new(py);
    let f = line_force_residual(&c);
    d.set_item("force", [f.x, f.y, f.z])?;
    for (key, form) in [
        ("stresses", YoungForm::Stresses),
        ("sines", YoungForm::Sines),
        ("cosines", YoungForm::Cosines),
    ] {
        d.set_item(key, modified_young_residual(&c, form).ok())?;
    }
    d.set_item("classical", classical_young_residual(&c))?;
    Ok(d)
}

#[pymodule]
fn pytripleline(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaterial>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(potentials, m)?)?;
    m.add_function(wrap_pyfunction!(fields, m)?)?;
    m.add_function(wrap_pyfunction!(ray_limit, m)?)?;
    m.add_function(wrap_pyfunction!(py_build_problem, m)?)?;
    m.add_function(wrap_pyfunction!(py_elastic_energy, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(line_residuals, m)?)?;
    Ok(())
}
