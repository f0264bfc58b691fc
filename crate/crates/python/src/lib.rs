//! Python module `zonopolar_py`. Scalars come back as floats and bools,
//! documents (distributions, certificates) as JSON strings.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use zonopolar::barrel;
use zonopolar::certify::{nnls_certify, threshold_sweep, CertifySpec, SweepMode};
use zonopolar::distributions::{LatitudeMeasure, SphericalDistributionRS};
use zonopolar::numerics::QuadratureSpec;
use zonopolar::profiles::{self, AngleProfile, BarrelParams};
use zonopolar::transforms::{cosine_forward, generating_distribution_pipeline};
use zonopolar::verify::run_suite;
use zonopolar::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn params(n: usize, r: f64) -> Result<BarrelParams, Error> {
    BarrelParams::new(n, r)
}

fn norm_from(r: Option<f64>, norm: &str) -> Result<AngleProfile, Error> {
    match (norm, r) {
        ("euclidean", _) => Ok(AngleProfile::euclidean()),
        ("barrel", Some(r)) => AngleProfile::barrel_norm(r),
        ("barrel", None) => Err(Error::Malformed("the barrel norm needs r".into())),
        (other, _) => Err(Error::Malformed(format!("unknown norm {other}"))),
    }
}

fn sweep_mode(mode: &str) -> Result<SweepMode, Error> {
    match mode {
        "closed-form" | "closed_form" => Ok(SweepMode::ClosedForm),
        "nnls" => Ok(SweepMode::Nnls),
        other => Err(Error::Malformed(format!("unknown sweep mode {other}"))),
    }
}

/// Norm of `B_{n,r}` in the direction at polar angle `phi`.
#[pyfunction]
#[pyo3(signature = (r, phi, n = 3))]
fn barrel_norm(r: f64, phi: f64, n: usize) -> PyResult<f64> {
    profiles::barrel_norm_profile(&params(n, r).map_err(to_py)?, phi).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r, phi, n = 3))]
fn barrel_support(r: f64, phi: f64, n: usize) -> PyResult<f64> {
    profiles::barrel_support_profile(&params(n, r).map_err(to_py)?, phi).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r, phi, n = 3))]
fn polar_radial(r: f64, phi: f64, n: usize) -> PyResult<f64> {
    profiles::polar_radial_profile(&params(n, r).map_err(to_py)?, phi).map_err(to_py)
}

/// Gauge of `B_{n,r}` at `point`, with `n = len(point)`.
#[pyfunction]
fn gauge(r: f64, point: Vec<f64>) -> PyResult<f64> {
    profiles::gauge(&params(point.len(), r).map_err(to_py)?, &point).map_err(to_py)
}

#[pyfunction]
fn breakpoint_x(r: f64) -> PyResult<f64> {
    barrel::breakpoint_x(r).map_err(to_py)
}

#[pyfunction]
fn g_profile(r: f64, x: f64) -> PyResult<f64> {
    barrel::g_profile(r, x).map_err(to_py)
}

#[pyfunction]
fn jump_constant(r: f64) -> f64 {
    barrel::jump_constant_c(r)
}

#[pyfunction]
fn atom_weight(r: f64) -> f64 {
    barrel::atom_weight(r)
}

#[pyfunction]
fn is_polar_zonoid(r: f64) -> PyResult<bool> {
    barrel::is_polar_zonoid(r).map_err(to_py)
}

fn distribution(r: f64, mode: &str) -> Result<SphericalDistributionRS, Error> {
    match mode {
        "closed" => barrel::generating_distribution_closed(r),
        "pipeline" => generating_distribution_pipeline(&AngleProfile::barrel_norm(r)?, 4),
        other => Err(Error::Malformed(format!("unknown mode {other}"))),
    }
}

/// Generating distribution of `B_{4,r}` as JSON (`mode` is `closed` or
/// `pipeline`).
#[pyfunction]
#[pyo3(signature = (r, mode = "closed"))]
fn generating_distribution(r: f64, mode: &str) -> PyResult<String> {
    json(&distribution(r, mode).map_err(to_py)?)
}

/// Cosine transform at height `t` of a distribution given as JSON; fails
/// unless it is a positive measure.
#[pyfunction]
fn cosine_transform(distribution_json: &str, t: f64) -> PyResult<f64> {
    let d: SphericalDistributionRS = serde_json::from_str(distribution_json)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mu = LatitudeMeasure::from_distribution(&d).map_err(to_py)?;
    cosine_forward(&mu, t, &QuadratureSpec::default()).map_err(to_py)
}

/// Certificate report as JSON.
#[pyfunction]
#[pyo3(signature = (r = None, norm = "barrel", n = 4, lat_grid = 200, t_grid = 400))]
fn certify(
    r: Option<f64>,
    norm: &str,
    n: usize,
    lat_grid: usize,
    t_grid: usize,
) -> PyResult<String> {
    let f = norm_from(r, norm).map_err(to_py)?;
    let spec = CertifySpec {
        lat_grid,
        t_grid,
        ..Default::default()
    };
    json(&nnls_certify(&f, n, &spec).map_err(to_py)?)
}

/// Estimated threshold radius.
#[pyfunction]
#[pyo3(signature = (lo = 0.5, hi = 1.5, tol = 1e-6, mode = "closed-form"))]
fn sweep(lo: f64, hi: f64, tol: f64, mode: &str) -> PyResult<f64> {
    let mode = sweep_mode(mode).map_err(to_py)?;
    let rep = threshold_sweep(lo, hi, tol, mode, 4, &CertifySpec::default()).map_err(to_py)?;
    Ok(rep.r_star)
}

/// `(id, passed, measured, tolerance)` for each check in `suite`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = zonopolar::certify::DEFAULT_SEED))]
fn verify(suite: &str, seed: u64) -> PyResult<Vec<(String, bool, f64, f64)>> {
    let checks = run_suite(suite, seed).map_err(to_py)?;
    Ok(checks
        .into_iter()
        .map(|c| (c.id, c.passed, c.measured, c.tolerance))
        .collect())
}

#[pymodule]
fn zonopolar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(barrel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(barrel_support, m)?)?;
    m.add_function(wrap_pyfunction!(polar_radial, m)?)?;
    m.add_function(wrap_pyfunction!(gauge, m)?)?;
    m.add_function(wrap_pyfunction!(breakpoint_x, m)?)?;
    m.add_function(wrap_pyfunction!(g_profile, m)?)?;
    m.add_function(wrap_pyfunction!(jump_constant, m)?)?;
    m.add_function(wrap_pyfunction!(atom_weight, m)?)?;
    m.add_function(wrap_pyfunction!(is_polar_zonoid, m)?)?;
    m.add_function(wrap_pyfunction!(generating_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_transform, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_selection() {
        assert_eq!(
            norm_from(None, "euclidean").unwrap(),
            AngleProfile::euclidean()
        );
        assert!(norm_from(None, "barrel").is_err());
        assert!(norm_from(Some(1.0), "cube").is_err());
        assert_eq!(sweep_mode("nnls").unwrap(), SweepMode::Nnls);
        assert!(sweep_mode("x").is_err());
    }

    #[test]
    fn distribution_modes() {
        let c = distribution(1.0, "closed").unwrap();
        assert_eq!(c.atoms.len(), 1);
        let p = distribution(0.5, "pipeline").unwrap();
        assert!(p.is_measure());
        assert!(distribution(0.5, "other").is_err());
    }
}
