//! Python bindings: the main solver and audit entry points, with plain
//! dict/list return values.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::str::FromStr;

use plateau_core::audit::{torsion_flux_check, SurfaceDomain};
use plateau_core::bjorling::{
    bjorling_surface, continue_boundary, fit_helicoid_params, showcase_preset, CurvatureSource,
    FitMode,
};
use plateau_core::boundary::{alpha_zero_solution, classify_branch, BoundaryState};
use plateau_core::elastica::{buckled_ring_shoot, EnergyParams, RingGuess, RingTolerances};
use plateau_core::geom::darboux::{darboux_from_patch, UvCurve};
use plateau_core::geom::patch::{ConformalHelicoidPatch, PlanarDiskPatch};
use plateau_core::Sheet;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(sigma: f64, eta: f64, alpha: f64, beta: f64, relaxed: bool) -> PyResult<EnergyParams> {
    if relaxed {
        Ok(EnergyParams::relaxed(sigma, eta, alpha, beta))
    } else {
        EnergyParams::new(sigma, eta, alpha, beta).map_err(err)
    }
}

/// Real roots of the circle cubic alpha k^3 - beta k + sigma, as
/// (kappa, multiplicity) pairs, most negative first.
#[pyfunction]
fn circle_roots(sigma: f64, alpha: f64, beta: f64) -> PyResult<Vec<(f64, u8)>> {
    let p = params(sigma, 0.0, alpha, beta, false)?;
    let roots = plateau_core::elastica::circle_roots(&p).map_err(err)?;
    Ok(roots.roots.iter().map(|r| (r.kappa, r.multiplicity)).collect())
}

/// First integral d = (k')^2 + k^4/4 - (beta/2alpha) k^2 + (sigma/alpha) k.
#[pyfunction]
fn first_integral_d(sigma: f64, alpha: f64, beta: f64, kg: f64, kgp: f64) -> PyResult<f64> {
    let p = params(sigma, 0.0, alpha, beta, false)?;
    plateau_core::elastica::first_integral_d(&p, kg, kgp).map_err(err)
}

/// Integrate the planar curvature equation; returns a dict with the sampled
/// history, the first-integral constant, its drift, and the period if found.
#[pyfunction]
#[pyo3(signature = (sigma, alpha, beta, kg0, kgp0, length=50.0, step=1e-3))]
fn elastica_integrate(
    py: Python<'_>,
    sigma: f64,
    alpha: f64,
    beta: f64,
    kg0: f64,
    kgp0: f64,
    length: f64,
    step: f64,
) -> PyResult<Py<PyDict>> {
    let p = params(sigma, 0.0, alpha, beta, false)?;
    let sol =
        plateau_core::elastica::elastica_integrate(&p, kg0, kgp0, length, step).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("s", sol.samples.iter().map(|q| q.s).collect::<Vec<_>>())?;
    d.set_item("kg", sol.samples.iter().map(|q| q.kappa_g).collect::<Vec<_>>())?;
    d.set_item(
        "kgp",
        sol.samples.iter().map(|q| q.kappa_g_prime).collect::<Vec<_>>(),
    )?;
    d.set_item("d", sol.d)?;
    d.set_item("d_drift", sol.d_drift)?;
    d.set_item("period", sol.period)?;
    Ok(d.into())
}

/// Shoot for a closed buckled ring; returns closure, ODE residual, lobe
/// count, and the planar curve vertices.
#[pyfunction]
fn buckled_ring(
    py: Python<'_>,
    sigma: f64,
    alpha: f64,
    beta: f64,
    turning_number: i32,
    kg0: f64,
) -> PyResult<Py<PyDict>> {
    let p = params(sigma, 0.0, alpha, beta, false)?;
    let ring = buckled_ring_shoot(
        &p,
        turning_number,
        RingGuess {
            kappa_g0: kg0,
            period: None,
        },
        RingTolerances::default(),
    )
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("closure", ring.closure)?;
    d.set_item("ode_residual", ring.ode_residual)?;
    d.set_item("lobes", ring.lobes)?;
    d.set_item("iterations", ring.iterations)?;
    d.set_item(
        "xy",
        ring.curve
            .samples
            .iter()
            .map(|q| (q.position.x, q.position.y))
            .collect::<Vec<_>>(),
    )?;
    Ok(d.into())
}

/// Integrate the boundary equilibrium system; returns the trajectory, the
/// torsion invariant, its drift, and the branch tag.
#[pyfunction]
#[pyo3(signature = (sigma, eta, alpha, beta, kg0, kgp0, tg0, sheet="plus", length=50.0, step=1e-3, relaxed=false))]
#[allow(clippy::too_many_arguments)]
fn boundary_integrate(
    py: Python<'_>,
    sigma: f64,
    eta: f64,
    alpha: f64,
    beta: f64,
    kg0: f64,
    kgp0: f64,
    tg0: f64,
    sheet: &str,
    length: f64,
    step: f64,
    relaxed: bool,
) -> PyResult<Py<PyDict>> {
    let p = params(sigma, eta, alpha, beta, relaxed)?;
    let sheet = Sheet::from_str(sheet).map_err(err)?;
    let traj = plateau_core::boundary::boundary_integrate(
        &p,
        &BoundaryState::new(kg0, kgp0, tg0),
        sheet,
        length,
        step,
    )
    .map_err(err)?;
    let branch = classify_branch(&p, &traj.states, 1e-8).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("s", traj.states.iter().map(|q| q.s).collect::<Vec<_>>())?;
    d.set_item("kg", traj.states.iter().map(|q| q.kappa_g).collect::<Vec<_>>())?;
    d.set_item("tg", traj.states.iter().map(|q| q.tau_g).collect::<Vec<_>>())?;
    d.set_item("c", traj.c)?;
    d.set_item("c_drift", traj.c_drift)?;
    d.set_item("branch", format!("{branch:?}"))?;
    Ok(d.into())
}

/// The alpha = 0 closed form: radius -beta/sigma, valid iff beta < 0.
#[pyfunction]
fn alpha_zero_disk(py: Python<'_>, sigma: f64, eta: f64, beta: f64) -> PyResult<Py<PyDict>> {
    let p = params(sigma, eta, 0.0, beta, false)?;
    let disk = alpha_zero_solution(&p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("radius", disk.radius)?;
    d.set_item("valid", disk.valid)?;
    d.set_item("el_residual", disk.el_residual)?;
    Ok(d.into())
}

/// Fit (sigma, eta) making helicoid rim helices equilibria. Give exactly one
/// of r1 (two-boundary solve) or eta (single-boundary solve).
#[pyfunction]
#[pyo3(signature = (a, r0, alpha, beta, r1=None, eta=None, sheet="plus"))]
fn fit_helicoid(
    py: Python<'_>,
    a: f64,
    r0: f64,
    alpha: f64,
    beta: f64,
    r1: Option<f64>,
    eta: Option<f64>,
    sheet: &str,
) -> PyResult<Py<PyDict>> {
    let mode = match (r1, eta) {
        (Some(r1), None) => FitMode::TwoBoundary { r1 },
        (None, Some(eta)) => FitMode::SingleBoundary { eta },
        _ => return Err(PyValueError::new_err("give exactly one of r1 or eta")),
    };
    let sheet = Sheet::from_str(sheet).map_err(err)?;
    let fit = fit_helicoid_params(a, r0, mode, alpha, beta, sheet).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("sigma", fit.sigma)?;
    d.set_item("eta", fit.eta)?;
    d.set_item("valid", fit.valid)?;
    d.set_item("residual", fit.residual)?;
    Ok(d.into())
}

/// Torsion flux oint tau_g e^zeta dt on both rims of the conformal helicoid
/// annulus.
#[pyfunction]
#[pyo3(signature = (a, r0, r1, samples=512))]
fn helicoid_flux(py: Python<'_>, a: f64, r0: f64, r1: f64, samples: usize) -> PyResult<Py<PyDict>> {
    let p = ConformalHelicoidPatch::from_radii(a, r0, r1).map_err(err)?;
    let report = torsion_flux_check(&p, samples).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("inner", report.get("flux_inner").unwrap().value)?;
    d.set_item("outer", report.get("flux_outer").unwrap().value)?;
    d.set_item(
        "difference",
        report.get("flux_difference").unwrap().abs_residual,
    )?;
    Ok(d.into())
}

/// Energy breakdown of a flat disk fixture.
#[pyfunction]
fn energy_disk(
    py: Python<'_>,
    radius: f64,
    sigma: f64,
    eta: f64,
    alpha: f64,
    beta: f64,
) -> PyResult<Py<PyDict>> {
    let p = params(sigma, eta, alpha, beta, false)?;
    let patch = PlanarDiskPatch { radius };
    let boundary = darboux_from_patch(&patch, &UvCurve::u_line(&patch, radius), 512).map_err(err)?;
    let e = plateau_core::audit::energy_eval(
        &SurfaceDomain::Patch {
            patch: &patch,
            nu: 32,
            nv: 32,
        },
        &[boundary],
        &p,
    )
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("area", e.area)?;
    d.set_item("total_gauss", e.total_gauss)?;
    d.set_item("bending", e.bending_integral)?;
    d.set_item("total", e.total)?;
    Ok(d.into())
}

/// Build one of the three showcase surfaces and return its audit residuals.
#[pyfunction]
#[pyo3(signature = (set, ns=200, nt=25))]
fn bjorling_showcase(py: Python<'_>, set: usize, ns: usize, nt: usize) -> PyResult<Py<PyDict>> {
    let (p, state0, sheet) =
        showcase_preset(set).ok_or_else(|| PyValueError::new_err("set must be 1, 2, or 3"))?;
    let strip = continue_boundary(
        CurvatureSource::Equilibrium { params: p, state0 },
        sheet,
        8.0,
        0.25,
        ns,
        nt,
    )
    .map_err(err)?;
    let build = bjorling_surface(&strip).map_err(err)?;
    let d = PyDict::new(py);
    for (name, check) in &build.report.checks {
        d.set_item(name, check.abs_residual)?;
    }
    d.set_item("vertices", build.mesh.vertices.len())?;
    d.set_item("faces", build.mesh.faces.len())?;
    Ok(d.into())
}

#[pymodule]
fn plateau_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(circle_roots, m)?)?;
    m.add_function(wrap_pyfunction!(first_integral_d, m)?)?;
    m.add_function(wrap_pyfunction!(elastica_integrate, m)?)?;
    m.add_function(wrap_pyfunction!(buckled_ring, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_integrate, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_zero_disk, m)?)?;
    m.add_function(wrap_pyfunction!(fit_helicoid, m)?)?;
    m.add_function(wrap_pyfunction!(helicoid_flux, m)?)?;
    m.add_function(wrap_pyfunction!(energy_disk, m)?)?;
    m.add_function(wrap_pyfunction!(bjorling_showcase, m)?)?;
    Ok(())
}
