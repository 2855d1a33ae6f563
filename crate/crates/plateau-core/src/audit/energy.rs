//! The total energy sigma * Area + eta * total Gaussian curvature +
//! boundary bending integral, term by term.

use crate::elastica::EnergyParams;
use crate::geom::darboux::PatchBoundary;
use crate::geom::mesh::TriMesh;
use crate::geom::patch::ParamPatch;
use crate::numerics::{gauss_legendre, simpson, simpson_periodic};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Surface carrier for integral evaluation.
pub enum SurfaceDomain<'a> {
    /// Smooth patch with a quadrature panel budget per axis.
    Patch {
        patch: &'a dyn ParamPatch,
        nu: usize,
        nv: usize,
    },
    Mesh(&'a TriMesh),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub area: f64,
    pub total_gauss: f64,
    pub bending_integral: f64,
    pub area_term: f64,
    pub gauss_term: f64,
    pub bend_term: f64,
    pub total: f64,
}

/// Surface area by tensor Gauss-Legendre quadrature.
pub fn patch_area(patch: &dyn ParamPatch, nu: usize, nv: usize) -> f64 {
    patch_integral(patch, nu, nv, &|_, _| 1.0)
}

/// Total Gaussian curvature by tensor quadrature.
pub fn patch_total_gauss(patch: &dyn ParamPatch, nu: usize, nv: usize) -> f64 {
    patch_integral(patch, nu, nv, &|u, v| patch.gaussian_curvature(u, v))
}

fn patch_integral(
    patch: &dyn ParamPatch,
    nu: usize,
    nv: usize,
    f: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    let d = patch.domain();
    gauss_legendre(
        |u| {
            gauss_legendre(
                |v| {
                    let (e, ff, g) = patch.first_form(u, v);
                    f(u, v) * (e * g - ff * ff).max(0.0).sqrt()
                },
                d.v.0,
                d.v.1,
                nv,
            )
        },
        d.u.0,
        d.u.1,
        nu,
    )
}

/// oint (alpha kappa^2 + beta) ds over one closed loop, kappa^2 = kappa_g^2
/// + kappa_n^2, composite Simpson in the stored parameterization.
fn bending_integral(loop_: &PatchBoundary, alpha: f64, beta: f64) -> Result<f64> {
    if !loop_.curve.closed {
        return Err(Error::precondition(
            "boundary loop is not closed; bending energy undefined",
        ));
    }
    let n = loop_.darboux.samples.len();
    if n != loop_.curve.samples.len() {
        return Err(Error::precondition("curve/darboux sample mismatch"));
    }
    // integrate in the curve parameter: ds = speed dt with speed = ds/dt
    let speeds = loop_speeds(loop_);
    let vals: Vec<f64> = loop_
        .darboux
        .samples
        .iter()
        .zip(&speeds)
        .map(|(q, &sp)| {
            let k2 = q.kappa_g * q.kappa_g + q.kappa_n * q.kappa_n;
            (alpha * k2 + beta) * sp
        })
        .collect();
    let dt = 1.0 / if loop_.curve.closed {
        n as f64
    } else {
        (n - 1) as f64
    };
    Ok(if loop_.curve.closed {
        simpson_periodic(&vals, dt)
    } else {
        simpson(&vals, dt)
    })
}

/// ds/dt against a unit parameter interval, from the stored arc lengths.
pub(crate) fn loop_speeds(loop_: &PatchBoundary) -> Vec<f64> {
    let n = loop_.curve.samples.len();
    let s: Vec<f64> = loop_.curve.samples.iter().map(|q| q.s).collect();
    let dt = 1.0 / if loop_.curve.closed { n as f64 } else { (n - 1) as f64 };
    if loop_.curve.closed {
        // unwrap the seam before differentiating
        let total = loop_.curve.length;
        let mut unwrapped = s.clone();
        for i in 1..n {
            if unwrapped[i] < unwrapped[i - 1] {
                unwrapped[i] += total;
            }
        }
        let mut ext = unwrapped.clone();
        ext.push(unwrapped[0] + total);
        let d = crate::numerics::derivative_uniform(&ext, dt, false);
        d[..n].to_vec()
    } else {
        crate::numerics::derivative_uniform(&s, dt, false)
    }
}

/// Evaluate the energy of a surface/boundary pairing, each term reported
/// separately. Surface integrals use the carrier's quadrature (tensor
/// Gauss-Legendre on patches, triangle sums and angle defects on meshes);
/// boundary integrals use composite Simpson.
pub fn energy_eval(
    surface: &SurfaceDomain,
    boundaries: &[PatchBoundary],
    params: &EnergyParams,
) -> Result<EnergyBreakdown> {
    for b in boundaries {
        if !b.curve.closed {
            return Err(Error::precondition("every boundary loop must be closed"));
        }
    }
    let (area, total_gauss) = match surface {
        SurfaceDomain::Patch { patch, nu, nv } => (
            patch_area(*patch, *nu, *nv),
            patch_total_gauss(*patch, *nu, *nv),
        ),
        SurfaceDomain::Mesh(mesh) => {
            let gb = crate::geom::mesh::discrete_gauss_bonnet(mesh)?;
            (mesh.total_area(), gb.interior_defect)
        }
    };
    let mut bending = 0.0;
    for b in boundaries {
        bending += bending_integral(b, params.alpha, params.beta)?;
    }
    let area_term = params.sigma * area;
    let gauss_term = params.eta * total_gauss;
    Ok(EnergyBreakdown {
        area,
        total_gauss,
        bending_integral: bending,
        area_term,
        gauss_term,
        bend_term: bending,
        total: area_term + gauss_term + bending,
    })
}
