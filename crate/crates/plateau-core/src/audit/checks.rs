//! Scaling identity, Gauss-Bonnet, and torsion-flux audits.

use super::energy::{loop_speeds, patch_area, patch_total_gauss, SurfaceDomain};
use super::{AuditReport, CheckRecord};
use crate::elastica::EnergyParams;
use crate::geom::darboux::{darboux_from_patch, PatchBoundary, UvCurve};
use crate::geom::mesh::{discrete_gauss_bonnet, TriMesh};
use crate::geom::patch::ParamPatch;
use crate::numerics::{simpson, simpson_periodic};
use crate::{Error, Result};

/// oint f ds over a loop, with f per sample.
fn loop_integral(loop_: &PatchBoundary, f: &dyn Fn(usize) -> f64) -> f64 {
    let n = loop_.darboux.samples.len();
    let speeds = loop_speeds(loop_);
    let vals: Vec<f64> = (0..n).map(|i| f(i) * speeds[i]).collect();
    let dt = 1.0 / if loop_.curve.closed { n as f64 } else { (n - 1) as f64 };
    if loop_.curve.closed {
        simpson_periodic(&vals, dt)
    } else {
        simpson(&vals, dt)
    }
}

/// At criticality the area is pinned by the boundary data:
/// 2 sigma A = oint (alpha kappa^2 - beta) ds. The check reports the
/// residual of that identity; it must fail on non-critical surfaces.
pub fn scaling_identity_check(
    surface: &SurfaceDomain,
    boundaries: &[PatchBoundary],
    params: &EnergyParams,
    tolerance: f64,
) -> Result<AuditReport> {
    let area = match surface {
        SurfaceDomain::Patch { patch, nu, nv } => patch_area(*patch, *nu, *nv),
        SurfaceDomain::Mesh(m) => m.total_area(),
    };
    let mut oint = 0.0;
    for b in boundaries {
        oint += loop_integral(b, &|i| {
            let q = &b.darboux.samples[i];
            let k2 = q.kappa_g * q.kappa_g + q.kappa_n * q.kappa_n;
            params.alpha * k2 - params.beta
        });
    }
    let mut report = AuditReport::new();
    report.insert(
        "scaling_identity",
        CheckRecord::against(2.0 * params.sigma * area, oint, tolerance),
    );
    Ok(report)
}

/// Exact discrete Gauss-Bonnet on a mesh: interior angle defect equals the
/// signed boundary turning plus 2 pi chi, to rounding error on any mesh.
pub fn gauss_bonnet_check_mesh(mesh: &TriMesh, tolerance: f64) -> Result<AuditReport> {
    let gb = discrete_gauss_bonnet(mesh)?;
    let mut report = AuditReport::new();
    report.insert(
        "discrete_gauss_bonnet",
        CheckRecord::against(gb.interior_defect, gb.boundary_turning + gb.two_pi_chi, tolerance),
    );
    Ok(report)
}

/// Smooth-estimator Gauss-Bonnet: total Gaussian curvature by patch
/// quadrature against oint kappa_g ds + 2 pi chi with measured boundary data.
pub fn gauss_bonnet_check_patch(
    patch: &dyn ParamPatch,
    boundaries: &[PatchBoundary],
    chi: i64,
    quad_panels: usize,
    tolerance: f64,
) -> Result<AuditReport> {
    let int_k = patch_total_gauss(patch, quad_panels, quad_panels);
    let mut oint_kg = 0.0;
    for b in boundaries {
        oint_kg += loop_integral(b, &|i| b.darboux.samples[i].kappa_g);
    }
    let mut report = AuditReport::new();
    report.insert(
        "smooth_gauss_bonnet",
        CheckRecord::against(
            int_k,
            oint_kg + std::f64::consts::TAU * chi as f64,
            tolerance,
        ),
    );
    Ok(report)
}

/// Torsion-flux balance on a conformal annulus: oint tau_g e^zeta dt agrees
/// on the two boundary components of a minimal annulus with asymptotic
/// boundary. Reports both fluxes, their difference, and the strict-sign
/// consistency of the second equilibrium case.
pub fn torsion_flux_check(patch: &dyn ParamPatch, n_samples: usize) -> Result<AuditReport> {
    let d = patch.domain();
    if patch.conformal_factor(0.5 * (d.u.0 + d.u.1), d.v.0).is_none() {
        return Err(Error::precondition(
            "torsion flux needs a conformal patch (conformal factor unavailable)",
        ));
    }
    if !d.v_periodic {
        return Err(Error::precondition(
            "torsion flux needs an annulus (v-periodic patch with two boundary components)",
        ));
    }
    let mut fluxes = [0.0f64; 2];
    for (slot, &u_rim) in [d.u.0, d.u.1].iter().enumerate() {
        let uv = UvCurve::u_line(patch, u_rim);
        let b = darboux_from_patch(patch, &uv, n_samples)?;
        // integrate tau_g e^zeta against the conformal boundary parameter
        let n = b.darboux.samples.len();
        let dt = d.v_span() / n as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let v = d.v.0 + dt * i as f64;
                let zeta = patch.conformal_factor(u_rim, v).unwrap();
                b.darboux.samples[i].tau_g * zeta
            })
            .collect();
        fluxes[slot] = simpson_periodic(&vals, dt);
    }
    let scale = fluxes[0].abs().max(fluxes[1].abs()).max(1.0);
    let mut report = AuditReport::new();
    report.insert(
        "flux_inner",
        CheckRecord::against(fluxes[0], fluxes[0], f64::MAX),
    );
    report.insert(
        "flux_outer",
        CheckRecord::against(fluxes[1], fluxes[1], f64::MAX),
    );
    report.insert(
        "flux_difference",
        CheckRecord::residual(fluxes[0] - fluxes[1], 1e-10 * scale),
    );
    // both components share a strict sign, or both vanish
    let sign_ok = fluxes[0] * fluxes[1] > 0.0
        || (fluxes[0].abs() <= 1e-10 && fluxes[1].abs() <= 1e-10);
    report.insert(
        "flux_sign_consistent",
        CheckRecord::at_least(if sign_ok { 1.0 } else { 0.0 }, 1.0),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::darboux::darboux_from_patch;
    use crate::geom::patch::{ConformalHelicoidPatch, HemispherePatch, PlanarAnnulusPatch, PlanarDiskPatch};
    use std::f64::consts::TAU;

    fn disk_boundary(radius: f64) -> (PlanarDiskPatch, PatchBoundary) {
        let p = PlanarDiskPatch { radius };
        let uv = UvCurve::u_line(&p, radius);
        let b = darboux_from_patch(&p, &uv, 256).unwrap();
        (p, b)
    }

    #[test]
    fn scaling_identity_on_unit_circle_root_disk() {
        // (sigma, alpha, beta) = (1, 1, 0): kappa_o = -1, R = 1:
        // 2 sigma pi R^2 = 2 pi and oint (alpha kappa^2 - beta) = 2 pi
        let (p, b) = disk_boundary(1.0);
        let params = EnergyParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let r = scaling_identity_check(
            &SurfaceDomain::Patch {
                patch: &p,
                nu: 24,
                nv: 24,
            },
            &[b],
            &params,
            1e-10,
        )
        .unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn scaling_identity_on_alpha_zero_disk() {
        // radius 2, (sigma, alpha, beta) = (1, 0, -2): 8 pi on both sides
        let (p, b) = disk_boundary(2.0);
        let params = EnergyParams::new(1.0, 0.0, 0.0, -2.0).unwrap();
        let r = scaling_identity_check(
            &SurfaceDomain::Patch {
                patch: &p,
                nu: 24,
                nv: 24,
            },
            &[b],
            &params,
            1e-10,
        )
        .unwrap();
        let c = r.get("scaling_identity").unwrap();
        assert!((c.value - 8.0 * std::f64::consts::PI).abs() < 1e-9);
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn hemisphere_control_fails_scaling() {
        let p = HemispherePatch { radius: 1.0 };
        let uv = UvCurve::u_line(&p, std::f64::consts::FRAC_PI_2);
        let b = darboux_from_patch(&p, &uv, 256).unwrap();
        let params = EnergyParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let r = scaling_identity_check(
            &SurfaceDomain::Patch {
                patch: &p,
                nu: 24,
                nv: 24,
            },
            &[b],
            &params,
            1e-10,
        )
        .unwrap();
        let c = r.get("scaling_identity").unwrap();
        assert!(!c.pass);
        assert!(c.abs_residual > 0.1, "control too weak: {}", c.abs_residual);
    }

    #[test]
    fn smooth_gauss_bonnet_on_disk_and_annulus() {
        let (p, b) = disk_boundary(1.5);
        let r = gauss_bonnet_check_patch(&p, &[b], 1, 32, 1e-8).unwrap();
        assert!(r.all_pass(), "{r}");

        let a = PlanarAnnulusPatch::new(1.0, 2.0).unwrap();
        let outer = darboux_from_patch(&a, &UvCurve::u_line(&a, a.domain().u.1), 256).unwrap();
        let inner =
            darboux_from_patch(&a, &UvCurve::u_line_reversed(&a, a.domain().u.0), 256).unwrap();
        let r = gauss_bonnet_check_patch(&a, &[inner, outer], 0, 32, 1e-8).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn smooth_gauss_bonnet_on_helicoid_annulus() {
        let p = ConformalHelicoidPatch::from_radii(1.0, 1.0, 2.0).unwrap();
        let outer = darboux_from_patch(&p, &UvCurve::u_line(&p, p.u1), 512).unwrap();
        let inner = darboux_from_patch(&p, &UvCurve::u_line_reversed(&p, p.u0), 512).unwrap();
        let r = gauss_bonnet_check_patch(&p, &[inner, outer], 0, 48, 1e-7).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn helicoid_flux_is_minus_two_pi_a() {
        for a in [0.5f64, 1.0, 2.0] {
            let p = ConformalHelicoidPatch::from_radii(a, 1.0, 2.0).unwrap();
            let r = torsion_flux_check(&p, 256).unwrap();
            let inner = r.get("flux_inner").unwrap().value;
            let outer = r.get("flux_outer").unwrap().value;
            assert!((inner + TAU * a).abs() <= 1e-8, "a = {a}: inner {inner}");
            assert!((outer + TAU * a).abs() <= 1e-8, "a = {a}: outer {outer}");
            assert!(r.get("flux_difference").unwrap().pass, "a = {a}: {r}");
            assert!(r.get("flux_sign_consistent").unwrap().pass);
        }
    }

    #[test]
    fn planar_annulus_flux_vanishes() {
        let p = PlanarAnnulusPatch::new(0.8, 1.7).unwrap();
        let r = torsion_flux_check(&p, 256).unwrap();
        assert!(r.get("flux_inner").unwrap().value.abs() <= 1e-10);
        assert!(r.get("flux_outer").unwrap().value.abs() <= 1e-10);
        assert!(r.get("flux_sign_consistent").unwrap().pass);
    }

    #[test]
    fn flux_requires_conformal_patch() {
        let p = PlanarDiskPatch { radius: 1.0 };
        assert!(torsion_flux_check(&p, 64).is_err());
    }
}
