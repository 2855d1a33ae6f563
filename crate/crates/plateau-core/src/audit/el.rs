//! Sup-norm residuals of the four equilibrium equations: interior mean
//! curvature, eta * kappa_n, and the binormal/conormal boundary equations
//! with the contact-force field expanded in Darboux terms.

use super::{AuditReport, CheckRecord};
use crate::elastica::EnergyParams;
use crate::geom::darboux::PatchBoundary;
use crate::geom::patch::ParamPatch;
use crate::numerics::derivative_uniform;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct ElTolerances {
    pub interior: f64,
    pub boundary: f64,
}

impl Default for ElTolerances {
    fn default() -> Self {
        ElTolerances {
            interior: 1e-10,
            boundary: 1e-10,
        }
    }
}

/// Arc-length derivative of sampled values along a loop, differentiating in
/// the (uniform) curve parameter and dividing by the measured speed.
fn d_ds(values: &[f64], loop_: &PatchBoundary) -> Vec<f64> {
    let n = values.len();
    let closed = loop_.curve.closed;
    let dt = 1.0 / if closed { n as f64 } else { (n - 1) as f64 };
    let dv = derivative_uniform(values, dt, closed);
    let speeds = super::energy::loop_speeds(loop_);
    dv.iter().zip(&speeds).map(|(d, sp)| d / sp).collect()
}

/// Residual report over the four equilibrium equations.
///
/// * `mean_curvature`: sup |H| over an interior sample grid of the patch.
/// * `eta_kappa_n`: sup |eta kappa_n| over all boundary loops.
/// * `binormal_equation`: sup |4 a kg' tg + 2 a kg tg' + eta tg'|.
/// * `conormal_equation`: sup |2 a kg'' + (a kg^2 - 2 a tg^2 - b) kg -
///   eta tg^2 + sigma|.
///
/// Boundary derivatives come from 4th-order finite differences of the
/// sampled Darboux data.
pub fn el_residuals(
    patch: Option<&dyn ParamPatch>,
    boundaries: &[PatchBoundary],
    params: &EnergyParams,
    tol: ElTolerances,
) -> Result<AuditReport> {
    let mut report = AuditReport::new();

    if let Some(p) = patch {
        let d = p.domain();
        let n = 24usize;
        let mut h_sup = 0.0f64;
        // stay strictly interior; boundary rows belong to the boundary checks
        for i in 1..n {
            for j in 0..=n {
                let u = d.u.0 + d.u_span() * i as f64 / n as f64;
                let v = d.v.0 + d.v_span() * j as f64 / n as f64;
                h_sup = h_sup.max(p.mean_curvature(u, v).abs());
            }
        }
        report.insert("eq_mean_curvature", CheckRecord::residual(h_sup, tol.interior));
    }

    let (sigma, eta, alpha, beta) = (params.sigma, params.eta, params.alpha, params.beta);
    let mut kn_sup = 0.0f64;
    let mut binormal_sup = 0.0f64;
    let mut conormal_sup = 0.0f64;
    for loop_ in boundaries {
        let kg: Vec<f64> = loop_.darboux.samples.iter().map(|q| q.kappa_g).collect();
        let tg: Vec<f64> = loop_.darboux.samples.iter().map(|q| q.tau_g).collect();
        let kn: Vec<f64> = loop_.darboux.samples.iter().map(|q| q.kappa_n).collect();
        let kgp = d_ds(&kg, loop_);
        let kgpp = d_ds(&kgp, loop_);
        let tgp = d_ds(&tg, loop_);
        let n = kg.len();
        // skip stencil-degraded ends on open loops
        let range: Vec<usize> = if loop_.curve.closed {
            (0..n).collect()
        } else {
            (4..n.saturating_sub(4)).collect()
        };
        for i in range {
            kn_sup = kn_sup.max((eta * kn[i]).abs());
            binormal_sup = binormal_sup
                .max((4.0 * alpha * kgp[i] * tg[i] + 2.0 * alpha * kg[i] * tgp[i] + eta * tgp[i]).abs());
            conormal_sup = conormal_sup.max(
                (2.0 * alpha * kgpp[i]
                    + (alpha * kg[i] * kg[i] - 2.0 * alpha * tg[i] * tg[i] - beta) * kg[i]
                    - eta * tg[i] * tg[i]
                    + sigma)
                    .abs(),
            );
        }
    }
    report.insert("eq_eta_kappa_n", CheckRecord::residual(kn_sup, tol.boundary));
    report.insert(
        "eq_binormal",
        CheckRecord::residual(binormal_sup, tol.boundary),
    );
    report.insert(
        "eq_conormal",
        CheckRecord::residual(conormal_sup, tol.boundary),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::darboux::{darboux_from_patch, UvCurve};
    use crate::geom::patch::PlanarDiskPatch;

    fn disk_boundary(radius: f64) -> (PlanarDiskPatch, PatchBoundary) {
        let p = PlanarDiskPatch { radius };
        let uv = UvCurve::u_line(&p, radius);
        let b = darboux_from_patch(&p, &uv, 512).unwrap();
        (p, b)
    }

    #[test]
    fn alpha_zero_disk_is_critical() {
        // radius 2 disk with sigma = 1, beta = -2, alpha = 0
        let (p, b) = disk_boundary(2.0);
        let params = EnergyParams::new(1.0, 1.0, 0.0, -2.0).unwrap();
        let r = el_residuals(Some(&p), &[b], &params, ElTolerances::default()).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn circle_root_disk_is_critical() {
        // (sigma, alpha, beta) = (1, 1, 0): root at kappa_o = -1, disk radius 1
        let (p, b) = disk_boundary(1.0);
        let params = EnergyParams::new(1.0, 0.7, 1.0, 0.0).unwrap();
        let r = el_residuals(Some(&p), &[b], &params, ElTolerances::default()).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn non_critical_disk_fails_conormal() {
        let (p, b) = disk_boundary(1.0);
        // wrong radius for these parameters
        let params = EnergyParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let r = el_residuals(Some(&p), &[b], &params, ElTolerances::default()).unwrap();
        assert!(!r.get("eq_conormal").unwrap().pass);
    }

    #[test]
    fn fitted_helicoid_annulus_is_critical() {
        // geometric fit: inner rim kappa_g > 0, outer rim kappa_g < 0
        use crate::bjorling::HelicoidPatch;
        use crate::geom::patch::ConformalHelicoidPatch;
        let h = HelicoidPatch::annulus(1.0, 1.0, 2.0).unwrap();
        let (inner, outer) = h.rim_darboux();
        // solve sigma - tg^2 eta = rhs at both rims, beta = 0
        let rhs = |st: &crate::boundary::BoundaryState| {
            -(1.0 * st.kappa_g * st.kappa_g - 2.0 * st.tau_g * st.tau_g) * st.kappa_g
        };
        let (t0, t1) = (inner.tau_g * inner.tau_g, outer.tau_g * outer.tau_g);
        let eta = (rhs(&inner) - rhs(&outer)) / (t1 - t0);
        let sigma = rhs(&inner) + t0 * eta;
        assert!(sigma > 0.0, "geometric fit should give sigma = 1/70");
        assert!((sigma - 1.0 / 70.0).abs() < 1e-12);
        assert!((eta + 31.0 / 70.0).abs() < 1e-12);
        let params = EnergyParams::new(sigma, eta, 1.0, 0.0).unwrap();
        // measure the darboux data off the conformal chart
        let c = ConformalHelicoidPatch::from_radii(1.0, 1.0, 2.0).unwrap();
        let outer_uv = UvCurve::u_line(&c, c.u1);
        let inner_uv = UvCurve::u_line_reversed(&c, c.u0);
        let bo = darboux_from_patch(&c, &outer_uv, 512).unwrap();
        let bi = darboux_from_patch(&c, &inner_uv, 512).unwrap();
        let r = el_residuals(
            Some(&c),
            &[bi, bo],
            &params,
            ElTolerances {
                interior: 1e-10,
                boundary: 1e-7, // finite differences of measured data
            },
        )
        .unwrap();
        assert!(r.all_pass(), "{r}");
    }
}
