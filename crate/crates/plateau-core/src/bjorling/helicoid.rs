//! The helicoid X(r, theta) = (r cos theta, r sin theta, a theta + b), its
//! constant boundary Darboux data, and the linear solve that fits energy
//! parameters making helicoid annuli critical.

use crate::boundary::BoundaryState;
use crate::convention::Sheet;
use crate::elastica::EnergyParams;
use crate::geom::patch::{Domain, ParamPatch, PatchJet};
use crate::{Error, Result, Vec3};
use serde::{Deserialize, Serialize};

/// Helicoid chart over r in [r0, r1], theta in [0, theta_max].
///
/// A full turn with `identify_seam` set is the annulus of the pitch quotient:
/// meshing glues the seam combinatorially even though the 3D positions
/// differ by one pitch. Pointwise curvature estimators need the open chart
/// (`identify_seam = false`); the exact Gauss-Bonnet bookkeeping is valid
/// either way.
#[derive(Debug, Clone, Copy)]
pub struct HelicoidPatch {
    pub a: f64,
    pub b: f64,
    pub r0: f64,
    pub r1: f64,
    pub theta_max: f64,
    pub identify_seam: bool,
}

impl HelicoidPatch {
    pub fn new(a: f64, b: f64, r0: f64, r1: f64, theta_max: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::precondition("helicoid needs a != 0"));
        }
        if !(0.0 < r0 && r0 < r1) {
            return Err(Error::precondition("need 0 < r0 < r1"));
        }
        if !(theta_max > 0.0) {
            return Err(Error::precondition("need theta_max > 0"));
        }
        Ok(HelicoidPatch {
            a,
            b,
            r0,
            r1,
            theta_max,
            identify_seam: true,
        })
    }

    /// Full-turn chart without seam identification (an embedded quad strip);
    /// the right carrier for pointwise discrete-curvature studies.
    pub fn open_chart(a: f64, r0: f64, r1: f64) -> Result<Self> {
        let mut h = HelicoidPatch::new(a, 0.0, r0, r1, std::f64::consts::TAU)?;
        h.identify_seam = false;
        Ok(h)
    }

    /// Full-turn annulus (seam identified when meshed).
    pub fn annulus(a: f64, r0: f64, r1: f64) -> Result<Self> {
        HelicoidPatch::new(a, 0.0, r0, r1, std::f64::consts::TAU)
    }

    /// Closed-form Darboux data of the r = const helix, on the requested
    /// sheet: kappa_n = 0, tau_g = -a/(a^2 + r^2), kappa_g = sign *
    /// r/(a^2 + r^2).
    pub fn helix_darboux(&self, r: f64, sheet: Sheet) -> BoundaryState {
        let den = self.a * self.a + r * r;
        BoundaryState {
            s: 0.0,
            kappa_g: sheet.sign() * r / den,
            kappa_g_prime: 0.0,
            tau_g: -self.a / den,
        }
    }

    /// Geometric Darboux data of the two rim helices of the annulus, with the
    /// boundary positively oriented with respect to the patch normal: the
    /// inner rim carries kappa_g = +r0/(a^2+r0^2), the outer rim
    /// kappa_g = -r1/(a^2+r1^2); tau_g = -a/(a^2+r^2) on both.
    pub fn rim_darboux(&self) -> (BoundaryState, BoundaryState) {
        (
            self.helix_darboux(self.r0, Sheet::Plus),
            self.helix_darboux(self.r1, Sheet::Minus),
        )
    }

    /// Length of one full turn of the r = const helix.
    pub fn helix_length(&self, r: f64) -> f64 {
        std::f64::consts::TAU * (r * r + self.a * self.a).sqrt()
    }

    /// Closed-form area of the annulus r in [r0, r1] over theta_max.
    pub fn area(&self) -> f64 {
        let anti = |r: f64| {
            0.5 * (r * (r * r + self.a * self.a).sqrt()
                + self.a * self.a * (r / self.a.abs()).asinh())
        };
        self.theta_max * (anti(self.r1) - anti(self.r0))
    }

    /// Boundary loop of the r = const helix over one full turn with the
    /// closed-form constant Darboux data attached. The loop is marked closed
    /// in the quotient sense (the seam is identified), so audits of the
    /// periodic Darboux data wrap correctly even though the 3D positions
    /// advance by one pitch.
    pub fn helix_boundary(&self, r: f64, sheet: Sheet, n: usize) -> crate::geom::darboux::PatchBoundary {
        use crate::geom::curve::{ArcCurve, CurveSample};
        use crate::geom::darboux::{DarbouxField, DarbouxSample};
        let state = self.helix_darboux(r, sheet);
        let length = self.helix_length(r);
        let den = (r * r + self.a * self.a).sqrt();
        let mut curve_samples = Vec::with_capacity(n);
        let mut darboux_samples = Vec::with_capacity(n);
        for k in 0..n {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            let s = length * k as f64 / n as f64;
            let tangent = Vec3::new(-r * theta.sin(), r * theta.cos(), self.a) / den;
            let normal = Vec3::new(-theta.cos(), -theta.sin(), 0.0);
            curve_samples.push(CurveSample {
                s,
                position: Vec3::new(r * theta.cos(), r * theta.sin(), self.a * theta + self.b),
                tangent,
                normal,
                binormal: tangent.cross(&normal),
                kappa: r / (den * den),
                tau: self.a / (den * den),
            });
            darboux_samples.push(DarbouxSample {
                s,
                kappa_g: state.kappa_g,
                kappa_n: 0.0,
                tau_g: state.tau_g,
                theta: sheet.theta(),
            });
        }
        crate::geom::darboux::PatchBoundary {
            curve: ArcCurve {
                samples: curve_samples,
                length,
                closed: true,
                closure_gap: 0.0,
            },
            darboux: DarbouxField {
                samples: darboux_samples,
                closed: true,
            },
        }
    }
}

impl ParamPatch for HelicoidPatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (self.r0, self.r1),
            v: (0.0, self.theta_max),
            v_periodic: self.identify_seam
                && (self.theta_max - std::f64::consts::TAU).abs() < 1e-12,
        }
    }
    fn position(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(u * v.cos(), u * v.sin(), self.a * v + self.b)
    }
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let (c, s) = (v.cos(), v.sin());
        PatchJet {
            xu: Vec3::new(c, s, 0.0),
            xv: Vec3::new(-u * s, u * c, self.a),
            xuu: Vec3::zeros(),
            xuv: Vec3::new(-s, c, 0.0),
            xvv: Vec3::new(-u * c, -u * s, 0.0),
        }
    }
    fn mean_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn gaussian_curvature(&self, u: f64, _v: f64) -> f64 {
        let den = self.a * self.a + u * u;
        -self.a * self.a / (den * den)
    }
}

/// Which boundary data pin the fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum FitMode {
    /// Impose the conormal equation at both rims; solves for (sigma, eta).
    TwoBoundary { r1: f64 },
    /// Impose it at the single rim r0 with eta given; solves for sigma.
    SingleBoundary { eta: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HelicoidFit {
    pub sigma: f64,
    pub eta: f64,
    /// sigma > 0, the physical surface-tension requirement.
    pub valid: bool,
    /// Sup of the conormal-equation residuals at the fitted data.
    pub residual: f64,
}

/// Right-hand side of the conormal equation, linear in (sigma, eta):
/// sigma - tau_g^2 eta = -(alpha kappa_g^2 - 2 alpha tau_g^2 - beta) kappa_g.
fn fit_row(a: f64, r: f64, alpha: f64, beta: f64, sheet: Sheet) -> (f64, f64) {
    let den = a * a + r * r;
    let kg = sheet.sign() * r / den;
    let tg = -a / den;
    let rhs = -(alpha * kg * kg - 2.0 * alpha * tg * tg - beta) * kg;
    (tg * tg, rhs)
}

fn conormal_residual(params: &EnergyParams, state: &BoundaryState) -> f64 {
    let (sigma, eta, alpha, beta) = (params.sigma, params.eta, params.alpha, params.beta);
    let (kg, tg) = (state.kappa_g, state.tau_g);
    ((alpha * kg * kg - 2.0 * alpha * tg * tg - beta) * kg - eta * tg * tg + sigma).abs()
}

/// Fit (sigma, eta) so the constant helix data of the helicoid satisfies the
/// boundary equilibrium equations. The torsion equation holds identically on
/// constant data; the conormal equation is linear in (sigma, eta) and the
/// two-boundary system has determinant tau_g(r0)^2 - tau_g(r1)^2 != 0 for
/// r0 != r1, so it is solved exactly. The validity flag reports sigma > 0.
pub fn fit_helicoid_params(
    a: f64,
    r0: f64,
    mode: FitMode,
    alpha: f64,
    beta: f64,
    sheet: Sheet,
) -> Result<HelicoidFit> {
    if a == 0.0 || r0 <= 0.0 {
        return Err(Error::precondition("need a != 0 and r0 > 0"));
    }
    let (sigma, eta) = match mode {
        FitMode::TwoBoundary { r1 } => {
            if r1 <= 0.0 || (r1 - r0).abs() < 1e-14 {
                return Err(Error::precondition(
                    "two-boundary fit needs distinct positive radii",
                ));
            }
            let (t0sq, rhs0) = fit_row(a, r0, alpha, beta, sheet);
            let (t1sq, rhs1) = fit_row(a, r1, alpha, beta, sheet);
            // sigma - t_i^2 eta = rhs_i
            let det = t1sq - t0sq;
            let eta = (rhs0 - rhs1) / det;
            let sigma = rhs0 + t0sq * eta;
            (sigma, eta)
        }
        FitMode::SingleBoundary { eta } => {
            let (t0sq, rhs0) = fit_row(a, r0, alpha, beta, sheet);
            (rhs0 + t0sq * eta, eta)
        }
    };
    let params = EnergyParams {
        sigma,
        eta,
        alpha,
        beta,
        relaxed: true,
    };
    let helicoid = HelicoidPatch {
        a,
        b: 0.0,
        r0,
        r1: match mode {
            FitMode::TwoBoundary { r1 } => r1,
            FitMode::SingleBoundary { .. } => r0 * 2.0,
        },
        theta_max: std::f64::consts::TAU,
        identify_seam: true,
    };
    let mut residual = conormal_residual(&params, &helicoid.helix_darboux(r0, sheet));
    if let FitMode::TwoBoundary { r1 } = mode {
        residual = residual.max(conormal_residual(
            &params,
            &helicoid.helix_darboux(r1, sheet),
        ));
    }
    Ok(HelicoidFit {
        sigma,
        eta,
        valid: sigma > 0.0,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn helix_darboux_values() {
        let h = HelicoidPatch::annulus(1.0, 0.5, 2.0).unwrap();
        let d = h.helix_darboux(1.0, Sheet::Plus);
        assert_relative_eq!(d.kappa_g, 0.5);
        assert_relative_eq!(d.tau_g, -0.5);
        let d = h.helix_darboux(1.0, Sheet::Minus);
        assert_relative_eq!(d.kappa_g, -0.5);
        assert_relative_eq!(d.tau_g, -0.5);
    }

    #[test]
    fn patch_is_minimal_with_closed_form_k() {
        let h = HelicoidPatch::annulus(1.0, 1.0, 2.0).unwrap();
        assert_eq!(h.mean_curvature(1.5, 0.7), 0.0);
        assert_relative_eq!(h.gaussian_curvature(1.0, 0.0), -0.25);
        // jets agree with the default FD path
        struct Raw(HelicoidPatch);
        impl ParamPatch for Raw {
            fn domain(&self) -> Domain {
                self.0.domain()
            }
            fn position(&self, u: f64, v: f64) -> Vec3 {
                self.0.position(u, v)
            }
        }
        let raw = Raw(h);
        assert!(raw.mean_curvature(1.5, 0.7).abs() < 1e-8);
        assert!((raw.gaussian_curvature(1.5, 0.7) - h.gaussian_curvature(1.5, 0.7)).abs() < 1e-7);
    }

    #[test]
    fn single_boundary_fit_hand_value() {
        // a = 1, r = 1, alpha = 1, beta = 1, eta = 1, sheet +:
        // sigma = alpha/8 + beta/2 + eta/4 = 7/8
        let fit = fit_helicoid_params(
            1.0,
            1.0,
            FitMode::SingleBoundary { eta: 1.0 },
            1.0,
            1.0,
            Sheet::Plus,
        )
        .unwrap();
        assert_relative_eq!(fit.sigma, 0.875, epsilon = 1e-15);
        assert!(fit.valid);
        assert!(fit.residual <= 1e-15);
    }

    #[test]
    fn two_boundary_fit_exact_fractions() {
        // a = 1, r0 = 1, r1 = 2, alpha = 1, beta = 0, sheet +:
        // rows sigma - eta/4 = 1/8, sigma - eta/25 = -4/125
        // => eta = -157/210, sigma = -13/210, invalid
        let fit = fit_helicoid_params(
            1.0,
            1.0,
            FitMode::TwoBoundary { r1: 2.0 },
            1.0,
            0.0,
            Sheet::Plus,
        )
        .unwrap();
        assert_relative_eq!(fit.eta, -157.0 / 210.0, epsilon = 1e-14);
        assert_relative_eq!(fit.sigma, -13.0 / 210.0, epsilon = 1e-14);
        assert!(!fit.valid);
        assert!(fit.residual <= 1e-15);
    }

    #[test]
    fn two_boundary_fit_matches_independent_linear_solve() {
        // independent 2x2 solve via nalgebra as the oracle
        let (a, r0, r1, alpha, beta) = (1.0, 1.0, 2.0, 1.0, 0.0);
        let (t0sq, rhs0) = fit_row(a, r0, alpha, beta, Sheet::Plus);
        let (t1sq, rhs1) = fit_row(a, r1, alpha, beta, Sheet::Plus);
        let m = nalgebra::Matrix2::new(1.0, -t0sq, 1.0, -t1sq);
        let b = nalgebra::Vector2::new(rhs0, rhs1);
        let sol = m.lu().solve(&b).unwrap();
        let fit = fit_helicoid_params(
            a,
            r0,
            FitMode::TwoBoundary { r1 },
            alpha,
            beta,
            Sheet::Plus,
        )
        .unwrap();
        assert_relative_eq!(fit.sigma, sol[0], epsilon = 1e-12);
        assert_relative_eq!(fit.eta, sol[1], epsilon = 1e-12);
    }

    #[test]
    fn sheet_flip_keeps_residual_zero() {
        for sheet in [Sheet::Plus, Sheet::Minus] {
            let fit = fit_helicoid_params(
                1.0,
                1.0,
                FitMode::TwoBoundary { r1: 2.0 },
                1.0,
                0.5,
                sheet,
            )
            .unwrap();
            assert!(fit.residual <= 1e-12, "sheet {sheet}: residual {}", fit.residual);
        }
    }

    #[test]
    fn coincident_radii_rejected() {
        assert!(fit_helicoid_params(
            1.0,
            1.0,
            FitMode::TwoBoundary { r1: 1.0 },
            1.0,
            0.0,
            Sheet::Plus
        )
        .is_err());
        assert!(HelicoidPatch::new(1.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn area_matches_quadrature() {
        let h = HelicoidPatch::annulus(1.0, 1.0, 2.0).unwrap();
        let quad = crate::numerics::gauss_legendre(
            |r| std::f64::consts::TAU * (1.0 + r * r).sqrt(),
            1.0,
            2.0,
            32,
        );
        assert_relative_eq!(h.area(), quad, epsilon = 1e-12);
    }

    #[test]
    fn mesh_mean_curvature_vanishes_at_second_order() {
        use crate::geom::mesh::{discrete_curvatures, mesh_from_patch};
        // pointwise estimators need the open chart: gluing the quotient seam
        // leaves a one-pitch cliff in the embedded positions
        let h = HelicoidPatch::open_chart(1.0, 1.0, 2.0).unwrap();
        let mut sup = Vec::new();
        for n in [8usize, 16, 32] {
            let mesh = mesh_from_patch(&h, n + 1, 4 * n + 1).unwrap();
            let curv = discrete_curvatures(&mesh).unwrap();
            sup.push(
                curv.iter()
                    .filter(|c| !c.boundary)
                    .map(|c| c.h.abs())
                    .fold(0.0f64, f64::max),
            );
        }
        assert!(sup[1] < sup[0] && sup[2] < sup[1], "|H| not decreasing: {sup:?}");
        let order = (sup[1] / sup[2]).log2();
        assert!(order >= 1.5, "observed order {order:.2} in {sup:?}");
    }

    #[test]
    fn valid_fit_makes_both_rims_equilibria() {
        use crate::audit::{el_residuals, ElTolerances};
        // beta = 1 gives a valid (sigma > 0) two-boundary fit
        let (a, r0, r1, alpha, beta) = (1.0, 1.0, 2.0, 1.0, 1.0);
        let fit = fit_helicoid_params(
            a,
            r0,
            FitMode::TwoBoundary { r1 },
            alpha,
            beta,
            Sheet::Plus,
        )
        .unwrap();
        assert!(fit.valid, "sigma = {}", fit.sigma);
        let params = EnergyParams::new(fit.sigma, fit.eta, alpha, beta).unwrap();
        let h = HelicoidPatch::annulus(a, r0, r1).unwrap();
        let loops = vec![
            h.helix_boundary(r0, Sheet::Plus, 256),
            h.helix_boundary(r1, Sheet::Plus, 256),
        ];
        let report = el_residuals(Some(&h), &loops, &params, ElTolerances::default()).unwrap();
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn rim_darboux_satisfies_gauss_bonnet() {
        // integral of K over the annulus equals oint kappa_g ds (chi = 0)
        let h = HelicoidPatch::annulus(1.0, 1.0, 2.0).unwrap();
        let (inner, outer) = h.rim_darboux();
        let oint = inner.kappa_g * h.helix_length(h.r0) + outer.kappa_g * h.helix_length(h.r1);
        let int_k = crate::numerics::gauss_legendre(
            |r| {
                std::f64::consts::TAU * h.gaussian_curvature(r, 0.0) * (1.0 + r * r).sqrt()
            },
            1.0,
            2.0,
            64,
        );
        assert_relative_eq!(int_k, oint, epsilon = 1e-12);
    }
}
