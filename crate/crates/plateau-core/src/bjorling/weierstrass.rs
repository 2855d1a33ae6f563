//! Minimal surface patches from Weierstrass data (f, g):
//! X(w) = Re integral of (f (1 - g^2), i f (1 + g^2), 2 f g) dw,
//! with the Gaussian curvature closed form
//! K = -4 |g'|^2 / (|f|^2 (1 + |g|^2)^4).

use crate::geom::patch::{Domain, ParamPatch, PatchJet};
use crate::{CVec3, Error, Result, Vec3};
use num_complex::Complex64;

type CFn = Box<dyn Fn(Complex64) -> Complex64>;

pub struct WeierstrassPatch {
    f: CFn,
    fp: CFn,
    g: CFn,
    gp: CFn,
    domain: Domain,
    basepoint: Complex64,
    /// X(basepoint), fixing the translation.
    origin: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeierstrassPreset {
    /// f = -e^{-w}, g = -e^{w}: the catenoid 2 (cosh u cos v, cosh u sin v, u).
    Catenoid,
    /// f = i e^{-w}, g = -e^{w}: a helicoid with unit pitch parameter.
    Helicoid,
    /// f = 1, g = w: the Enneper surface.
    Enneper,
}

impl WeierstrassPatch {
    pub fn preset(which: WeierstrassPreset, u_half: f64) -> Self {
        let (f, fp, g, gp): (CFn, CFn, CFn, CFn) = match which {
            WeierstrassPreset::Catenoid => (
                Box::new(|w: Complex64| -(-w).exp()),
                Box::new(|w: Complex64| (-w).exp()),
                Box::new(|w: Complex64| -w.exp()),
                Box::new(|w: Complex64| -w.exp()),
            ),
            WeierstrassPreset::Helicoid => (
                Box::new(|w: Complex64| Complex64::i() * (-w).exp()),
                Box::new(|w: Complex64| -Complex64::i() * (-w).exp()),
                Box::new(|w: Complex64| -w.exp()),
                Box::new(|w: Complex64| -w.exp()),
            ),
            WeierstrassPreset::Enneper => (
                Box::new(|_| Complex64::new(1.0, 0.0)),
                Box::new(|_| Complex64::new(0.0, 0.0)),
                Box::new(|w: Complex64| w),
                Box::new(|_| Complex64::new(1.0, 0.0)),
            ),
        };
        let v_periodic = which != WeierstrassPreset::Enneper;
        let domain = Domain {
            u: (-u_half, u_half),
            v: if v_periodic {
                (0.0, std::f64::consts::TAU)
            } else {
                (-u_half, u_half)
            },
            v_periodic,
        };
        WeierstrassPatch {
            f,
            fp,
            g,
            gp,
            domain,
            basepoint: Complex64::new(0.0, 0.0),
            origin: Vec3::zeros(),
        }
    }

    /// Patch from user data. The derivative closures must differentiate f and
    /// g. Fails when f or g is non-finite (a pole) anywhere on a probe grid
    /// over the domain.
    pub fn from_data(
        f: CFn,
        fp: CFn,
        g: CFn,
        gp: CFn,
        domain: Domain,
        basepoint: Complex64,
    ) -> Result<Self> {
        let patch = WeierstrassPatch {
            f,
            fp,
            g,
            gp,
            domain,
            basepoint,
            origin: Vec3::zeros(),
        };
        let n = 24;
        for i in 0..=n {
            for j in 0..=n {
                let u = domain.u.0 + domain.u_span() * i as f64 / n as f64;
                let v = domain.v.0 + domain.v_span() * j as f64 / n as f64;
                let w = Complex64::new(u, v);
                let fv = (patch.f)(w);
                let gv = (patch.g)(w);
                let fg2 = fv * gv * gv;
                if !fv.is_finite() || !gv.is_finite() || !fg2.is_finite() || gv.norm() > 1e8 {
                    return Err(Error::Domain { u, v });
                }
            }
        }
        Ok(patch)
    }

    /// The integrand phi(w) = (f(1 - g^2), i f (1 + g^2), 2 f g).
    fn phi(&self, w: Complex64) -> CVec3 {
        let f = (self.f)(w);
        let g = (self.g)(w);
        let one = Complex64::new(1.0, 0.0);
        CVec3::new(
            f * (one - g * g),
            Complex64::i() * f * (one + g * g),
            2.0 * f * g,
        )
    }

    /// d phi / d w from the derivative data.
    fn phi_prime(&self, w: Complex64) -> CVec3 {
        let f = (self.f)(w);
        let g = (self.g)(w);
        let fp = (self.fp)(w);
        let gp = (self.gp)(w);
        let one = Complex64::new(1.0, 0.0);
        CVec3::new(
            fp * (one - g * g) - 2.0 * f * g * gp,
            Complex64::i() * (fp * (one + g * g) + 2.0 * f * g * gp),
            2.0 * (fp * g + f * gp),
        )
    }

    /// Path integral of phi from the basepoint: two straight legs
    /// (horizontal then vertical), composite Gauss-Legendre per leg. phi is
    /// analytic on the domain, so the path choice is immaterial.
    fn integral(&self, w: Complex64) -> CVec3 {
        let mid = Complex64::new(w.re, self.basepoint.im);
        let mut total = CVec3::zeros();
        for (a, b) in [(self.basepoint, mid), (mid, w)] {
            let d = b - a;
            let len = d.norm();
            if len == 0.0 {
                continue;
            }
            let panels = ((len / 0.05).ceil() as usize).clamp(4, 400);
            for axis in 0..3 {
                let re = crate::numerics::gauss_legendre(
                    |t| (self.phi(a + d * t)[axis] * d).re,
                    0.0,
                    1.0,
                    panels,
                );
                let im = crate::numerics::gauss_legendre(
                    |t| (self.phi(a + d * t)[axis] * d).im,
                    0.0,
                    1.0,
                    panels,
                );
                total[axis] += Complex64::new(re, im);
            }
        }
        total
    }

    /// Gaussian curvature from the closed form, consistent with the
    /// constructed immersion.
    pub fn k_closed_form(&self, u: f64, v: f64) -> f64 {
        let w = Complex64::new(u, v);
        let f = (self.f)(w).norm();
        let g = (self.g)(w).norm();
        let gp = (self.gp)(w).norm();
        let den = f * (1.0 + g * g) * (1.0 + g * g);
        -4.0 * gp * gp / (den * den)
    }
}

impl ParamPatch for WeierstrassPatch {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn position(&self, u: f64, v: f64) -> Vec3 {
        let w = Complex64::new(u, v);
        let i = self.integral(w);
        Vec3::new(i.x.re, i.y.re, i.z.re) + self.origin
    }

    /// Exact jets: X_u = Re phi, X_v = -Im phi, and second derivatives from
    /// phi' (holomorphy gives X_uu = Re phi' = -X_vv, X_uv = -Im phi').
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let w = Complex64::new(u, v);
        let p = self.phi(w);
        let pp = self.phi_prime(w);
        let re = |c: CVec3| Vec3::new(c.x.re, c.y.re, c.z.re);
        let im = |c: CVec3| Vec3::new(c.x.im, c.y.im, c.z.im);
        PatchJet {
            xu: re(p),
            xv: -im(p),
            xuu: re(pp),
            xuv: -im(pp),
            xvv: -re(pp),
        }
    }

    fn normal(&self, u: f64, v: f64) -> Vec3 {
        // stereographic Gauss map; orientation fixed against X_u x X_v
        let w = Complex64::new(u, v);
        let g = (self.g)(w);
        let d = 1.0 + g.norm_sqr();
        let n = Vec3::new(2.0 * g.re, 2.0 * g.im, g.norm_sqr() - 1.0) / d;
        let j = self.jet(u, v);
        if j.xu.cross(&j.xv).dot(&n) >= 0.0 {
            n
        } else {
            -n
        }
    }

    fn gaussian_curvature(&self, u: f64, v: f64) -> f64 {
        self.k_closed_form(u, v)
    }

    fn conformal_factor(&self, u: f64, v: f64) -> Option<f64> {
        let w = Complex64::new(u, v);
        let f = (self.f)(w).norm();
        let g = (self.g)(w).norm_sqr();
        let lam = f * (1.0 + g);
        Some(lam * lam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::patch::conformality_residual;
    use approx::assert_relative_eq;

    #[test]
    fn catenoid_positions_match_closed_form() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Catenoid, 0.8);
        for &(u, v) in &[(0.0, 0.0), (0.4, 1.3), (-0.6, 4.0), (0.8, 6.0)] {
            let x = p.position(u, v);
            let expect = 2.0
                * Vec3::new(
                    f64::cosh(u) * v.cos() - 1.0,
                    f64::cosh(u) * v.sin(),
                    u,
                );
            assert!((x - expect).norm() < 1e-12, "at ({u}, {v}): {x:?} vs {expect:?}");
        }
    }

    #[test]
    fn catenoid_is_minimal_and_conformal() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Catenoid, 0.8);
        for &(u, v) in &[(0.0, 0.1), (0.5, 2.0), (-0.7, 5.5)] {
            assert!(p.mean_curvature(u, v).abs() <= 1e-13);
        }
        assert!(conformality_residual(&p, 12, 12) <= 1e-12);
        // conformal factor matches the doubled catenoid metric 4 cosh^2 u
        assert_relative_eq!(
            p.conformal_factor(0.3, 1.0).unwrap(),
            4.0 * f64::cosh(0.3).powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn gaussian_curvature_closed_form_vs_geometry() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Catenoid, 0.8);
        // doubled catenoid (c = 2): K = -1/(4 cosh^4 u)
        for u in [-0.5, 0.0, 0.6] {
            let expect = -1.0 / (4.0 * f64::cosh(u).powi(4));
            assert_relative_eq!(p.k_closed_form(u, 1.0), expect, epsilon = 1e-12);
            // and the jet route agrees
            let j = p.jet(u, 1.0);
            let nu = j.xu.cross(&j.xv).normalize();
            let (e, f, g) = (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv));
            let (l, m, n2) = (j.xuu.dot(&nu), j.xuv.dot(&nu), j.xvv.dot(&nu));
            let k_geom = (l * n2 - m * m) / (e * g - f * f);
            assert_relative_eq!(k_geom, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn k_is_nonpositive_everywhere() {
        for preset in [
            WeierstrassPreset::Catenoid,
            WeierstrassPreset::Helicoid,
            WeierstrassPreset::Enneper,
        ] {
            let p = WeierstrassPatch::preset(preset, 0.9);
            let d = p.domain();
            for i in 0..=16 {
                for j in 0..=16 {
                    let u = d.u.0 + d.u_span() * i as f64 / 16.0;
                    let v = d.v.0 + d.v_span() * j as f64 / 16.0;
                    assert!(p.gaussian_curvature(u, v) <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn enneper_k_at_origin_is_minus_four() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Enneper, 0.8);
        assert_relative_eq!(p.k_closed_form(0.0, 0.0), -4.0, epsilon = 1e-14);
        // matches the finite-difference geometry of the constructed patch
        let j = p.jet(0.0, 0.0);
        let nu = j.xu.cross(&j.xv).normalize();
        let (e, f, g) = (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv));
        let (l, m, n2) = (j.xuu.dot(&nu), j.xuv.dot(&nu), j.xvv.dot(&nu));
        assert_relative_eq!((l * n2 - m * m) / (e * g - f * f), -4.0, epsilon = 1e-12);
    }

    #[test]
    fn helicoid_preset_is_minimal() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Helicoid, 0.7);
        for &(u, v) in &[(0.0, 0.3), (0.4, 2.0), (-0.5, 5.0)] {
            assert!(p.mean_curvature(u, v).abs() <= 1e-13);
        }
    }

    #[test]
    fn gauss_map_is_unit_normal() {
        let p = WeierstrassPatch::preset(WeierstrassPreset::Enneper, 0.8);
        let n = p.normal(0.3, -0.2);
        assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
        let j = p.jet(0.3, -0.2);
        assert!(n.dot(&j.xu).abs() < 1e-12);
        assert!(n.dot(&j.xv).abs() < 1e-12);
    }

    #[test]
    fn catenoid_waist_darboux_matches_closed_form() {
        // the waist circle of the catenoid (radius c = 2 here) is a line of
        // curvature and a geodesic: kappa_g = 0 (constant), |kappa_n| = 1/c,
        // tau_g = 0, all against closed-form catenoid geometry
        use crate::geom::darboux::{darboux_from_patch, UvCurve};
        let p = WeierstrassPatch::preset(WeierstrassPreset::Catenoid, 0.8);
        let waist = UvCurve::u_line(&p, 0.0);
        let b = darboux_from_patch(&p, &waist, 256).unwrap();
        for q in &b.darboux.samples {
            assert!(q.kappa_g.abs() <= 1e-6, "kappa_g = {}", q.kappa_g);
            assert!((q.kappa_n.abs() - 0.5).abs() <= 1e-6, "kappa_n = {}", q.kappa_n);
            assert!(q.tau_g.abs() <= 1e-6, "tau_g = {}", q.tau_g);
        }
        // curve curvature equals 1/radius of the waist circle
        for q in &b.curve.samples {
            assert!((q.kappa - 0.5).abs() <= 1e-6);
        }
    }

    #[test]
    fn pole_inside_domain_is_rejected() {
        let d = Domain {
            u: (-1.0, 1.0),
            v: (-1.0, 1.0),
            v_periodic: false,
        };
        let r = WeierstrassPatch::from_data(
            Box::new(|w| 1.0 / w),
            Box::new(|w| -1.0 / (w * w)),
            Box::new(|w| w),
            Box::new(|_| Complex64::new(1.0, 0.0)),
            d,
            Complex64::new(0.5, 0.5),
        );
        assert!(matches!(r, Err(Error::Domain { .. })));
    }
}
