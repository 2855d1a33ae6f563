//! Smooth parametric surface patches with first/second fundamental form
//! evaluators, plus the grid-backed patch used by numerically constructed
//! surfaces.

use crate::{Error, Result, Vec3};

/// Rectangular parameter domain. `v_periodic` marks patches whose v-seam is
/// geometrically identified (annuli, full-turn helicoids).
#[derive(Debug, Clone, Copy)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub v_periodic: bool,
}

impl Domain {
    pub fn u_span(&self) -> f64 {
        self.u.1 - self.u.0
    }
    pub fn v_span(&self) -> f64 {
        self.v.1 - self.v.0
    }
}

/// First and second partial derivatives of the position map.
#[derive(Debug, Clone, Copy)]
pub struct PatchJet {
    pub xu: Vec3,
    pub xv: Vec3,
    pub xuu: Vec3,
    pub xuv: Vec3,
    pub xvv: Vec3,
}

/// Smooth parametric patch.
///
/// `position` must tolerate evaluation slightly beyond the stated domain
/// (a few finite-difference steps); analytic patches do so naturally and the
/// grid patch overrides every derivative with interior stencils.
pub trait ParamPatch {
    fn domain(&self) -> Domain;
    fn position(&self, u: f64, v: f64) -> Vec3;

    /// Finite-difference step used by the default jet; concrete patches with
    /// closed-form derivatives never touch it.
    fn fd_step(&self) -> (f64, f64) {
        let d = self.domain();
        let clamp = |x: f64| x.clamp(1e-5, 5e-3);
        (clamp(d.u_span() * 5e-4), clamp(d.v_span() * 5e-4))
    }

    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let (hu, hv) = self.fd_step();
        let p = |du: f64, dv: f64| self.position(u + du, v + dv);
        let d1 = |h: f64, f: &dyn Fn(f64) -> Vec3| {
            (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
        };
        let d2 = |h: f64, f: &dyn Fn(f64) -> Vec3| {
            (-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h))
                / (12.0 * h * h)
        };
        let xu = d1(hu, &|d| p(d, 0.0));
        let xv = d1(hv, &|d| p(0.0, d));
        let xuu = d2(hu, &|d| p(d, 0.0));
        let xvv = d2(hv, &|d| p(0.0, d));
        // mixed partial: 4th-order cross stencil
        let mut xuv = Vec3::zeros();
        let c = [
            (1.0, 1.0, 64.0),
            (-1.0, -1.0, 64.0),
            (1.0, -1.0, -64.0),
            (-1.0, 1.0, -64.0),
            (2.0, 2.0, 1.0),
            (-2.0, -2.0, 1.0),
            (2.0, -2.0, -1.0),
            (-2.0, 2.0, -1.0),
            (1.0, 2.0, -8.0),
            (2.0, 1.0, -8.0),
            (-1.0, -2.0, -8.0),
            (-2.0, -1.0, -8.0),
            (1.0, -2.0, 8.0),
            (-2.0, 1.0, 8.0),
            (-1.0, 2.0, 8.0),
            (2.0, -1.0, 8.0),
        ];
        for (a, b, w) in c {
            xuv += w * p(a * hu, b * hv);
        }
        xuv /= 144.0 * hu * hv;
        PatchJet {
            xu,
            xv,
            xuu,
            xuv,
            xvv,
        }
    }

    /// Unit normal nu = X_u x X_v / |X_u x X_v|.
    fn normal(&self, u: f64, v: f64) -> Vec3 {
        let j = self.jet(u, v);
        j.xu.cross(&j.xv).normalize()
    }

    /// Coefficients (E, F, G) of the first fundamental form.
    fn first_form(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let j = self.jet(u, v);
        (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv))
    }

    fn mean_curvature(&self, u: f64, v: f64) -> f64 {
        let j = self.jet(u, v);
        let nu = j.xu.cross(&j.xv).normalize();
        let (e, f, g) = (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv));
        let (l, m, n2) = (j.xuu.dot(&nu), j.xuv.dot(&nu), j.xvv.dot(&nu));
        (e * n2 - 2.0 * f * m + g * l) / (2.0 * (e * g - f * f))
    }

    fn gaussian_curvature(&self, u: f64, v: f64) -> f64 {
        let j = self.jet(u, v);
        let nu = j.xu.cross(&j.xv).normalize();
        let (e, f, g) = (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv));
        let (l, m, n2) = (j.xuu.dot(&nu), j.xuv.dot(&nu), j.xvv.dot(&nu));
        (l * n2 - m * m) / (e * g - f * f)
    }

    /// e^zeta of an isothermal parameterization, when the patch is conformal.
    fn conformal_factor(&self, _u: f64, _v: f64) -> Option<f64> {
        None
    }
}

/// Max of |E - G|/E and |F|/E over a sample grid; the conformality residual.
pub fn conformality_residual(patch: &dyn ParamPatch, nu: usize, nv: usize) -> f64 {
    let d = patch.domain();
    let mut worst = 0.0f64;
    for i in 0..=nu {
        for j in 0..=nv {
            let u = d.u.0 + d.u_span() * i as f64 / nu as f64;
            let v = d.v.0 + d.v_span() * j as f64 / nv as f64;
            let (e, f, g) = patch.first_form(u, v);
            worst = worst.max((e - g).abs() / e).max(f.abs() / e);
        }
    }
    worst
}

/// Flat disk of radius R in the z = 0 plane, polar parameters (r, phi).
/// nu = +z, so the positively oriented boundary is the circle traversed
/// counterclockwise and carries kappa_g = -1/R.
#[derive(Debug, Clone, Copy)]
pub struct PlanarDiskPatch {
    pub radius: f64,
}

impl ParamPatch for PlanarDiskPatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (0.0, self.radius),
            v: (0.0, std::f64::consts::TAU),
            v_periodic: true,
        }
    }
    fn position(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(u * v.cos(), u * v.sin(), 0.0)
    }
    fn jet(&self, _u: f64, v: f64) -> PatchJet {
        let (c, s) = (v.cos(), v.sin());
        PatchJet {
            xu: Vec3::new(c, s, 0.0),
            xv: Vec3::new(-_u * s, _u * c, 0.0),
            xuu: Vec3::zeros(),
            xuv: Vec3::new(-s, c, 0.0),
            xvv: Vec3::new(-_u * c, -_u * s, 0.0),
        }
    }
    fn normal(&self, _u: f64, _v: f64) -> Vec3 {
        Vec3::z()
    }
    fn mean_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn gaussian_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
}

/// Flat annulus r0 <= r <= r1 in log-polar (isothermal) coordinates:
/// X(u, v) = (e^u cos v, e^u sin v, 0), conformal factor e^{2u}.
#[derive(Debug, Clone, Copy)]
pub struct PlanarAnnulusPatch {
    pub r0: f64,
    pub r1: f64,
}

impl PlanarAnnulusPatch {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        if !(0.0 < r0 && r0 < r1) {
            return Err(Error::precondition("need 0 < r0 < r1"));
        }
        Ok(PlanarAnnulusPatch { r0, r1 })
    }
}

impl ParamPatch for PlanarAnnulusPatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (self.r0.ln(), self.r1.ln()),
            v: (0.0, std::f64::consts::TAU),
            v_periodic: true,
        }
    }
    fn position(&self, u: f64, v: f64) -> Vec3 {
        let r = u.exp();
        Vec3::new(r * v.cos(), r * v.sin(), 0.0)
    }
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let r = u.exp();
        let (c, s) = (v.cos(), v.sin());
        PatchJet {
            xu: Vec3::new(r * c, r * s, 0.0),
            xv: Vec3::new(-r * s, r * c, 0.0),
            xuu: Vec3::new(r * c, r * s, 0.0),
            xuv: Vec3::new(-r * s, r * c, 0.0),
            xvv: Vec3::new(-r * c, -r * s, 0.0),
        }
    }
    fn normal(&self, _u: f64, _v: f64) -> Vec3 {
        Vec3::z()
    }
    fn mean_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn gaussian_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn conformal_factor(&self, u: f64, _v: f64) -> Option<f64> {
        Some((2.0 * u).exp())
    }
}

/// Upper unit-scale hemisphere, polar angle u in (0, pi/2], azimuth v.
/// Outward normal; serves as the non-critical control surface.
#[derive(Debug, Clone, Copy)]
pub struct HemispherePatch {
    pub radius: f64,
}

impl ParamPatch for HemispherePatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (1e-3, std::f64::consts::FRAC_PI_2),
            v: (0.0, std::f64::consts::TAU),
            v_periodic: true,
        }
    }
    fn position(&self, u: f64, v: f64) -> Vec3 {
        let r = self.radius;
        Vec3::new(r * u.sin() * v.cos(), r * u.sin() * v.sin(), r * u.cos())
    }
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let r = self.radius;
        let (su, cu, sv, cv) = (u.sin(), u.cos(), v.sin(), v.cos());
        PatchJet {
            xu: r * Vec3::new(cu * cv, cu * sv, -su),
            xv: r * Vec3::new(-su * sv, su * cv, 0.0),
            xuu: r * Vec3::new(-su * cv, -su * sv, -cu),
            xuv: r * Vec3::new(-cu * sv, cu * cv, 0.0),
            xvv: r * Vec3::new(-su * cv, -su * sv, 0.0),
        }
    }
    fn normal(&self, u: f64, v: f64) -> Vec3 {
        self.position(u, v) / self.radius
    }
    fn mean_curvature(&self, _u: f64, _v: f64) -> f64 {
        -1.0 / self.radius
    }
    fn gaussian_curvature(&self, _u: f64, _v: f64) -> f64 {
        1.0 / (self.radius * self.radius)
    }
}

/// Helicoid in isothermal coordinates, r = a sinh u:
/// X(u, v) = (a sinh u cos v, a sinh u sin v, a v), conformal factor
/// a^2 cosh^2 u. Used by the torsion-flux audit.
#[derive(Debug, Clone, Copy)]
pub struct ConformalHelicoidPatch {
    pub a: f64,
    pub u0: f64,
    pub u1: f64,
}

impl ConformalHelicoidPatch {
    /// Conformal chart covering radii r0..r1 of the helicoid with pitch
    /// parameter `a`.
    pub fn from_radii(a: f64, r0: f64, r1: f64) -> Result<Self> {
        if a == 0.0 || !(0.0 < r0 && r0 < r1) {
            return Err(Error::precondition("need a != 0 and 0 < r0 < r1"));
        }
        Ok(ConformalHelicoidPatch {
            a,
            u0: (r0 / a.abs()).asinh(),
            u1: (r1 / a.abs()).asinh(),
        })
    }

    pub fn radius_at(&self, u: f64) -> f64 {
        self.a.abs() * u.sinh()
    }
}

impl ParamPatch for ConformalHelicoidPatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (self.u0, self.u1),
            v: (0.0, std::f64::consts::TAU),
            v_periodic: true,
        }
    }
    fn position(&self, u: f64, v: f64) -> Vec3 {
        let a = self.a;
        Vec3::new(a * u.sinh() * v.cos(), a * u.sinh() * v.sin(), a * v)
    }
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let a = self.a;
        let (sh, ch, sv, cv) = (u.sinh(), u.cosh(), v.sin(), v.cos());
        PatchJet {
            xu: a * Vec3::new(ch * cv, ch * sv, 0.0),
            xv: Vec3::new(-a * sh * sv, a * sh * cv, a),
            xuu: a * Vec3::new(sh * cv, sh * sv, 0.0),
            xuv: a * Vec3::new(-ch * sv, ch * cv, 0.0),
            xvv: a * Vec3::new(-sh * cv, -sh * sv, 0.0),
        }
    }
    fn mean_curvature(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn gaussian_curvature(&self, u: f64, _v: f64) -> f64 {
        let ch = u.cosh();
        -1.0 / (self.a * self.a * ch.powi(4))
    }
    fn conformal_factor(&self, u: f64, _v: f64) -> Option<f64> {
        let c = self.a * u.cosh();
        Some(c * c)
    }
}

/// Patch backed by a uniform grid of positions, the output type of the
/// Björling construction. Derivatives use 4th-order grid stencils (one-sided
/// near edges); off-node positions use local 4x4 Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct GridPatch {
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    /// values[j][i] = X(u0 + i hu, v0 + j hv)
    pub values: Vec<Vec<Vec3>>,
    pub conformal: bool,
}

impl GridPatch {
    pub fn nu(&self) -> usize {
        self.values[0].len()
    }
    pub fn nv(&self) -> usize {
        self.values.len()
    }

    pub fn node(&self, i: usize, j: usize) -> Vec3 {
        self.values[j][i]
    }

    fn axis_index(&self, x: f64, x0: f64, h: f64, n: usize) -> (usize, f64) {
        let t = (x - x0) / h;
        let i = t.floor().clamp(0.0, (n - 2) as f64) as usize;
        (i, t - i as f64)
    }

    /// Jet from 4th-order stencils at the nearest grid node. Positions on the
    /// Björling grid are only meaningful node-aligned; interior audits only
    /// query nodes.
    pub fn node_jet(&self, i: usize, j: usize) -> PatchJet {
        let nu = self.nu();
        let nv = self.nv();
        let sample = |ii: isize, jj: isize| -> Vec3 {
            let ii = ii.clamp(0, nu as isize - 1) as usize;
            let jj = jj.clamp(0, nv as isize - 1) as usize;
            self.values[jj][ii]
        };
        let line_d1 = |f: &dyn Fn(isize) -> Vec3, at: isize, n: isize, h: f64| -> Vec3 {
            let c = at.clamp(2, n - 3);
            let d = (f(c - 2) - 8.0 * f(c - 1) + 8.0 * f(c + 1) - f(c + 2)) / (12.0 * h);
            if c == at {
                d
            } else {
                // shift by Taylor using the second derivative at the clamped node
                let dd = (-f(c - 2) + 16.0 * f(c - 1) - 30.0 * f(c) + 16.0 * f(c + 1)
                    - f(c + 2))
                    / (12.0 * h * h);
                let d3 = (-f(c - 2) + 2.0 * f(c - 1) - 2.0 * f(c + 1) + f(c + 2))
                    / (2.0 * h * h * h);
                let dx = (at - c) as f64 * h;
                d + dx * dd + 0.5 * dx * dx * d3
            }
        };
        let line_d2 = |f: &dyn Fn(isize) -> Vec3, at: isize, n: isize, h: f64| -> Vec3 {
            let c = at.clamp(2, n - 3);
            let dd = (-f(c - 2) + 16.0 * f(c - 1) - 30.0 * f(c) + 16.0 * f(c + 1) - f(c + 2))
                / (12.0 * h * h);
            if c == at {
                dd
            } else {
                let d3 = (-f(c - 2) + 2.0 * f(c - 1) - 2.0 * f(c + 1) + f(c + 2))
                    / (2.0 * h * h * h);
                dd + (at - c) as f64 * h * d3
            }
        };
        let fu = |ii: isize| sample(ii, j as isize);
        let fv = |jj: isize| sample(i as isize, jj);
        let xu = line_d1(&fu, i as isize, nu as isize, self.hu);
        let xv = line_d1(&fv, j as isize, nv as isize, self.hv);
        let xuu = line_d2(&fu, i as isize, nu as isize, self.hu);
        let xvv = line_d2(&fv, j as isize, nv as isize, self.hv);
        // mixed: derivative in v of the u-derivatives along nearby rows
        let dxu_row = |jj: isize| -> Vec3 {
            let f = |ii: isize| sample(ii, jj);
            line_d1(&f, i as isize, nu as isize, self.hu)
        };
        let xuv = line_d1(&dxu_row, j as isize, nv as isize, self.hv);
        PatchJet {
            xu,
            xv,
            xuu,
            xuv,
            xvv,
        }
    }
}

impl ParamPatch for GridPatch {
    fn domain(&self) -> Domain {
        Domain {
            u: (self.u0, self.u0 + self.hu * (self.nu() - 1) as f64),
            v: (self.v0, self.v0 + self.hv * (self.nv() - 1) as f64),
            v_periodic: false,
        }
    }

    fn position(&self, u: f64, v: f64) -> Vec3 {
        let nu = self.nu();
        let nv = self.nv();
        let (iu, fu) = self.axis_index(u, self.u0, self.hu, nu);
        let (jv, fv) = self.axis_index(v, self.v0, self.hv, nv);
        if fu.abs() < 1e-12 && fv.abs() < 1e-12 {
            return self.values[jv][iu];
        }
        // local 4x4 Lagrange tensor interpolation
        let base_u = iu.saturating_sub(1).min(nu.saturating_sub(4));
        let base_v = jv.saturating_sub(1).min(nv.saturating_sub(4));
        let tu = (u - (self.u0 + base_u as f64 * self.hu)) / self.hu;
        let tv = (v - (self.v0 + base_v as f64 * self.hv)) / self.hv;
        let w = |t: f64| -> [f64; 4] {
            let mut w = [0.0; 4];
            for (i, wi) in w.iter_mut().enumerate() {
                let mut p = 1.0;
                for k in 0..4 {
                    if k != i {
                        p *= (t - k as f64) / (i as f64 - k as f64);
                    }
                }
                *wi = p;
            }
            w
        };
        let wu = w(tu);
        let wv = w(tv);
        let mut out = Vec3::zeros();
        for (dj, wvj) in wv.iter().enumerate() {
            for (di, wui) in wu.iter().enumerate() {
                out += wvj * wui * self.values[(base_v + dj).min(nv - 1)][(base_u + di).min(nu - 1)];
            }
        }
        out
    }

    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let (iu, _) = self.axis_index(u, self.u0, self.hu, self.nu());
        let (jv, _) = self.axis_index(v, self.v0, self.hv, self.nv());
        self.node_jet(iu, jv)
    }

    fn conformal_factor(&self, u: f64, v: f64) -> Option<f64> {
        if self.conformal {
            let j = self.jet(u, v);
            Some(j.xu.dot(&j.xu))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_patch_forms() {
        let p = PlanarDiskPatch { radius: 2.0 };
        assert_eq!(p.normal(1.0, 0.3), Vec3::z());
        assert_eq!(p.mean_curvature(1.0, 0.3), 0.0);
        let (e, f, g) = p.first_form(1.5, 1.0);
        assert_relative_eq!(e, 1.0);
        assert_relative_eq!(f, 0.0);
        assert_relative_eq!(g, 2.25);
    }

    #[test]
    fn hemisphere_curvatures() {
        let p = HemispherePatch { radius: 1.0 };
        assert_relative_eq!(p.gaussian_curvature(0.6, 1.0), 1.0);
        assert_relative_eq!(p.mean_curvature(0.6, 1.0), -1.0);
        // normal is unit and outward
        let n = p.normal(0.7, 2.0);
        assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
        assert!(n.dot(&p.position(0.7, 2.0)) > 0.0);
    }

    #[test]
    fn default_fd_jet_matches_exact_jet() {
        // evaluate the hemisphere through the default FD path and compare
        struct Raw(HemispherePatch);
        impl ParamPatch for Raw {
            fn domain(&self) -> Domain {
                self.0.domain()
            }
            fn position(&self, u: f64, v: f64) -> Vec3 {
                self.0.position(u, v)
            }
        }
        let exact = HemispherePatch { radius: 1.0 };
        let raw = Raw(exact);
        let (u, v) = (0.9, 1.7);
        let je = exact.jet(u, v);
        let jf = raw.jet(u, v);
        for (a, b) in [
            (je.xu, jf.xu),
            (je.xv, jf.xv),
            (je.xuu, jf.xuu),
            (je.xuv, jf.xuv),
            (je.xvv, jf.xvv),
        ] {
            assert!((a - b).norm() < 1e-8, "jet mismatch {a:?} vs {b:?}");
        }
        assert!((raw.mean_curvature(u, v) - (-1.0)).abs() < 1e-7);
        assert!((raw.gaussian_curvature(u, v) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn conformal_helicoid_is_conformal() {
        let p = ConformalHelicoidPatch::from_radii(1.0, 1.0, 2.0).unwrap();
        assert!(conformality_residual(&p, 20, 20) <= 1e-10);
        let u = (1.0f64).asinh();
        assert_relative_eq!(
            p.conformal_factor(u, 0.0).unwrap(),
            u.cosh().powi(2),
            epsilon = 1e-12
        );
        assert_eq!(p.mean_curvature(u, 1.0), 0.0);
    }

    #[test]
    fn planar_annulus_is_conformal_flat() {
        let p = PlanarAnnulusPatch::new(1.0, 2.0).unwrap();
        assert!(conformality_residual(&p, 16, 16) <= 1e-12);
        assert_eq!(p.gaussian_curvature(0.3, 0.1), 0.0);
    }

    #[test]
    fn grid_patch_reproduces_analytic_surface() {
        // sample a saddle and check jets against closed form
        let (nu, nv) = (81, 61);
        let (hu, hv) = (0.02, 0.02);
        let f = |u: f64, v: f64| Vec3::new(u, v, u * u - v * v + 0.3 * u * v);
        let values: Vec<Vec<Vec3>> = (0..nv)
            .map(|j| {
                (0..nu)
                    .map(|i| f(i as f64 * hu, j as f64 * hv))
                    .collect()
            })
            .collect();
        let g = GridPatch {
            u0: 0.0,
            v0: 0.0,
            hu,
            hv,
            values,
            conformal: false,
        };
        let j = g.node_jet(40, 30);
        let (u, v) = (0.8, 0.6);
        assert!((j.xu - Vec3::new(1.0, 0.0, 2.0 * u + 0.3 * v)).norm() < 1e-9);
        assert!((j.xv - Vec3::new(0.0, 1.0, -2.0 * v + 0.3 * u)).norm() < 1e-9);
        assert!((j.xuu - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-8);
        assert!((j.xvv - Vec3::new(0.0, 0.0, -2.0)).norm() < 1e-8);
        assert!((j.xuv - Vec3::new(0.0, 0.0, 0.3)).norm() < 1e-8);
        // off-node interpolation
        let p = g.position(0.803, 0.611);
        assert!((p - f(0.803, 0.611)).norm() < 1e-9);
    }
}
