//! Darboux-frame data along surface boundary curves: geodesic curvature,
//! normal curvature, geodesic torsion, and the contact angle.

use super::curve::ArcCurve;
use super::patch::ParamPatch;
use crate::numerics::derivative_uniform;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy)]
pub struct DarbouxSample {
    pub s: f64,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
    /// Oriented contact angle between the Frenet normal and the surface
    /// normal, in [-pi, pi].
    pub theta: f64,
}

/// Per-sample Darboux data along a boundary curve.
#[derive(Debug, Clone)]
pub struct DarbouxField {
    pub samples: Vec<DarbouxSample>,
    pub closed: bool,
}

impl DarbouxField {
    pub fn spacing(&self) -> f64 {
        if self.samples.len() < 2 {
            0.0
        } else {
            self.samples[1].s - self.samples[0].s
        }
    }

    pub fn kappa_g(&self) -> Vec<f64> {
        self.samples.iter().map(|q| q.kappa_g).collect()
    }
    pub fn kappa_n(&self) -> Vec<f64> {
        self.samples.iter().map(|q| q.kappa_n).collect()
    }
    pub fn tau_g(&self) -> Vec<f64> {
        self.samples.iter().map(|q| q.tau_g).collect()
    }
}

/// Rotate Frenet data into the Darboux frame for a prescribed contact angle:
/// kappa_g = kappa sin(theta), kappa_n = kappa cos(theta),
/// tau_g = theta' - tau, with theta' by centered differences. The angle
/// samples are differentiated as an open record (one-sided at the ends):
/// theta may wind, so a periodic wrap of its raw values would be wrong.
pub fn darboux_from_frenet<F>(curve: &ArcCurve, theta: F) -> DarbouxField
where
    F: Fn(f64) -> f64,
{
    let thetas: Vec<f64> = curve.samples.iter().map(|q| theta(q.s)).collect();
    let h = curve.spacing();
    let dtheta = derivative_uniform(&thetas, h, false);
    let samples = curve
        .samples
        .iter()
        .zip(thetas.iter().zip(dtheta.iter()))
        .map(|(q, (&th, &thp))| DarbouxSample {
            s: q.s,
            kappa_g: q.kappa * th.sin(),
            kappa_n: q.kappa * th.cos(),
            tau_g: thp - q.tau,
            theta: normalize_angle(th),
        })
        .collect();
    DarbouxField {
        samples,
        closed: curve.closed,
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % std::f64::consts::TAU;
    if t > std::f64::consts::PI {
        t -= std::f64::consts::TAU;
    }
    if t < -std::f64::consts::PI {
        t += std::f64::consts::TAU;
    }
    t
}

/// A curve in the parameter domain of a patch. An exact velocity closure
/// keeps the arc-length machinery at machine precision; without one the
/// velocity falls back to Richardson differences of `eval`.
pub struct UvCurve<'a> {
    pub eval: Box<dyn Fn(f64) -> (f64, f64) + 'a>,
    pub velocity: Option<Box<dyn Fn(f64) -> (f64, f64) + 'a>>,
    pub t0: f64,
    pub t1: f64,
    pub closed: bool,
}

impl<'a> UvCurve<'a> {
    pub fn new(eval: impl Fn(f64) -> (f64, f64) + 'a, t0: f64, t1: f64, closed: bool) -> Self {
        UvCurve {
            eval: Box::new(eval),
            velocity: None,
            t0,
            t1,
            closed,
        }
    }

    pub fn with_velocity(mut self, velocity: impl Fn(f64) -> (f64, f64) + 'a) -> Self {
        self.velocity = Some(Box::new(velocity));
        self
    }

    /// The v-coordinate line u = const traversed with v increasing over the
    /// patch's v-range (the positive traversal of an outer boundary).
    pub fn u_line(patch: &dyn ParamPatch, u: f64) -> Self {
        let d = patch.domain();
        UvCurve::new(move |t| (u, t), d.v.0, d.v.1, d.v_periodic)
            .with_velocity(|_| (0.0, 1.0))
    }

    /// Same line traversed with v decreasing (positive traversal of an inner
    /// boundary).
    pub fn u_line_reversed(patch: &dyn ParamPatch, u: f64) -> Self {
        let d = patch.domain();
        UvCurve::new(
            move |t| (u, d.v.0 + d.v.1 - t),
            d.v.0,
            d.v.1,
            d.v_periodic,
        )
        .with_velocity(|_| (0.0, -1.0))
    }

    /// (u', v') at t: exact when a velocity closure is attached.
    fn velocity_at(&self, t: f64) -> (f64, f64) {
        if let Some(v) = &self.velocity {
            return v(t);
        }
        let h = (self.t1 - self.t0).abs() * 1e-3;
        (
            crate::numerics::richardson_derivative(|q| (self.eval)(q).0, t, h),
            crate::numerics::richardson_derivative(|q| (self.eval)(q).1, t, h),
        )
    }

    /// (u'', v'') at t, by Richardson differences of the velocity.
    fn acceleration_at(&self, t: f64) -> (f64, f64) {
        let h = (self.t1 - self.t0).abs() * 1e-3;
        (
            crate::numerics::richardson_derivative(|q| self.velocity_at(q).0, t, h),
            crate::numerics::richardson_derivative(|q| self.velocity_at(q).1, t, h),
        )
    }
}

/// Boundary data measured on a patch: the 3D boundary curve together with its
/// Darboux field, sign convention kappa_g = T'.n with n = T x nu outward.
#[derive(Debug, Clone)]
pub struct PatchBoundary {
    pub curve: ArcCurve,
    pub darboux: DarbouxField,
}

/// Sample the Darboux data of a boundary curve lying on a patch.
///
/// The curve is sampled with `n` nodes uniformly in its parameter. All frame
/// derivatives come from the patch jets: with C(p) = X(u(p), v(p)),
/// C' = X_u u' + X_v v' and C'' expands through the second jets, and the
/// normal derivative expands through d(X_u x X_v)/dp, so the Darboux data is
/// exact up to the closure's own differentiation (machine precision on
/// straight parameter lines). Fails with a singular-patch error when the
/// first fundamental form degenerates along the curve.
pub fn darboux_from_patch(
    patch: &dyn ParamPatch,
    boundary_uv: &UvCurve,
    n: usize,
) -> Result<PatchBoundary> {
    if n < 8 {
        return Err(Error::precondition("need at least 8 boundary samples"));
    }
    // For closed curves sample one full period without the repeated endpoint.
    let m = if boundary_uv.closed { n } else { n + 1 };
    let dt = (boundary_uv.t1 - boundary_uv.t0) / n as f64;

    let mut pos = Vec::with_capacity(m);
    let mut speeds = Vec::with_capacity(m);
    let mut tangents = Vec::with_capacity(m);
    let mut nu = Vec::with_capacity(m);
    let mut samples_raw = Vec::with_capacity(m);
    for k in 0..m {
        let t = boundary_uv.t0 + dt * k as f64;
        let (u, v) = (boundary_uv.eval)(t);
        let jet = patch.jet(u, v);
        let (e, f, g) = (
            jet.xu.dot(&jet.xu),
            jet.xu.dot(&jet.xv),
            jet.xv.dot(&jet.xv),
        );
        if e * g - f * f < 1e-14 {
            return Err(Error::SingularPatch { u, v });
        }
        // parameter velocity and acceleration of the uv-curve
        let (du, dv) = boundary_uv.velocity_at(t);
        let (duu, dvv) = boundary_uv.acceleration_at(t);

        let c1 = jet.xu * du + jet.xv * dv;
        let c2 = jet.xuu * (du * du)
            + jet.xuv * (2.0 * du * dv)
            + jet.xvv * (dv * dv)
            + jet.xu * duu
            + jet.xv * dvv;
        let speed = c1.norm();
        let t_vec = c1 / speed;
        // dT/dp = C''/|C'| - C' (C'.C'')/|C'|^3
        let dt_dp = c2 / speed - c1 * (c1.dot(&c2) / (speed * speed * speed));

        // normal and its parameter derivative from W = X_u x X_v
        let w = jet.xu.cross(&jet.xv);
        let wn = w.norm();
        let nu_vec = w / wn;
        let dw = (jet.xuu * du + jet.xuv * dv).cross(&jet.xv)
            + jet.xu.cross(&(jet.xuv * du + jet.xvv * dv));
        let dnu_dp = dw / wn - w * (w.dot(&dw) / (wn * wn * wn));

        let n_vec = t_vec.cross(&nu_vec);
        let t_prime = dt_dp / speed;
        let nu_prime = dnu_dp / speed;
        let kappa_g = t_prime.dot(&n_vec);
        let kappa_n = t_prime.dot(&nu_vec);
        let tau_g = -nu_prime.dot(&n_vec);
        // contact angle from nu = cos(theta) N - sin(theta) B
        let kappa = t_prime.norm();
        let theta = if kappa > 1e-12 {
            let frenet_n = t_prime / kappa;
            let frenet_b = t_vec.cross(&frenet_n);
            (-nu_vec.dot(&frenet_b)).atan2(nu_vec.dot(&frenet_n))
        } else {
            0.0
        };
        pos.push(patch.position(u, v));
        speeds.push(speed);
        tangents.push(t_vec);
        nu.push(nu_vec);
        samples_raw.push((kappa_g, kappa_n, tau_g, theta, t_prime));
    }

    // arc length by cumulative quadrature of the speed
    let s_of = crate::numerics::cumulative_integral(&speeds, dt);
    let periodic = boundary_uv.closed;

    let samples: Vec<DarbouxSample> = (0..m)
        .map(|k| {
            let (kappa_g, kappa_n, tau_g, theta, _) = samples_raw[k];
            DarbouxSample {
                s: s_of[k],
                kappa_g,
                kappa_n,
                tau_g,
                theta,
            }
        })
        .collect();

    let length = if boundary_uv.closed {
        // extend the cumulative integral across the seam
        let mut speeds_ext = speeds.clone();
        speeds_ext.push(speeds[0]);
        crate::numerics::cumulative_integral(&speeds_ext, dt)[m]
    } else {
        s_of[m - 1]
    };

    let closure_gap = (pos[m - 1] - pos[0]).norm();
    let mut kappas = vec![0.0; m];
    let mut normals = vec![Vec3::zeros(); m];
    let mut binormals = vec![Vec3::zeros(); m];
    for k in 0..m {
        let t_prime = samples_raw[k].4;
        kappas[k] = t_prime.norm();
        let nn = if kappas[k] > 1e-12 {
            t_prime / kappas[k]
        } else {
            nu[k]
        };
        normals[k] = nn;
        binormals[k] = tangents[k].cross(&nn);
    }
    // Frenet torsion tau = -B' . N, differentiating the sampled binormal
    let mut db = vec![Vec3::zeros(); m];
    for axis in 0..3 {
        let vals: Vec<f64> = (0..m).map(|k| binormals[k][axis]).collect();
        let d = derivative_uniform(&vals, dt, periodic);
        for k in 0..m {
            db[k][axis] = d[k];
        }
    }
    let curve_samples = (0..m)
        .map(|k| super::curve::CurveSample {
            s: s_of[k],
            position: pos[k],
            tangent: tangents[k],
            normal: normals[k],
            binormal: binormals[k],
            kappa: kappas[k],
            tau: -(db[k] / speeds[k]).dot(&normals[k]),
        })
        .collect();

    Ok(PatchBoundary {
        curve: ArcCurve {
            samples: curve_samples,
            length,
            closed: boundary_uv.closed,
            closure_gap,
        },
        darboux: DarbouxField {
            samples,
            closed: boundary_uv.closed,
        },
    })
}
