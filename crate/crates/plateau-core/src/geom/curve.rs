//! Arc-length-sampled space curves with Frenet data, reconstruction from
//! prescribed curvature and torsion, and curvature estimation from raw points.

use crate::numerics::{rk4_step, step_count};
use crate::{Error, Result, Vec3};

/// Frenet frame plus position, the initial condition of a reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub position: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
}

impl Frame {
    /// Canonical frame at the origin: T = e_x, N = e_y, B = e_z.
    pub fn canonical() -> Self {
        Frame {
            position: Vec3::zeros(),
            tangent: Vec3::x(),
            normal: Vec3::y(),
            binormal: Vec3::z(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub s: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Arc-length-parameterized space curve with per-sample Frenet data.
#[derive(Debug, Clone)]
pub struct ArcCurve {
    pub samples: Vec<CurveSample>,
    pub length: f64,
    pub closed: bool,
    /// ||C(L) - C(0)|| measured when the closure flag was decided.
    pub closure_gap: f64,
}

impl ArcCurve {
    /// Uniform sample spacing; the constructors all emit uniform grids.
    pub fn spacing(&self) -> f64 {
        if self.samples.len() < 2 {
            0.0
        } else {
            self.length / (self.samples.len() - 1) as f64
        }
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.samples.iter().map(|q| q.position).collect()
    }

    /// Check the structural invariants: strictly increasing s, orthonormal
    /// frames with B = T x N to 1e-10.
    pub fn validate(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if w[1].s <= w[0].s {
                return Err(Error::precondition("arc-length samples not increasing"));
            }
        }
        for q in &self.samples {
            let tol = 1e-10;
            let ortho = (q.tangent.norm() - 1.0).abs().max(
                (q.normal.norm() - 1.0)
                    .abs()
                    .max((q.binormal.norm() - 1.0).abs()),
            );
            let mix = q
                .tangent
                .dot(&q.normal)
                .abs()
                .max(q.tangent.dot(&q.binormal).abs())
                .max(q.normal.dot(&q.binormal).abs());
            let handed = (q.binormal - q.tangent.cross(&q.normal)).norm();
            if ortho > tol || mix > tol || handed > tol {
                return Err(Error::precondition(format!(
                    "frame not orthonormal at s = {} (ortho {ortho:.2e}, mix {mix:.2e}, B-TxN {handed:.2e})",
                    q.s
                )));
            }
        }
        Ok(())
    }
}

/// Re-orthonormalize (T, N, B) by modified Gram-Schmidt, keeping T exact.
fn gram_schmidt(t: &mut Vec3, n: &mut Vec3, b: &mut Vec3) {
    *t = t.normalize();
    *n -= t.dot(n) * *t;
    *n = n.normalize();
    *b = t.cross(n);
}

/// Integrate the Frenet system T' = kappa N, N' = -kappa T + tau B,
/// B' = -tau N with a fixed-step RK4 scheme, re-orthonormalizing the frame
/// after every step.
///
/// kappa may touch zero at isolated points (or vanish identically); the frame
/// is propagated by parallel continuation through such zeros, which is what
/// the linear system does on its own. The closure flag is set by testing both
/// position and frame periodicity against `1e-6`, and the measured position
/// gap is recorded on the returned value.
pub fn frenet_reconstruct<K, T>(
    kappa: K,
    tau: T,
    length: f64,
    step: f64,
    initial: &Frame,
) -> Result<ArcCurve>
where
    K: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let n = step_count(length, step)?;
    let h = length / n as f64;

    let pack = |p: &Vec3, t: &Vec3, nn: &Vec3, b: &Vec3| -> [f64; 12] {
        [
            p.x, p.y, p.z, t.x, t.y, t.z, nn.x, nn.y, nn.z, b.x, b.y, b.z,
        ]
    };
    let unpack = |y: &[f64; 12]| -> (Vec3, Vec3, Vec3, Vec3) {
        (
            Vec3::new(y[0], y[1], y[2]),
            Vec3::new(y[3], y[4], y[5]),
            Vec3::new(y[6], y[7], y[8]),
            Vec3::new(y[9], y[10], y[11]),
        )
    };

    let rhs = |s: f64, y: &[f64; 12]| -> [f64; 12] {
        let k = kappa(s);
        let t = tau(s);
        let (_, tv, nv, bv) = unpack(y);
        let dp = tv;
        let dt = k * nv;
        let dn = -k * tv + t * bv;
        let db = -t * nv;
        pack(&dp, &dt, &dn, &db)
    };

    let mut y = pack(
        &initial.position,
        &initial.tangent,
        &initial.normal,
        &initial.binormal,
    );
    let mut samples = Vec::with_capacity(n + 1);
    let mut push = |s: f64, y: &[f64; 12], k: f64, t: f64| {
        let (p, tv, nv, bv) = unpack(y);
        samples.push(CurveSample {
            s,
            position: p,
            tangent: tv,
            normal: nv,
            binormal: bv,
            kappa: k,
            tau: t,
        });
    };

    push(0.0, &y, kappa(0.0), tau(0.0));
    for i in 0..n {
        let s = i as f64 * h;
        for probe in [s, s + 0.5 * h, s + h] {
            if !kappa(probe).is_finite() || !tau(probe).is_finite() {
                return Err(Error::IntegrationFailure { s: probe });
            }
        }
        y = rk4_step(&rhs, s, &y, h);
        let (p, mut tv, mut nv, mut bv) = unpack(&y);
        gram_schmidt(&mut tv, &mut nv, &mut bv);
        y = pack(&p, &tv, &nv, &bv);
        let s1 = (i + 1) as f64 * h;
        push(s1, &y, kappa(s1), tau(s1));
    }

    let first = samples.first().unwrap();
    let last = samples.last().unwrap();
    let gap = (last.position - first.position).norm();
    let frame_gap = (last.tangent - first.tangent)
        .norm()
        .max((last.normal - first.normal).norm())
        .max((last.binormal - first.binormal).norm());
    let closed = gap <= 1e-6 && frame_gap <= 1e-6;

    Ok(ArcCurve {
        samples,
        length,
        closed,
        closure_gap: gap,
    })
}

/// Per-point curvature/torsion estimate from an ordered point sequence.
#[derive(Debug, Clone)]
pub struct CurvatureEstimate {
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    /// True where the local window was (near-)collinear and kappa, tau were
    /// reported as zero.
    pub degenerate: Vec<bool>,
}

/// Estimate kappa and tau from raw points by local quintic fits in the
/// chord-length parameter over a seven-point window (five-point quartic when
/// fewer samples are available). The derivative formulas
/// kappa = |C' x C''| / |C'|^3 and tau = (C' x C'') . C''' / |C' x C''|^2
/// are parameterization-invariant, so chord length is adequate.
pub fn estimate_curvature_torsion(points: &[Vec3], closed: bool) -> Result<CurvatureEstimate> {
    let n = points.len();
    if n < 5 {
        return Err(Error::precondition(format!(
            "curvature estimation needs at least 5 points, got {n}"
        )));
    }
    for w in points.windows(2) {
        if (w[1] - w[0]).norm() == 0.0 {
            return Err(Error::precondition("consecutive points must be distinct"));
        }
    }

    let window = if n >= 7 { 7usize } else { 5 };
    let degree = if window == 7 { 5usize } else { 4 };
    let half = window / 2;

    // cumulative chord length
    let mut s = vec![0.0; n];
    for i in 1..n {
        s[i] = s[i - 1] + (points[i] - points[i - 1]).norm();
    }
    let wrap_len = if closed {
        s[n - 1] + (points[0] - points[n - 1]).norm()
    } else {
        0.0
    };

    let mut kappa = vec![0.0; n];
    let mut tau = vec![0.0; n];
    let mut degenerate = vec![false; n];

    for i in 0..n {
        // gather window indices and parameters centered at i
        let mut ts = Vec::with_capacity(window);
        let mut ps = Vec::with_capacity(window);
        if closed {
            for k in 0..window {
                let off = k as isize - half as isize;
                let j = (((i as isize + off) % n as isize) + n as isize) % n as isize;
                let mut t = s[j as usize] - s[i];
                if off < 0 && j as usize > i {
                    t -= wrap_len;
                }
                if off > 0 && (j as usize) < i {
                    t += wrap_len;
                }
                ts.push(t);
                ps.push(points[j as usize]);
            }
        } else {
            let lo = i.saturating_sub(half).min(n - window);
            for j in lo..lo + window {
                ts.push(s[j] - s[i]);
                ps.push(points[j]);
            }
        }

        let scale = (ts[window - 1] - ts[0]) / (window - 1) as f64;
        let (d1, d2, d3) = fit_derivatives(&ts, &ps, degree, scale);

        let cross = d1.cross(&d2);
        let denom = d1.norm().powi(3);
        let cn = cross.norm();
        if cn < 1e-10 * denom.max(1e-300) {
            kappa[i] = 0.0;
            tau[i] = 0.0;
            degenerate[i] = true;
        } else {
            kappa[i] = cn / denom;
            tau[i] = cross.dot(&d3) / (cn * cn);
        }
    }

    Ok(CurvatureEstimate {
        kappa,
        tau,
        degenerate,
    })
}

/// Least-squares polynomial fit of the window, returning C', C'', C''' at t = 0.
fn fit_derivatives(ts: &[f64], ps: &[Vec3], degree: usize, scale: f64) -> (Vec3, Vec3, Vec3) {
    let m = ts.len();
    let cols = degree + 1;
    let mut a = nalgebra::DMatrix::<f64>::zeros(m, cols);
    for (r, &t) in ts.iter().enumerate() {
        let x = t / scale;
        let mut p = 1.0;
        for c in 0..cols {
            a[(r, c)] = p;
            p *= x;
        }
    }
    let svd = a.svd(true, true);
    let mut deriv = [Vec3::zeros(); 3];
    for axis in 0..3 {
        let b = nalgebra::DVector::from_iterator(m, ps.iter().map(|p| p[axis]));
        let coef = svd.solve(&b, 1e-14).expect("svd solve");
        // coefficients of x^k with x = t/scale; derivatives at t = 0:
        deriv[0][axis] = coef[1] / scale;
        if cols > 2 {
            deriv[1][axis] = 2.0 * coef[2] / (scale * scale);
        }
        if cols > 3 {
            deriv[2][axis] = 6.0 * coef[3] / (scale * scale * scale);
        }
    }
    (deriv[0], deriv[1], deriv[2])
}
