//! Analytic continuation of boundary curves to a complex strip and the
//! Schwarz integral that builds the minimal surface through them.
//!
//! Curvature and torsion of an equilibrium boundary curve solve a
//! polynomial-coefficient ODE system, so their analytic extensions are
//! computed by integrating the same system along paths in the complex plane
//! (vertical lines from the real axis), together with the complexified frame
//! system dC/dz = T, dT/dz = kappa N, dN/dz = -kappa T + tau B,
//! dB/dz = -tau N.

use crate::audit::{AuditReport, CheckRecord};
use crate::boundary::BoundaryState;
use crate::convention::Sheet;
use crate::elastica::EnergyParams;
use crate::geom::mesh::{mesh_from_patch, TriMesh};
use crate::geom::patch::GridPatch;
use crate::numerics::{cumulative_integral, simpson};
use crate::{CVec3, Error, Result, Vec3};
use num_complex::Complex64;

/// One node of the complexified curve record.
#[derive(Debug, Clone, Copy)]
pub struct StripNode {
    pub c: CVec3,
    pub tangent: CVec3,
    pub normal: CVec3,
    pub binormal: CVec3,
    pub kappa: Complex64,
    pub tau: Complex64,
}

/// Grid over z = s + i t, s in [0, s_len], t in [-t_half, t_half].
pub struct ComplexStrip {
    pub sheet: Sheet,
    pub s_len: f64,
    pub t_half: f64,
    /// s-intervals; columns = ns + 1.
    pub ns: usize,
    /// t-intervals per half strip; rows = 2 * nt_half + 1, row nt_half is the
    /// real axis.
    pub nt_half: usize,
    /// rows[it][is], it = 0 at t = -t_half.
    pub rows: Vec<Vec<StripNode>>,
    /// Torsion invariant constant (equilibrium sources only).
    pub c_invariant: Option<Complex64>,
}

impl ComplexStrip {
    pub fn hs(&self) -> f64 {
        self.s_len / self.ns as f64
    }
    pub fn ht(&self) -> f64 {
        self.t_half / self.nt_half as f64
    }
    pub fn real_row(&self) -> &[StripNode] {
        &self.rows[self.nt_half]
    }
    pub fn z_at(&self, is: usize, it: usize) -> Complex64 {
        Complex64::new(
            is as f64 * self.hs(),
            (it as f64 - self.nt_half as f64) * self.ht(),
        )
    }

    /// Max deviation of the complexified frame relations, checked with
    /// 4th-order finite differences along the vertical columns.
    pub fn frenet_residual(&self) -> f64 {
        let ht = self.ht();
        let rows = self.rows.len();
        let mut worst = 0.0f64;
        for is in 0..=self.ns {
            for it in 2..rows - 2 {
                let eight = Complex64::new(8.0, 0.0);
                let d = |f: &dyn Fn(usize) -> CVec3| -> CVec3 {
                    (f(it - 2) - f(it - 1) * eight + f(it + 1) * eight - f(it + 2))
                        / Complex64::new(0.0, 12.0 * ht)
                };
                let node = &self.rows[it][is];
                let dc = d(&|k| self.rows[k][is].c);
                let dt = d(&|k| self.rows[k][is].tangent);
                let dn = d(&|k| self.rows[k][is].normal);
                let db = d(&|k| self.rows[k][is].binormal);
                let r1 = (dc - node.tangent).norm();
                let r2 = (dt - node.normal * node.kappa).norm();
                let r3 = (dn + node.tangent * node.kappa - node.binormal * node.tau).norm();
                let r4 = (db + node.normal * node.tau).norm();
                worst = worst.max(r1).max(r2).max(r3).max(r4);
            }
        }
        worst
    }

    /// Max |t = 0 imaginary part|: the restriction to the real axis must be real.
    pub fn real_axis_imaginary_part(&self) -> f64 {
        self.real_row()
            .iter()
            .map(|n| {
                n.c.iter()
                    .chain(n.tangent.iter())
                    .chain(n.binormal.iter())
                    .map(|c| c.im.abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    }
}

/// What drives the curvature data of the continued curve.
pub enum CurvatureSource<'a> {
    /// The equilibrium boundary system on the given sheet.
    Equilibrium {
        params: EnergyParams,
        state0: BoundaryState,
    },
    /// Prescribed complex-analytic kappa(z), tau(z) (fixtures).
    Prescribed {
        kappa: &'a dyn Fn(Complex64) -> Complex64,
        tau: &'a dyn Fn(Complex64) -> Complex64,
        initial: crate::geom::curve::Frame,
    },
}

const STATE_LEN: usize = 30;
type State = [f64; STATE_LEN];

fn pack(c: &CVec3, t: &CVec3, n: &CVec3, b: &CVec3, k: Complex64, kp: Complex64, tau: Complex64) -> State {
    let mut y = [0.0; STATE_LEN];
    for (slot, v) in [c, t, n, b].iter().enumerate() {
        for axis in 0..3 {
            y[slot * 6 + axis * 2] = v[axis].re;
            y[slot * 6 + axis * 2 + 1] = v[axis].im;
        }
    }
    y[24] = k.re;
    y[25] = k.im;
    y[26] = kp.re;
    y[27] = kp.im;
    y[28] = tau.re;
    y[29] = tau.im;
    y
}

fn unpack(y: &State) -> (CVec3, CVec3, CVec3, CVec3, Complex64, Complex64, Complex64) {
    let vec = |slot: usize| -> CVec3 {
        CVec3::new(
            Complex64::new(y[slot * 6], y[slot * 6 + 1]),
            Complex64::new(y[slot * 6 + 2], y[slot * 6 + 3]),
            Complex64::new(y[slot * 6 + 4], y[slot * 6 + 5]),
        )
    };
    (
        vec(0),
        vec(1),
        vec(2),
        vec(3),
        Complex64::new(y[24], y[25]),
        Complex64::new(y[26], y[27]),
        Complex64::new(y[28], y[29]),
    )
}

/// Analytic re-normalization of the frame against the bilinear form: keeps
/// T.T = N.N = B.B = 1 and the frame relations exact along long columns.
fn bilinear_orthonormalize(t: &mut CVec3, n: &mut CVec3, b: &mut CVec3) {
    let dot = |a: &CVec3, c: &CVec3| -> Complex64 { a.x * c.x + a.y * c.y + a.z * c.z };
    let tt = dot(t, t).sqrt();
    if (tt - Complex64::new(1.0, 0.0)).norm() < 0.5 {
        *t /= tt;
        let proj = dot(n, t);
        *n -= *t * proj;
        let nn = dot(n, n).sqrt();
        if (nn - Complex64::new(1.0, 0.0)).norm() < 0.5 {
            *n /= nn;
            let bx = t.y * n.z - t.z * n.y;
            let by = t.z * n.x - t.x * n.z;
            let bz = t.x * n.y - t.y * n.x;
            *b = CVec3::new(bx, by, bz);
        }
    }
}

struct StripRhs<'a> {
    source: &'a CurvatureSource<'a>,
    sheet: Sheet,
    /// z(p) = z0 + dir * p along the current leg.
    z0: Complex64,
    dir: Complex64,
}

impl<'a> StripRhs<'a> {
    fn eval(&self, p: f64, y: &State) -> State {
        let (_, t, n, b, k_state, kp_state, tau_state) = unpack(y);
        let z = self.z0 + self.dir * p;
        let (kappa, tau, dk, dkp, dtau) = match self.source {
            CurvatureSource::Equilibrium { params, .. } => {
                let s = self.sheet.sign();
                let (sig, eta, al, be) = (params.sigma, params.eta, params.alpha, params.beta);
                let kpp = (-(al * k_state * k_state - 2.0 * al * tau_state * tau_state - be)
                    * k_state
                    + s * eta * tau_state * tau_state
                    - Complex64::new(s * sig, 0.0))
                    / (2.0 * al);
                let chart = 2.0 * al * k_state + Complex64::new(s * eta, 0.0);
                let dtau = -4.0 * al * kp_state * tau_state / chart;
                (k_state, tau_state, kp_state, kpp, dtau)
            }
            CurvatureSource::Prescribed { kappa, tau, .. } => {
                let zero = Complex64::new(0.0, 0.0);
                (kappa(z), tau(z), zero, zero, zero)
            }
        };
        let dc = t;
        let dt = n * kappa;
        let dn = -t * kappa + b * tau;
        let db = -n * tau;
        let mut out = pack(&dc, &dt, &dn, &db, dk, dkp, dtau);
        // multiply the whole derivative by dz/dp
        for i in (0..STATE_LEN).step_by(2) {
            let v = Complex64::new(out[i], out[i + 1]) * self.dir;
            out[i] = v.re;
            out[i + 1] = v.im;
        }
        out
    }
}

fn rk4_complex(rhs: &StripRhs, p: f64, y: &State, h: f64) -> State {
    crate::numerics::rk4_step(&|pp, yy| rhs.eval(pp, yy), p, y, h)
}

const BLOWUP: f64 = 1e8;

fn state_magnitude(y: &State) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Continue a boundary curve to the complex strip. The half-width shrinks
/// automatically when the continuation blows up before reaching the request;
/// the achieved half-width is reported on the strip. Fails outright when even
/// a sliver of the requested strip is unreachable.
pub fn continue_boundary(
    source: CurvatureSource,
    sheet: Sheet,
    s_len: f64,
    t_half: f64,
    ns: usize,
    nt_half: usize,
) -> Result<ComplexStrip> {
    if ns < 8 || nt_half < 4 {
        return Err(Error::precondition("strip grid too coarse (ns >= 8, nt >= 4)"));
    }
    if !(s_len > 0.0 && t_half > 0.0) {
        return Err(Error::precondition("need s_len > 0 and t_half > 0"));
    }
    if let CurvatureSource::Equilibrium { params, state0 } = &source {
        if params.eta == 0.0 || params.alpha == 0.0 {
            return Err(Error::precondition(
                "equilibrium continuation needs eta != 0 and alpha != 0",
            ));
        }
        let chart = 2.0 * params.alpha * (sheet.sign() * state0.kappa_g) + sheet.sign() * params.eta;
        if chart.abs() < 1e-10 {
            return Err(Error::precondition("initial state on the chart singularity"));
        }
    }

    // initial state on the real axis
    let (y0, c_invariant) = match &source {
        CurvatureSource::Equilibrium { params, state0 } => {
            let s = sheet.sign();
            let k0 = Complex64::new(s * state0.kappa_g, 0.0);
            let kp0 = Complex64::new(s * state0.kappa_g_prime, 0.0);
            let tau0 = Complex64::new(-state0.tau_g, 0.0);
            let chart = 2.0 * params.alpha * k0 + Complex64::new(s * params.eta, 0.0);
            let c = -tau0 * chart * chart;
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            (
                pack(
                    &CVec3::zeros(),
                    &CVec3::new(one, zero, zero),
                    &CVec3::new(zero, one, zero),
                    &CVec3::new(zero, zero, one),
                    k0,
                    kp0,
                    tau0,
                ),
                Some(c),
            )
        }
        CurvatureSource::Prescribed { initial, kappa, tau } => {
            let z0 = Complex64::new(0.0, 0.0);
            let cplx = |v: Vec3| CVec3::new(v.x.into(), v.y.into(), v.z.into());
            (
                pack(
                    &cplx(initial.position),
                    &cplx(initial.tangent),
                    &cplx(initial.normal),
                    &cplx(initial.binormal),
                    kappa(z0),
                    Complex64::new(0.0, 0.0),
                    tau(z0),
                ),
                None,
            )
        }
    };

    // real-axis pass, substepped well below the output spacing so the grid
    // values stay accurate to ~1e-10 (the conformality audit sees the
    // z-derivative of any integration error)
    let hs = s_len / ns as f64;
    let sub_s = ((hs / 1e-3).ceil() as usize).max(1);
    let mut real_row: Vec<State> = Vec::with_capacity(ns + 1);
    {
        let rhs = StripRhs {
            source: &source,
            sheet,
            z0: Complex64::new(0.0, 0.0),
            dir: Complex64::new(1.0, 0.0),
        };
        let mut y = y0;
        real_row.push(y);
        let hsub = hs / sub_s as f64;
        for i in 0..ns {
            for j in 0..sub_s {
                y = rk4_complex(&rhs, i as f64 * hs + j as f64 * hsub, &y, hsub);
            }
            if state_magnitude(&y) > BLOWUP {
                return Err(Error::StripBlowup { t_safe: 0.0 });
            }
            let (c, mut t, mut n, mut b, k, kp, tau) = unpack(&y);
            bilinear_orthonormalize(&mut t, &mut n, &mut b);
            y = pack(&c, &t, &n, &b, k, kp, tau);
            real_row.push(y);
        }
    }

    // probe pass: find the safe half-width by coarse vertical integrations
    let mut t_safe = t_half;
    {
        let probe_cols: Vec<usize> = (0..=8).map(|k| k * ns / 8).collect();
        let coarse_steps = nt_half.max(16);
        let ht = t_half / coarse_steps as f64;
        for &col in &probe_cols {
            for dir_sign in [1.0f64, -1.0] {
                let rhs = StripRhs {
                    source: &source,
                    sheet,
                    z0: Complex64::new(col as f64 * hs, 0.0),
                    dir: Complex64::new(0.0, dir_sign),
                };
                let mut y = real_row[col];
                for k in 0..coarse_steps {
                    y = rk4_complex(&rhs, k as f64 * ht, &y, ht);
                    if state_magnitude(&y) > BLOWUP {
                        t_safe = t_safe.min(0.9 * k as f64 * ht);
                        break;
                    }
                }
            }
        }
    }
    if t_safe < 1e-3 * t_half {
        return Err(Error::StripBlowup { t_safe });
    }
    let t_half = t_safe;

    // full column pass
    let ht = t_half / nt_half as f64;
    let rows_n = 2 * nt_half + 1;
    let blank = StripNode {
        c: CVec3::zeros(),
        tangent: CVec3::zeros(),
        normal: CVec3::zeros(),
        binormal: CVec3::zeros(),
        kappa: Complex64::new(0.0, 0.0),
        tau: Complex64::new(0.0, 0.0),
    };
    let mut rows = vec![vec![blank; ns + 1]; rows_n];
    let to_node = |y: &State, z: Complex64, source: &CurvatureSource| -> StripNode {
        let (c, t, n, b, k, _, tau) = unpack(y);
        let (kappa, tau) = match source {
            CurvatureSource::Equilibrium { .. } => (k, tau),
            CurvatureSource::Prescribed { kappa, tau, .. } => (kappa(z), tau(z)),
        };
        StripNode {
            c,
            tangent: t,
            normal: n,
            binormal: b,
            kappa,
            tau,
        }
    };
    for (col, y_real) in real_row.iter().enumerate() {
        let z_real = Complex64::new(col as f64 * hs, 0.0);
        rows[nt_half][col] = to_node(y_real, z_real, &source);
        for dir_sign in [1.0f64, -1.0] {
            let rhs = StripRhs {
                source: &source,
                sheet,
                z0: z_real,
                dir: Complex64::new(0.0, dir_sign),
            };
            let sub_t = ((ht / 1.5e-3).ceil() as usize).max(1);
            let hsub = ht / sub_t as f64;
            let mut y = *y_real;
            for k in 0..nt_half {
                for j in 0..sub_t {
                    y = rk4_complex(&rhs, k as f64 * ht + j as f64 * hsub, &y, hsub);
                }
                if state_magnitude(&y) > BLOWUP {
                    return Err(Error::StripBlowup {
                        t_safe: k as f64 * ht,
                    });
                }
                let (c, mut t, mut n, mut b, kk, kp, tt) = unpack(&y);
                bilinear_orthonormalize(&mut t, &mut n, &mut b);
                y = pack(&c, &t, &n, &b, kk, kp, tt);
                let it = (nt_half as isize + dir_sign as isize * (k as isize + 1)) as usize;
                let z = z_real + Complex64::new(0.0, dir_sign * (k + 1) as f64 * ht);
                rows[it][col] = to_node(&y, z, &source);
            }
        }
    }

    Ok(ComplexStrip {
        sheet,
        s_len,
        t_half,
        ns,
        nt_half,
        rows,
        c_invariant: c_invariant.map(|c| c),
    })
}

/// The Björling build: surface grid, mesh, and the attached audit.
pub struct BjorlingBuild {
    pub patch: GridPatch,
    pub mesh: TriMesh,
    pub report: AuditReport,
}

/// Evaluate the Schwarz integral X = Re(C(z) + i * integral of T x nu) over
/// the strip and audit the construction. The co-normal integrand T x nu
/// equals sheet_sign * N, available at every node; the cumulative integral
/// uses a smooth 6th-order rule (a composite-Simpson pass at full and half
/// resolution cross-checks it and lands in the report).
pub fn bjorling_surface(strip: &ComplexStrip) -> Result<BjorlingBuild> {
    let sgn = strip.sheet.sign();
    let ns = strip.ns;
    let rows_n = 2 * strip.nt_half + 1;
    let hs = strip.hs();
    let ht = strip.ht();

    // integrand n(z) = sheet * N(z) at every node
    let integrand = |is: usize, it: usize| -> CVec3 { strip.rows[it][is].normal * Complex64::new(sgn, 0.0) };

    // cumulative integral along the real axis (dz = ds)
    let mut i_real: Vec<CVec3> = vec![CVec3::zeros(); ns + 1];
    for axis in 0..3 {
        for part in 0..2 {
            let series: Vec<f64> = (0..=ns)
                .map(|is| {
                    let v = integrand(is, strip.nt_half)[axis];
                    if part == 0 {
                        v.re
                    } else {
                        v.im
                    }
                })
                .collect();
            let cum = cumulative_integral(&series, hs);
            for is in 0..=ns {
                let c = &mut i_real[is][axis];
                if part == 0 {
                    *c += Complex64::new(cum[is], 0.0);
                } else {
                    *c += Complex64::new(0.0, cum[is]);
                }
            }
        }
    }

    // vertical legs: dz = i dt upward from the real axis, -i dt downward
    let mut values = vec![vec![Vec3::zeros(); ns + 1]; rows_n];
    for is in 0..=ns {
        for dir_sign in [1.0f64, -1.0] {
            // series of n along the half-column, starting at the real axis
            let mut col: Vec<CVec3> = Vec::with_capacity(strip.nt_half + 1);
            for k in 0..=strip.nt_half {
                let it = (strip.nt_half as isize + dir_sign as isize * k as isize) as usize;
                col.push(integrand(is, it));
            }
            // cumulative of i*dir*n dt
            let mut i_col = vec![CVec3::zeros(); strip.nt_half + 1];
            for axis in 0..3 {
                let f: Vec<Complex64> = col
                    .iter()
                    .map(|v| v[axis] * Complex64::new(0.0, dir_sign))
                    .collect();
                let re: Vec<f64> = f.iter().map(|c| c.re).collect();
                let im: Vec<f64> = f.iter().map(|c| c.im).collect();
                let cre = cumulative_integral(&re, ht);
                let cim = cumulative_integral(&im, ht);
                for k in 0..=strip.nt_half {
                    i_col[k][axis] = Complex64::new(cre[k], cim[k]);
                }
            }
            for k in 0..=strip.nt_half {
                let it = (strip.nt_half as isize + dir_sign as isize * k as isize) as usize;
                let i_total = i_real[is] + i_col[k];
                let c = strip.rows[it][is].c;
                let x = c + i_total * Complex64::i();
                values[it][is] = Vec3::new(x.x.re, x.y.re, x.z.re);
            }
        }
    }

    let patch = GridPatch {
        u0: 0.0,
        v0: -strip.t_half,
        hu: hs,
        hv: ht,
        values,
        conformal: true,
    };

    // ---- audits ----
    let mut report = AuditReport::new();

    // Simpson + Richardson check of the Schwarz integral at the far corner:
    // Richardson-extrapolated composite Simpson certifies the smooth
    // cumulative rule used in the construction.
    let corner_series: Vec<f64> = (0..=ns)
        .map(|is| integrand(is, strip.nt_half).x.re)
        .collect();
    let full = simpson(&corner_series, hs);
    let half: Vec<f64> = corner_series.iter().copied().step_by(2).collect();
    let half_v = simpson(&half, 2.0 * hs);
    let richardson_error = (full - half_v).abs() / 15.0;
    let extrapolated = full + (full - half_v) / 15.0;
    let smooth = cumulative_integral(&corner_series, hs)[ns];
    report.insert(
        "schwarz_integral_error",
        CheckRecord::against(smooth, extrapolated, 1e-10),
    );
    // informational: the raw error estimate of the Simpson cross-check
    report.insert(
        "schwarz_simpson_richardson",
        CheckRecord::residual(richardson_error, f64::MAX),
    );
    if (smooth - extrapolated).abs() > 1e-8 {
        return Err(Error::Accuracy(format!(
            "Schwarz integral rule disagrees with extrapolated Simpson by {:.3e}",
            (smooth - extrapolated).abs()
        )));
    }

    // the surface contains the curve along t = 0
    let mut containment = 0.0f64;
    for (is, node) in strip.real_row().iter().enumerate() {
        let c = Vec3::new(node.c.x.re, node.c.y.re, node.c.z.re);
        containment = containment.max((patch.node(is, strip.nt_half) - c).norm());
    }
    report.insert(
        "curve_containment",
        CheckRecord::residual(containment, 1e-10),
    );

    // 8th-order first derivatives on the grid for the frame audits
    let rim = 4usize;
    let d8 = |f: &dyn Fn(isize) -> Vec3, at: isize, n: isize, h: f64| -> Vec3 {
        let c = at.clamp(4, n - 5);
        let weights = [
            1.0 / 280.0,
            -4.0 / 105.0,
            1.0 / 5.0,
            -4.0 / 5.0,
            0.0,
            4.0 / 5.0,
            -1.0 / 5.0,
            4.0 / 105.0,
            -1.0 / 280.0,
        ];
        let mut v = Vec3::zeros();
        for (k, w) in weights.iter().enumerate() {
            v += *w * f(c + k as isize - 4);
        }
        v / h
    };
    let xs_at = |is: usize, it: usize| -> Vec3 {
        d8(
            &|k| patch.node(k.clamp(0, ns as isize) as usize, it),
            is as isize,
            ns as isize + 1,
            hs,
        )
    };
    let xt_at = |is: usize, it: usize| -> Vec3 {
        d8(
            &|k| patch.node(is, k.clamp(0, rows_n as isize - 1) as usize),
            it as isize,
            rows_n as isize,
            ht,
        )
    };

    // the patch normal along t = 0 equals nu = -sheet * B
    let mut normal_align = 0.0f64;
    for is in rim..=ns - rim {
        let n_patch = xs_at(is, strip.nt_half)
            .cross(&xt_at(is, strip.nt_half))
            .normalize();
        let b = strip.real_row()[is].binormal;
        let nu = -sgn * Vec3::new(b.x.re, b.y.re, b.z.re);
        normal_align = normal_align.max((n_patch - nu).norm());
    }
    report.insert("normal_alignment", CheckRecord::residual(normal_align, 1e-8));

    // the core curve is an asymptotic line of the built surface:
    // kappa_n = T'(s) . nu measured entirely from the grid
    let tangents: Vec<Vec3> = (0..=ns)
        .map(|is| xs_at(is, strip.nt_half).normalize())
        .collect();
    let mut kappa_n_max = 0.0f64;
    for is in 2 * rim..=ns - 2 * rim {
        let t_prime = d8(
            &|k| tangents[k.clamp(0, ns as isize) as usize],
            is as isize,
            ns as isize + 1,
            hs,
        );
        let n_patch = xs_at(is, strip.nt_half)
            .cross(&xt_at(is, strip.nt_half))
            .normalize();
        kappa_n_max = kappa_n_max.max(t_prime.dot(&n_patch).abs());
    }
    report.insert(
        "core_normal_curvature",
        CheckRecord::residual(kappa_n_max, 1e-8),
    );

    // interior mean curvature from the grid jets
    let mut h_max = 0.0f64;
    for it in rim..rows_n - rim {
        for is in rim..=ns - rim {
            let j = patch.node_jet(is, it);
            let nu = j.xu.cross(&j.xv).normalize();
            let (e, f, g) = (j.xu.dot(&j.xu), j.xu.dot(&j.xv), j.xv.dot(&j.xv));
            let (l, m, n2) = (j.xuu.dot(&nu), j.xuv.dot(&nu), j.xvv.dot(&nu));
            h_max = h_max.max(((e * n2 - 2.0 * f * m + g * l) / (2.0 * (e * g - f * f))).abs());
        }
    }
    report.insert("interior_mean_curvature", CheckRecord::residual(h_max, 1e-5));

    // conformality of the parameterization, 6th-order first derivatives
    let mut conf = 0.0f64;
    for it in (rim..rows_n - rim).step_by(3) {
        for is in (rim..=ns - rim).step_by(3) {
            let xs = xs_at(is, it);
            let xt = xt_at(is, it);
            let (e, f, g) = (xs.dot(&xs), xs.dot(&xt), xt.dot(&xt));
            conf = conf.max((e - g).abs() / e).max(f.abs() / e);
        }
    }
    report.insert("conformality", CheckRecord::residual(conf, 1e-8));

    let mesh = mesh_from_patch(&patch, ns + 1, rows_n)?;

    Ok(BjorlingBuild {
        patch,
        mesh,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::curve::Frame;

    fn circle_source<'a>() -> CurvatureSource<'a> {
        CurvatureSource::Prescribed {
            kappa: &|_| Complex64::new(1.0, 0.0),
            tau: &|_| Complex64::new(0.0, 0.0),
            initial: Frame {
                position: Vec3::new(1.0, 0.0, 0.0),
                tangent: Vec3::new(0.0, 1.0, 0.0),
                normal: Vec3::new(-1.0, 0.0, 0.0),
                binormal: Vec3::new(0.0, 0.0, 1.0),
            },
        }
    }

    #[test]
    fn complex_circle_matches_closed_form() {
        let strip = continue_boundary(
            circle_source(),
            Sheet::Minus,
            std::f64::consts::TAU,
            0.5,
            512,
            64,
        )
        .unwrap();
        assert!((strip.t_half - 0.5).abs() < 1e-12, "no blow-up expected");
        let mut worst = 0.0f64;
        for it in 0..strip.rows.len() {
            for is in 0..=strip.ns {
                let z = strip.z_at(is, it);
                let expect = CVec3::new(z.cos(), z.sin(), Complex64::new(0.0, 0.0));
                worst = worst.max((strip.rows[it][is].c - expect).norm());
            }
        }
        assert!(worst <= 1e-8, "complex circle error {worst:.3e}");
        assert!(strip.real_axis_imaginary_part() <= 1e-10);
        assert!(strip.frenet_residual() <= 1e-6);
    }

    #[test]
    fn complex_helix_matches_closed_form() {
        let (r, a) = (1.0f64, 1.0f64);
        let w = 1.0 / (r * r + a * a).sqrt();
        let kappa = r / (r * r + a * a);
        let tau = a / (r * r + a * a);
        let src = CurvatureSource::Prescribed {
            kappa: &move |_| Complex64::new(kappa, 0.0),
            tau: &move |_| Complex64::new(tau, 0.0),
            initial: Frame {
                position: Vec3::new(r, 0.0, 0.0),
                tangent: w * Vec3::new(0.0, r, a),
                normal: Vec3::new(-1.0, 0.0, 0.0),
                binormal: w * Vec3::new(0.0, -a, r),
            },
        };
        let strip = continue_boundary(src, Sheet::Minus, 6.0, 0.4, 384, 48).unwrap();
        let mut worst = 0.0f64;
        for it in (0..strip.rows.len()).step_by(5) {
            for is in (0..=strip.ns).step_by(7) {
                let z = strip.z_at(is, it);
                let arg = z * w;
                let expect = CVec3::new(r * arg.cos(), r * arg.sin(), arg * a);
                worst = worst.max((strip.rows[it][is].c - expect).norm());
            }
        }
        assert!(worst <= 1e-8, "complex helix error {worst:.3e}");
    }

    #[test]
    fn real_row_matches_independent_frenet_reconstruction() {
        use crate::geom::curve::frenet_reconstruct;
        let strip = continue_boundary(
            circle_source(),
            Sheet::Minus,
            std::f64::consts::TAU,
            0.3,
            256,
            12,
        )
        .unwrap();
        let frame = Frame {
            position: Vec3::new(1.0, 0.0, 0.0),
            tangent: Vec3::new(0.0, 1.0, 0.0),
            normal: Vec3::new(-1.0, 0.0, 0.0),
            binormal: Vec3::new(0.0, 0.0, 1.0),
        };
        let reference = frenet_reconstruct(
            |_| 1.0,
            |_| 0.0,
            std::f64::consts::TAU,
            std::f64::consts::TAU / 2048.0,
            &frame,
        )
        .unwrap();
        // compare at shared arc-length stations
        let mut worst = 0.0f64;
        for (is, node) in strip.real_row().iter().enumerate() {
            let s = is as f64 * strip.hs();
            let j = ((s / reference.spacing()).round() as usize).min(reference.samples.len() - 1);
            if (reference.samples[j].s - s).abs() < 1e-12 {
                let c = Vec3::new(node.c.x.re, node.c.y.re, node.c.z.re);
                worst = worst.max((c - reference.samples[j].position).norm());
            }
        }
        assert!(worst <= 1e-9, "real row deviates {worst:.3e}");
    }

    #[test]
    fn real_axis_row_is_the_real_integration() {
        let strip = continue_boundary(
            circle_source(),
            Sheet::Minus,
            std::f64::consts::TAU,
            0.3,
            64,
            12,
        )
        .unwrap();
        // the t = 0 row is produced by the real pass itself: imaginary parts
        // are identically zero there
        assert_eq!(strip.real_axis_imaginary_part(), 0.0);
    }

    #[test]
    fn schwarz_integrand_is_path_independent_on_rectangles() {
        // the integrand n(z) is analytic, so its contour integral around any
        // rectangle in the strip vanishes (spot check of path independence)
        let strip = continue_boundary(
            circle_source(),
            Sheet::Minus,
            std::f64::consts::TAU,
            0.4,
            256,
            32,
        )
        .unwrap();
        let sgn = strip.sheet.sign();
        let n_at = |is: usize, it: usize| -> CVec3 {
            strip.rows[it][is].normal * Complex64::new(sgn, 0.0)
        };
        let hs = strip.hs();
        let ht = strip.ht();
        let mid = strip.nt_half;
        // rectangle corners (is_a..is_b) x (t = 0 .. t = +T/2)
        let (is_a, is_b) = (40usize, 200usize);
        let it_top = mid + strip.nt_half / 2;
        let mut contour = CVec3::zeros();
        for axis in 0..3 {
            let horiz = |it: usize| -> Complex64 {
                let re: Vec<f64> = (is_a..=is_b).map(|i| n_at(i, it)[axis].re).collect();
                let im: Vec<f64> = (is_a..=is_b).map(|i| n_at(i, it)[axis].im).collect();
                Complex64::new(simpson(&re, hs), simpson(&im, hs))
            };
            let vert = |is: usize| -> Complex64 {
                let re: Vec<f64> = (mid..=it_top).map(|k| n_at(is, k)[axis].re).collect();
                let im: Vec<f64> = (mid..=it_top).map(|k| n_at(is, k)[axis].im).collect();
                Complex64::new(simpson(&re, ht), simpson(&im, ht)) * Complex64::i()
            };
            contour[axis] = horiz(mid) + vert(is_b) - horiz(it_top) - vert(is_a);
        }
        let worst = contour.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(worst <= 1e-9, "contour integral {worst:.3e}");
    }

    #[test]
    fn bjorling_of_a_line_is_a_plane() {
        let src = CurvatureSource::Prescribed {
            kappa: &|_| Complex64::new(0.0, 0.0),
            tau: &|_| Complex64::new(0.0, 0.0),
            initial: Frame::canonical(),
        };
        let strip = continue_boundary(src, Sheet::Minus, 2.0, 0.5, 32, 8).unwrap();
        let build = bjorling_surface(&strip).unwrap();
        // plane: z-component identically zero and X(s, t) = (s, -sheet*t*n...)
        for it in 0..build.patch.nv() {
            for is in 0..build.patch.nu() {
                let p = build.patch.node(is, it);
                assert!(p.z.abs() <= 1e-12, "not planar: {p:?}");
            }
        }
        assert!(build.report.all_pass(), "{}", build.report);
    }

    #[test]
    fn bjorling_circle_is_the_flat_disk_chart() {
        // the minimal surface containing the unit circle with normal nu = B
        // (the circle's axis direction) is the plane itself, reached here in
        // the conformal chart X = (e^{-t} cos s, e^{-t} sin s, 0)
        let strip = continue_boundary(
            circle_source(),
            Sheet::Minus,
            std::f64::consts::TAU,
            0.3,
            400,
            50,
        )
        .unwrap();
        let build = bjorling_surface(&strip).unwrap();
        let h = build.report.get("interior_mean_curvature").unwrap();
        assert!(h.abs_residual <= 1e-6, "interior |H| = {:.3e}", h.abs_residual);
        let contain = build.report.get("curve_containment").unwrap();
        assert!(contain.abs_residual <= 1e-10);
        let align = build.report.get("normal_alignment").unwrap();
        assert!(align.abs_residual <= 1e-8);
        let mid = build.patch.nv() / 2;
        for dit in [0isize, 10, -10, 20] {
            let it = (mid as isize + dit) as usize;
            let t = (it as f64 - mid as f64) * strip.ht();
            let p = build.patch.node(10, it);
            assert!(p.z.abs() <= 1e-9, "not planar at t = {t}");
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!((r - (-t).exp()).abs() <= 1e-8, "radius {r} vs e^-t at t = {t}");
        }
    }
}
