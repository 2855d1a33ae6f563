//! Area-constrained planar elasticae: circle roots of the constant-curvature
//! cubic, quadrature of the curvature ODE 2a k'' + (a k^2 - b) k + s = 0, its
//! first integral, planar reconstruction, and shooting for closed buckled
//! rings.

use crate::convention::KG_SIGN_DISK;
use crate::geom::curve::{ArcCurve, CurveSample};
use crate::numerics::{rk4_step, step_count};
use crate::{Error, Result, Vec3};
use serde::{Deserialize, Serialize};

/// The rigidity quadruple (sigma, eta, alpha, beta): surface tension,
/// saddle-splay modulus, flexural rigidity, edge tension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub sigma: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    /// True when constructed through [`EnergyParams::relaxed`], bypassing the
    /// sigma > 0, alpha >= 0 checks.
    #[serde(default)]
    pub relaxed: bool,
}

impl EnergyParams {
    /// Standard constructor enforcing sigma > 0 and alpha >= 0.
    pub fn new(sigma: f64, eta: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::precondition(format!(
                "surface tension must be positive, got sigma = {sigma}"
            )));
        }
        if !(alpha >= 0.0) {
            return Err(Error::precondition(format!(
                "flexural rigidity must be nonnegative, got alpha = {alpha}"
            )));
        }
        Ok(EnergyParams {
            sigma,
            eta,
            alpha,
            beta,
            relaxed: false,
        })
    }

    /// Override constructor for parameter sets outside the standing
    /// assumptions (negative rigidity fixtures and the like).
    pub fn relaxed(sigma: f64, eta: f64, alpha: f64, beta: f64) -> Self {
        EnergyParams {
            sigma,
            eta,
            alpha,
            beta,
            relaxed: true,
        }
    }

    fn require_alpha(&self) -> Result<()> {
        if self.alpha == 0.0 {
            Err(Error::AlphaZeroPath)
        } else {
            Ok(())
        }
    }
}

/// Q(k) = alpha k^3 - beta k + sigma, whose roots are the curvatures of
/// area-constrained elastic circles.
pub fn circle_polynomial(params: &EnergyParams, k: f64) -> f64 {
    params.alpha * k * k * k - params.beta * k + params.sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicCase {
    /// 27 alpha sigma^2 > 4 beta^3: a single (negative) root.
    OneRoot,
    /// Equality: a simple root and a double root.
    DoubleRoot,
    /// 27 alpha sigma^2 < 4 beta^3: three simple roots.
    ThreeRoots,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CircleRoot {
    pub kappa: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleRoots {
    pub roots: Vec<CircleRoot>,
    pub case: CubicCase,
    /// 27 alpha sigma^2 - 4 beta^3, the case discriminant.
    pub discriminant: f64,
}

impl CircleRoots {
    /// The unique negative root (always present for sigma > 0, alpha > 0).
    pub fn negative_root(&self) -> Option<f64> {
        self.roots
            .iter()
            .map(|r| r.kappa)
            .filter(|&k| k < 0.0)
            .fold(None, |acc: Option<f64>, k| {
                Some(acc.map_or(k, |a| a.min(k)))
            })
    }
}

/// All real roots of Q, each polished to |Q| <= 1e-12 * scale, with the
/// discriminant classification. alpha = 0 is a distinct error: the circle
/// there comes from the alpha-zero disk solution instead.
pub fn circle_roots(params: &EnergyParams) -> Result<CircleRoots> {
    params.require_alpha()?;
    let (a, b, s) = (params.alpha, params.beta, params.sigma);
    let discriminant = 27.0 * a * s * s - 4.0 * b * b * b;
    // depressed cubic k^3 + p k + q
    let p = -b / a;
    let q = s / a;
    let disc_scale = 27.0 * (a * s * s).abs() + 4.0 * b.abs().powi(3);
    let tol = 1e-12 * disc_scale.max(1e-300);

    let mut roots: Vec<CircleRoot> = Vec::new();
    let case;
    if discriminant.abs() <= tol {
        case = CubicCase::DoubleRoot;
        // double root at 3q/(2p)... roots of k^3 + pk + q with zero cubic
        // discriminant: double root at -3q/(2p), simple at 3q/p.
        roots.push(CircleRoot {
            kappa: -1.5 * q / p,
            multiplicity: 2,
        });
        roots.push(CircleRoot {
            kappa: 3.0 * q / p,
            multiplicity: 1,
        });
    } else if discriminant > 0.0 {
        case = CubicCase::OneRoot;
        roots.push(CircleRoot {
            kappa: cardano_single(p, q),
            multiplicity: 1,
        });
    } else {
        case = CubicCase::ThreeRoots;
        // trigonometric form, valid for three real roots (p < 0)
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        for k in 0..3 {
            roots.push(CircleRoot {
                kappa: m * (theta - std::f64::consts::TAU * k as f64 / 3.0).cos(),
                multiplicity: 1,
            });
        }
    }

    // Newton polish against the original coefficients
    for r in &mut roots {
        if r.multiplicity == 1 {
            for _ in 0..4 {
                let f = circle_polynomial(params, r.kappa);
                let df = 3.0 * a * r.kappa * r.kappa - b;
                if df.abs() > 0.0 {
                    r.kappa -= f / df;
                }
            }
        }
    }
    roots.sort_by(|x, y| x.kappa.partial_cmp(&y.kappa).unwrap());

    Ok(CircleRoots {
        roots,
        case,
        discriminant,
    })
}

fn cardano_single(p: f64, q: f64) -> f64 {
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let d = half_q * half_q + third_p * third_p * third_p;
    let sd = d.max(0.0).sqrt();
    let u = (-half_q + sd).cbrt();
    let v = (-half_q - sd).cbrt();
    u + v
}

/// The conserved quantity of the curvature ODE:
/// d = (k')^2 + k^4/4 - (beta/2alpha) k^2 + (sigma/alpha) k.
pub fn first_integral_d(params: &EnergyParams, kappa_g: f64, kappa_g_prime: f64) -> Result<f64> {
    params.require_alpha()?;
    let k = kappa_g;
    Ok(kappa_g_prime * kappa_g_prime + 0.25 * k.powi(4)
        - 0.5 * params.beta / params.alpha * k * k
        + params.sigma / params.alpha * k)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ElasticaSample {
    pub s: f64,
    pub kappa_g: f64,
    pub kappa_g_prime: f64,
}

/// A trajectory of the planar curvature ODE with its first-integral constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticaSolution {
    pub params: EnergyParams,
    pub samples: Vec<ElasticaSample>,
    pub d: f64,
    /// max_s |d(s) - d(0)|
    pub d_drift: f64,
    pub period: Option<f64>,
}

impl ElasticaSolution {
    pub fn spacing(&self) -> f64 {
        if self.samples.len() < 2 {
            0.0
        } else {
            self.samples[1].s - self.samples[0].s
        }
    }
}

const BLOWUP_LIMIT: f64 = 1e6;

fn elastica_rhs(params: &EnergyParams) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    let (sigma, alpha, beta) = (params.sigma, params.alpha, params.beta);
    move |_s, y| {
        let k = y[0];
        [
            y[1],
            (-(alpha * k * k - beta) * k - sigma) / (2.0 * alpha),
        ]
    }
}

/// Fixed-step RK4 integration of 2a k'' + (a k^2 - b) k + s = 0. Records the
/// drift of the first integral and detects the period by return of
/// (k, k') to the initial values within 1e-8.
pub fn elastica_integrate(
    params: &EnergyParams,
    kappa_g0: f64,
    kappa_g_prime0: f64,
    length: f64,
    step: f64,
) -> Result<ElasticaSolution> {
    params.require_alpha()?;
    let n = step_count(length, step)?;
    let h = length / n as f64;
    let rhs = elastica_rhs(params);

    let d0 = first_integral_d(params, kappa_g0, kappa_g_prime0)?;
    let mut y = [kappa_g0, kappa_g_prime0];
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(ElasticaSample {
        s: 0.0,
        kappa_g: y[0],
        kappa_g_prime: y[1],
    });
    let mut drift = 0.0f64;
    for i in 0..n {
        y = rk4_step(&rhs, i as f64 * h, &y, h);
        if !y[0].is_finite() || y[0].abs() > BLOWUP_LIMIT {
            return Err(Error::Divergence {
                s: (i + 1) as f64 * h,
                limit: BLOWUP_LIMIT,
            });
        }
        samples.push(ElasticaSample {
            s: (i + 1) as f64 * h,
            kappa_g: y[0],
            kappa_g_prime: y[1],
        });
        let d = first_integral_d(params, y[0], y[1])?;
        drift = drift.max((d - d0).abs());
    }

    let period = detect_period(params, &samples, h);

    Ok(ElasticaSolution {
        params: *params,
        samples,
        d: d0,
        d_drift: drift,
        period,
    })
}

/// Locate the first return of (kappa_g, kappa_g') to its initial value. The
/// sample grid brackets the return; the crossing of kappa_g' through its
/// initial value is then refined by re-integration and bisection, and the
/// refined state must match to 1e-8 in both coordinates.
fn detect_period(params: &EnergyParams, samples: &[ElasticaSample], h: f64) -> Option<f64> {
    let k0 = samples[0].kappa_g;
    let kp0 = samples[0].kappa_g_prime;
    let scale = samples
        .iter()
        .map(|q| q.kappa_g.abs().max(q.kappa_g_prime.abs()))
        .fold(1.0f64, f64::max);
    let dist =
        |q: &ElasticaSample| ((q.kappa_g - k0).powi(2) + (q.kappa_g_prime - kp0).powi(2)).sqrt();

    // skip away from s = 0 until the state has clearly left the start
    let mut left = false;
    let mut best: Option<(usize, f64)> = None;
    for (i, q) in samples.iter().enumerate().skip(1) {
        let d = dist(q);
        if d > 1e-3 * scale {
            left = true;
        }
        if left && d < 1e-4 * scale {
            // local minimum search
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        } else if let Some((i0, _)) = best {
            // refine around i0
            return refine_period(params, samples, i0, h, k0, kp0, scale);
        }
        let _ = i;
    }
    None
}

fn refine_period(
    params: &EnergyParams,
    samples: &[ElasticaSample],
    i0: usize,
    h: f64,
    k0: f64,
    kp0: f64,
    scale: f64,
) -> Option<f64> {
    // golden-section minimize the distance over [s(i0-1), s(i0+1)]
    let rhs = elastica_rhs(params);
    let base = &samples[i0.saturating_sub(2)];
    let eval = |s: f64| -> (f64, f64) {
        // integrate from the nearby stored sample to s with ~8 substeps
        let ds = s - base.s;
        let m = 8usize;
        let hh = ds / m as f64;
        let mut y = [base.kappa_g, base.kappa_g_prime];
        for j in 0..m {
            y = rk4_step(&rhs, base.s + j as f64 * hh, &y, hh);
        }
        (y[0], y[1])
    };
    let f = |s: f64| -> f64 {
        let (k, kp) = eval(s);
        ((k - k0).powi(2) + (kp - kp0).powi(2)).sqrt()
    };
    let (mut a, mut b) = (samples[i0].s - 2.0 * h, samples[i0].s + 2.0 * h);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    let s_star = 0.5 * (a + b);
    if f(s_star) <= 1e-8 * scale {
        Some(s_star)
    } else {
        None
    }
}

/// Reconstruct the planar curve from a curvature history. The tangent angle
/// integrates as phi' = KG_SIGN_DISK * kappa_g, so a constant kappa_g = -1/R
/// closes into a positively traversed circle of radius R; the curve lies in
/// z = 0.
pub fn elastica_to_curve(sol: &ElasticaSolution) -> ArcCurve {
    let h = sol.spacing();
    let n = sol.samples.len();
    // integrate (x, y, phi) with RK4, interpolating kappa_g quadratically
    // from the stored samples at half-steps via a local ODE re-evaluation:
    // kappa_g is itself smooth, so use Hermite interpolation through
    // (kappa_g, kappa_g') at the surrounding nodes.
    let kg = |i: usize| sol.samples[i].kappa_g;
    let kgp = |i: usize| sol.samples[i].kappa_g_prime;
    let kappa_at = |s: f64| -> f64 {
        let t = (s / h).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let x = (s - i as f64 * h) / h;
        // cubic Hermite on [i, i+1]
        let (p0, m0, p1, m1) = (kg(i), kgp(i) * h, kg(i + 1), kgp(i + 1) * h);
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * p0
            + (x3 - 2.0 * x2 + x) * m0
            + (-2.0 * x3 + 3.0 * x2) * p1
            + (x3 - x2) * m1
    };
    let rhs = |s: f64, y: &[f64; 3]| -> [f64; 3] {
        let phi = y[2];
        [phi.cos(), phi.sin(), KG_SIGN_DISK * kappa_at(s)]
    };
    let mut y = [0.0f64, 0.0, 0.0];
    let mut out = Vec::with_capacity(n);
    let mut push = |s: f64, y: &[f64; 3], kappa_g: f64| {
        let phi = y[2];
        let t = Vec3::new(phi.cos(), phi.sin(), 0.0);
        let left = Vec3::new(-phi.sin(), phi.cos(), 0.0);
        // T' = -kappa_g * left; Frenet N follows the sign of kappa_g
        let (normal, kappa) = if kappa_g.abs() > 1e-13 {
            (-kappa_g.signum() * left, kappa_g.abs())
        } else {
            (left, 0.0)
        };
        out.push(CurveSample {
            s,
            position: Vec3::new(y[0], y[1], 0.0),
            tangent: t,
            normal,
            binormal: t.cross(&normal),
            kappa,
            tau: 0.0,
        });
    };
    push(0.0, &y, kg(0));
    for i in 0..n - 1 {
        let s = i as f64 * h;
        y = rk4_step(&rhs, s, &y, h);
        push(s + h, &y, kg(i + 1));
    }
    let first = out.first().unwrap();
    let last = out.last().unwrap();
    let gap = (last.position - first.position).norm();
    let frame_gap = (last.tangent - first.tangent).norm();
    let length = sol.samples.last().unwrap().s;
    ArcCurve {
        samples: out,
        length,
        closed: gap <= 1e-6 && frame_gap <= 1e-6,
        closure_gap: gap,
    }
}

/// Signed turning number -(1/2pi) * oint kappa_g ds of a curvature history,
/// by Simpson quadrature.
pub fn turning_number(sol: &ElasticaSolution) -> f64 {
    let vals: Vec<f64> = sol.samples.iter().map(|q| q.kappa_g).collect();
    let integral = crate::numerics::simpson(&vals, sol.spacing());
    KG_SIGN_DISK * integral / std::f64::consts::TAU
}

/// Result of a successful ring shoot.
#[derive(Debug, Clone)]
pub struct BuckledRing {
    pub solution: ElasticaSolution,
    pub curve: ArcCurve,
    pub iterations: usize,
    /// Curvature periods per closure (1 for circles).
    pub lobes: usize,
    pub closure: f64,
    pub turning_residual: f64,
    pub ode_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RingGuess {
    /// Starting curvature; taken as a turning point (kappa_g' = 0).
    pub kappa_g0: f64,
    /// Optional hint for the total curve length.
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct RingTolerances {
    pub closure: f64,
    pub ode_residual: f64,
    pub max_iterations: usize,
}

impl Default for RingTolerances {
    fn default() -> Self {
        RingTolerances {
            closure: 1e-6,
            ode_residual: 1e-8,
            max_iterations: 40,
        }
    }
}

/// One curvature period from a turning point: (P, integral of kappa_g over P).
fn period_and_turning(
    params: &EnergyParams,
    kappa_g0: f64,
    step: f64,
) -> Result<(f64, f64)> {
    let rhs3 = {
        let (sigma, alpha, beta) = (params.sigma, params.alpha, params.beta);
        move |_s: f64, y: &[f64; 3]| -> [f64; 3] {
            let k = y[0];
            [
                y[1],
                (-(alpha * k * k - beta) * k - sigma) / (2.0 * alpha),
                k,
            ]
        }
    };
    // integrate until kappa_g' changes sign (the opposite turning point)
    let mut y = [kappa_g0, 0.0, 0.0];
    let mut s = 0.0;
    let kpp0 = rhs3(0.0, &y)[1];
    if kpp0 == 0.0 {
        return Err(Error::precondition(
            "seed sits exactly on a circle root; the circle branch handles it",
        ));
    }
    let mut prev = y;
    let mut crossed = false;
    let max_s = 1e4;
    while s < max_s {
        prev = y;
        y = rk4_step(&rhs3, s, &y, step);
        s += step;
        if y[0].abs() > BLOWUP_LIMIT {
            return Err(Error::Divergence { s, limit: BLOWUP_LIMIT });
        }
        // ignore the initial station where kappa_g' is still ~0
        if s > 2.0 * step && prev[1] * y[1] <= 0.0 && prev[1] != 0.0 {
            crossed = true;
            break;
        }
    }
    if !crossed {
        return Err(Error::Accuracy(
            "no opposite turning point found; orbit may be unbounded".into(),
        ));
    }
    // Newton on g(t) = kappa_g'(t) from the previous sample
    let mut t = s - step + step * prev[1] / (prev[1] - y[1]);
    for _ in 0..8 {
        let integrate_to = |tt: f64| -> [f64; 3] {
            let m = 8usize;
            let hh = (tt - (s - step)) / m as f64;
            let mut z = prev;
            for j in 0..m {
                z = rk4_step(&rhs3, s - step + j as f64 * hh, &z, hh);
            }
            z
        };
        let z = integrate_to(t);
        let derivative = rhs3(t, &z)[1]; // d/dt kappa_g' = kappa_g''
        if derivative.abs() < 1e-300 {
            break;
        }
        t -= z[1] / derivative;
    }
    let m = 8usize;
    let hh = (t - (s - step)) / m as f64;
    let mut z = prev;
    for j in 0..m {
        z = rk4_step(&rhs3, s - step + j as f64 * hh, &z, hh);
    }
    // half period by symmetry of the potential well
    Ok((2.0 * t, 2.0 * z[2]))
}

/// Shoot for a closed buckled ring with the requested turning number.
///
/// Unknowns are (kappa_g0 at a turning point, period); periodicity pins the
/// period for each kappa_g0, so the outer solve drives the per-period turning
/// angle to -2 pi n / q over q curvature periods. Seeds at a circle root
/// return the circle immediately. Non-existence is reported as a
/// non-convergence error carrying the best residuals, never guessed.
pub fn buckled_ring_shoot(
    params: &EnergyParams,
    turning_number_target: i32,
    guess: RingGuess,
    tol: RingTolerances,
) -> Result<BuckledRing> {
    params.require_alpha()?;
    if turning_number_target == 0 {
        return Err(Error::precondition("turning number must be nonzero"));
    }
    let step = 1e-3;

    // circle branch: a seed at a circle root is already a buckled ring
    let q_scale =
        params.alpha * guess.kappa_g0.abs().powi(3) + params.beta.abs() * guess.kappa_g0.abs()
            + params.sigma.abs();
    if circle_polynomial(params, guess.kappa_g0).abs() <= 1e-10 * q_scale.max(1e-300)
        && KG_SIGN_DISK * guess.kappa_g0 * (turning_number_target as f64) > 0.0
    {
        let radius = 1.0 / guess.kappa_g0.abs();
        let length = std::f64::consts::TAU * radius * turning_number_target.unsigned_abs() as f64;
        let sol = elastica_integrate(params, guess.kappa_g0, 0.0, length, step)?;
        let curve = elastica_to_curve(&sol);
        let tn = turning_number(&sol);
        return Ok(BuckledRing {
            ode_residual: ode_residual(&sol),
            closure: curve.closure_gap,
            turning_residual: (tn - turning_number_target as f64).abs(),
            solution: sol,
            curve,
            iterations: 0,
            lobes: 1,
        });
    }

    // per-period turning target: Phi = -2 pi n / q with q not dividing n
    let n_t = turning_number_target as f64;
    let (_, phi_seed) = period_and_turning(params, guess.kappa_g0, step)?;
    let target_total = -std::f64::consts::TAU * n_t;
    let mut q_best: Option<usize> = None;
    let mut q_err = f64::INFINITY;
    for q in 1..=24usize {
        // exclude pure-translation closures where the per-period angle is a
        // full turn multiple
        let per = target_total / q as f64;
        if (per / std::f64::consts::TAU - (per / std::f64::consts::TAU).round()).abs() < 1e-9 {
            continue;
        }
        if turning_number_target.unsigned_abs() as usize % q == 0 && q > 1 {
            // a q dividing n yields per-period integer turns too
            continue;
        }
        let err = (phi_seed - per).abs();
        if err < q_err {
            q_err = err;
            q_best = Some(q);
        }
    }
    let q = q_best.ok_or_else(|| Error::Accuracy("no admissible lobe count".into()))?;
    let phi_target = target_total / q as f64;

    // bracket the root of g(k0) = Phi(k0) - phi_target by walking from the
    // seed, then bisect; walking keeps the iterate inside the potential well
    let mut iterations = 1usize;
    let g = |k0: f64| -> Option<f64> {
        period_and_turning(params, k0, step)
            .ok()
            .map(|(_, phi)| phi - phi_target)
    };
    let k_a = guess.kappa_g0;
    let g_a = phi_seed - phi_target;
    let walk = 0.02 * guess.kappa_g0.abs().max(0.1);
    let mut bracket: Option<(f64, f64, f64, f64)> = None;
    for dir in [1.0f64, -1.0] {
        let (mut ka, mut ga) = (k_a, g_a);
        for _ in 0..tol.max_iterations {
            let kb = ka + dir * walk;
            let Some(gb) = g(kb) else { break };
            iterations += 1;
            if ga * gb <= 0.0 {
                bracket = Some((ka, kb, ga, gb));
                break;
            }
            if gb.abs() > ga.abs() {
                break; // walking away from the root in this direction
            }
            ka = kb;
            ga = gb;
        }
        if bracket.is_some() {
            break;
        }
    }
    let Some((mut ka, mut kb, mut ga, _gb)) = bracket else {
        return Err(Error::NonConvergence {
            iterations,
            closure: f64::INFINITY,
            turning: g_a.abs() / std::f64::consts::TAU,
        });
    };
    for _ in 0..80 {
        let km = 0.5 * (ka + kb);
        let Some(gm) = g(km) else {
            return Err(Error::NonConvergence {
                iterations,
                closure: f64::INFINITY,
                turning: ga.abs() / std::f64::consts::TAU,
            });
        };
        iterations += 1;
        if ga * gm <= 0.0 {
            kb = km;
        } else {
            ka = km;
            ga = gm;
        }
        if (kb - ka).abs() < 1e-14 * ka.abs().max(1.0) {
            break;
        }
    }
    let k_b = 0.5 * (ka + kb);

    let (period, _) = period_and_turning(params, k_b, step)?;
    let total_len = period * q as f64;
    let sol = elastica_integrate(params, k_b, 0.0, total_len, step)?;
    let curve = elastica_to_curve(&sol);
    let tn = turning_number(&sol);
    let ring = BuckledRing {
        ode_residual: ode_residual(&sol),
        closure: curve.closure_gap,
        turning_residual: (tn - n_t).abs(),
        solution: sol,
        curve,
        iterations,
        lobes: q,
    };
    if ring.closure > tol.closure || ring.ode_residual > tol.ode_residual {
        return Err(Error::NonConvergence {
            iterations,
            closure: ring.closure,
            turning: ring.turning_residual,
        });
    }
    Ok(ring)
}

/// Sup-norm of 2a k'' + (a k^2 - b) k + s along a solution, with k'' from
/// 4th-order finite differences of the stored samples.
pub fn ode_residual(sol: &ElasticaSolution) -> f64 {
    let kg: Vec<f64> = sol.samples.iter().map(|q| q.kappa_g).collect();
    let h = sol.spacing();
    let kpp = crate::numerics::second_derivative_uniform(&kg, h, false);
    let p = &sol.params;
    let mut worst = 0.0f64;
    // skip the one-sided ends where the stencil loses accuracy
    let n = kg.len();
    for i in 3..n.saturating_sub(3) {
        let r = 2.0 * p.alpha * kpp[i] + (p.alpha * kg[i] * kg[i] - p.beta) * kg[i] + p.sigma;
        worst = worst.max(r.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(sigma: f64, alpha: f64, beta: f64) -> EnergyParams {
        EnergyParams::new(sigma, 0.0, alpha, beta).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(EnergyParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(EnergyParams::new(1.0, 0.0, -1.0, 0.0).is_err());
        let p = EnergyParams::relaxed(1.0, 1.0, -1.0, 1.0);
        assert!(p.relaxed);
    }

    #[test]
    fn cubic_simple_root() {
        let r = circle_roots(&params(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.case, CubicCase::OneRoot);
        assert_eq!(r.roots.len(), 1);
        assert_relative_eq!(r.roots[0].kappa, -1.0, epsilon = 1e-14);
    }

    /// Bisection oracle used to pin the expected roots independently.
    fn bisect_root(p: &EnergyParams, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if circle_polynomial(p, a) * circle_polynomial(p, m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn cubic_one_root_case_matches_bisection() {
        let p = params(1.0, 1.0, 1.0);
        let r = circle_roots(&p).unwrap();
        assert_eq!(r.case, CubicCase::OneRoot);
        let oracle = bisect_root(&p, -2.0, 0.0);
        assert_relative_eq!(r.roots[0].kappa, oracle, epsilon = 1e-10);
        assert_relative_eq!(r.roots[0].kappa, -1.3247179572, epsilon = 1e-9);
    }

    #[test]
    fn cubic_three_roots_case_matches_bisection() {
        let p = params(1.0, 1.0, 3.0);
        let r = circle_roots(&p).unwrap();
        assert_eq!(r.case, CubicCase::ThreeRoots);
        assert_eq!(r.roots.len(), 3);
        let oracles = [
            bisect_root(&p, -3.0, -1.0),
            bisect_root(&p, 0.0, 1.0),
            bisect_root(&p, 1.0, 2.0),
        ];
        for (root, oracle) in r.roots.iter().zip(oracles.iter()) {
            assert_relative_eq!(root.kappa, *oracle, epsilon = 1e-10);
        }
        assert_relative_eq!(r.roots[0].kappa, -1.8794, epsilon = 1e-4);
        assert_relative_eq!(r.roots[1].kappa, 0.3473, epsilon = 1e-4);
        assert_relative_eq!(r.roots[2].kappa, 1.5321, epsilon = 1e-4);
    }

    #[test]
    fn alpha_zero_is_a_distinct_error() {
        let p = EnergyParams::new(1.0, 1.0, 0.0, -1.0).unwrap();
        match circle_roots(&p) {
            Err(Error::AlphaZeroPath) => {}
            other => panic!("expected alpha-zero signal, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn root_count_matches_discriminant(
            sigma in 0.1f64..3.0,
            alpha in 0.1f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let p = params(sigma, alpha, beta);
            let r = circle_roots(&p).unwrap();
            let disc = 27.0 * alpha * sigma * sigma - 4.0 * beta.powi(3);
            if disc.abs() > 1e-9 {
                let expected = if disc > 0.0 { 1 } else { 3 };
                prop_assert_eq!(r.roots.len(), expected);
            }
            for root in &r.roots {
                let scale = alpha * root.kappa.abs().powi(3)
                    + beta.abs() * root.kappa.abs()
                    + sigma;
                prop_assert!(circle_polynomial(&p, root.kappa).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn nonpositive_beta_gives_single_negative_root(
            sigma in 0.1f64..3.0,
            alpha in 0.1f64..3.0,
            beta in -3.0f64..=0.0,
        ) {
            let r = circle_roots(&params(sigma, alpha, beta)).unwrap();
            prop_assert_eq!(r.roots.len(), 1);
            prop_assert!(r.roots[0].kappa < 0.0);
        }
    }

    #[test]
    fn first_integral_values() {
        let p = params(1.0, 1.0, 0.0);
        assert_relative_eq!(first_integral_d(&p, -1.0, 0.0).unwrap(), -0.75);
        assert_relative_eq!(first_integral_d(&p, 0.0, 0.0).unwrap(), 0.0);
        let p = params(1.0, 1.0, 1.0);
        let k: f64 = -1.3247179572;
        // direct re-substitution oracle
        let expect = 0.25 * k.powi(4) - 0.5 * k * k + k;
        assert_relative_eq!(first_integral_d(&p, k, 0.0).unwrap(), expect, epsilon = 1e-10);
    }

    #[test]
    fn circle_root_is_a_fixed_point() {
        let p = params(1.0, 1.0, 1.0);
        let k0 = circle_roots(&p).unwrap().roots[0].kappa;
        let sol = elastica_integrate(&p, k0, 0.0, 100.0, 1e-3).unwrap();
        for q in &sol.samples {
            assert!((q.kappa_g - k0).abs() <= 1e-10);
        }
    }

    #[test]
    fn oscillation_turning_points_match_quartic_roots() {
        let p = params(1.0, 1.0, 3.0);
        let sol = elastica_integrate(&p, 0.9, 0.0, 40.0, 1e-3).unwrap();
        let d = sol.d;
        // quartic turning points: d - k^4/4 + (beta/2alpha) k^2 - (sigma/alpha) k = 0
        let f = |k: f64| d - 0.25 * k.powi(4) + 1.5 * k * k - k;
        let upper = crate::numerics::brent_root(f, 1.5, 2.5, 1e-14).unwrap();
        let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for q in &sol.samples {
            kmin = kmin.min(q.kappa_g);
            kmax = kmax.max(q.kappa_g);
        }
        assert!((kmin - 0.9).abs() <= 1e-8, "lower turning {kmin}");
        assert!((kmax - upper).abs() <= 1e-8, "upper turning {kmax} vs {upper}");
        assert!(sol.period.is_some());
    }

    #[test]
    fn d_drift_stays_small_over_long_runs() {
        let p = params(1.0, 1.0, 3.0);
        let sol = elastica_integrate(&p, 0.9, 0.0, 100.0, 1e-3).unwrap();
        assert!(sol.d_drift <= 1e-9 * sol.d.abs().max(1.0), "drift {}", sol.d_drift);
    }

    #[test]
    fn blow_up_guard_trips_outside_admissible_range() {
        // the quartic first integral confines every genuine planar orbit, so
        // the divergence guard can only fire on states beyond its threshold
        let p = params(1.0, 1.0, 0.0);
        match elastica_integrate(&p, 2.0e6, 0.0, 1.0, 1e-3) {
            Err(Error::Divergence { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn constant_negative_curvature_closes_unit_circle() {
        let p = params(1.0, 1.0, 0.0); // root at -1
        let sol = elastica_integrate(&p, -1.0, 0.0, std::f64::consts::TAU, 1e-3).unwrap();
        let curve = elastica_to_curve(&sol);
        assert!(curve.closed, "gap {}", curve.closure_gap);
        // positively traversed: turning number +1
        assert_relative_eq!(turning_number(&sol), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn radius_two_circle_closes() {
        let p = params(0.125, 1.0, 0.0); // root at -1/2
        let sol =
            elastica_integrate(&p, -0.5, 0.0, 2.0 * std::f64::consts::TAU, 1e-3).unwrap();
        let curve = elastica_to_curve(&sol);
        assert!(curve.closed);
        let center = Vec3::new(0.0, 2.0, 0.0);
        for q in &curve.samples {
            assert!(((q.position - center).norm() - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn wavy_solution_reports_turning_number() {
        let p = params(1.0, 1.0, 3.0);
        let sol = elastica_integrate(&p, 0.9, 0.0, 60.0, 1e-3).unwrap();
        let curve = elastica_to_curve(&sol);
        let tn = turning_number(&sol);
        // open arc here; turning number need not be an integer
        if curve.closed {
            assert!((tn - tn.round()).abs() < 1e-6);
        }
        assert!(tn < 0.0, "positive-kappa_g well turns negatively, tn = {tn}");
    }

    #[test]
    fn ring_shoot_circle_branch_is_instant() {
        let p = params(1.0, 1.0, 1.0);
        let k0 = circle_roots(&p).unwrap().roots[0].kappa;
        let ring = buckled_ring_shoot(
            &p,
            1,
            RingGuess {
                kappa_g0: k0,
                period: None,
            },
            RingTolerances::default(),
        )
        .unwrap();
        assert_eq!(ring.iterations, 0);
        assert!(ring.closure <= 1e-6);
        assert!(ring.ode_residual <= 1e-8);
    }

    #[test]
    fn ring_shoot_rejects_zero_turning_number() {
        let p = params(1.0, 1.0, 1.0);
        let err = buckled_ring_shoot(
            &p,
            0,
            RingGuess {
                kappa_g0: -1.0,
                period: None,
            },
            RingTolerances::default(),
        )
        .unwrap_err();
        assert!(err.is_precondition());
    }

    #[test]
    fn noncircular_ring_in_the_positive_well() {
        // three roots at (1,1,3); seed between the two positive ones
        let p = params(1.0, 1.0, 3.0);
        let ring = buckled_ring_shoot(
            &p,
            -5,
            RingGuess {
                kappa_g0: 0.9,
                period: None,
            },
            RingTolerances::default(),
        )
        .unwrap();
        assert_eq!(ring.lobes, 4);
        assert!(ring.closure <= 1e-6, "closure {}", ring.closure);
        assert!(ring.ode_residual <= 1e-8, "ode {}", ring.ode_residual);
        assert!(ring.turning_residual <= 1e-6);
        // kappa_g genuinely non-constant
        let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for q in &ring.solution.samples {
            kmin = kmin.min(q.kappa_g);
            kmax = kmax.max(q.kappa_g);
        }
        assert!(kmax - kmin > 0.1, "ring is a circle");
        assert!(ring.curve.closed);
    }
}
