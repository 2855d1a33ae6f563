//! The full boundary equilibrium system for a nonzero saddle-splay modulus:
//! the coupled (kappa_g, tau_g) equations, their torsion first integral
//! tau_g (2 alpha kappa_g + eta)^2 = c, branch classification, and the
//! alpha = 0 closed form.

use crate::convention::Sheet;
use crate::elastica::EnergyParams;
use crate::numerics::{derivative_uniform_high, rk4_step, second_derivative_uniform_high, step_count};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// State of the boundary system at one arc-length station. Under the
/// constant contact angle theta = +/- pi/2 the Frenet data is recovered as
/// kappa = sheet * kappa_g, tau = -tau_g.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryState {
    pub s: f64,
    pub kappa_g: f64,
    pub kappa_g_prime: f64,
    pub tau_g: f64,
}

impl BoundaryState {
    pub fn new(kappa_g: f64, kappa_g_prime: f64, tau_g: f64) -> Self {
        BoundaryState {
            s: 0.0,
            kappa_g,
            kappa_g_prime,
            tau_g,
        }
    }
}

/// Trajectory of the reduced boundary system, carrying the sheet flag and the
/// torsion invariant constant fixed by the initial state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryTrajectory {
    pub params: EnergyParams,
    pub sheet: Sheet,
    pub c: f64,
    pub states: Vec<BoundaryState>,
    /// max_s |c(s) - c| with c(s) = tau_g (2 alpha kappa_g + eta)^2.
    pub c_drift: f64,
}

impl BoundaryTrajectory {
    pub fn spacing(&self) -> f64 {
        if self.states.len() < 2 {
            0.0
        } else {
            self.states[1].s - self.states[0].s
        }
    }
}

fn chart_factor(params: &EnergyParams, kappa_g: f64) -> f64 {
    2.0 * params.alpha * kappa_g + params.eta
}

/// Integrate the boundary system by substituting the first integral
/// tau_g = c / (2 alpha kappa_g + eta)^2 into the conormal equation, leaving
/// a second-order ODE for kappa_g alone. The substitution enforces the
/// torsion equation exactly, so the reported drift is a pure evaluation
/// artifact. Crossing the chart line 2 alpha kappa_g + eta = 0 is an error;
/// trajectories with c != 0 cannot reach it.
pub fn boundary_integrate(
    params: &EnergyParams,
    state0: &BoundaryState,
    sheet: Sheet,
    length: f64,
    step: f64,
) -> Result<BoundaryTrajectory> {
    if params.eta == 0.0 {
        return Err(Error::precondition("boundary system needs eta != 0"));
    }
    if params.alpha == 0.0 {
        return Err(Error::precondition(
            "alpha = 0 has the closed-form disk solution; use alpha_zero_solution",
        ));
    }
    let w0 = chart_factor(params, state0.kappa_g);
    if w0.abs() < 1e-12 {
        return Err(Error::precondition(
            "initial state sits on the chart singularity 2 alpha kappa_g + eta = 0",
        ));
    }
    let c = state0.tau_g * w0 * w0;

    let n = step_count(length, step)?;
    let h = length / n as f64;
    let (sigma, eta, alpha, beta) = (params.sigma, params.eta, params.alpha, params.beta);
    let tau_of = move |kg: f64| -> f64 {
        let w = 2.0 * alpha * kg + eta;
        c / (w * w)
    };
    let rhs = move |_s: f64, y: &[f64; 2]| -> [f64; 2] {
        let kg = y[0];
        let tg = tau_of(kg);
        [
            y[1],
            (-(alpha * kg * kg - 2.0 * alpha * tg * tg - beta) * kg + eta * tg * tg - sigma)
                / (2.0 * alpha),
        ]
    };

    let mut y = [state0.kappa_g, state0.kappa_g_prime];
    let mut states = Vec::with_capacity(n + 1);
    states.push(BoundaryState {
        s: 0.0,
        kappa_g: y[0],
        kappa_g_prime: y[1],
        tau_g: state0.tau_g,
    });
    let mut drift = 0.0f64;
    let chart_sign = w0.signum();
    for i in 0..n {
        y = rk4_step(&rhs, i as f64 * h, &y, h);
        let s = (i + 1) as f64 * h;
        if !y[0].is_finite() || y[0].abs() > 1e6 {
            return Err(Error::Divergence { s, limit: 1e6 });
        }
        let w = chart_factor(params, y[0]);
        if w.signum() != chart_sign || w.abs() < 1e-12 {
            return Err(Error::ChartSingularity { s });
        }
        let tg = c / (w * w);
        states.push(BoundaryState {
            s,
            kappa_g: y[0],
            kappa_g_prime: y[1],
            tau_g: tg,
        });
        drift = drift.max((tg * w * w - c).abs());
    }

    Ok(BoundaryTrajectory {
        params: *params,
        sheet,
        c,
        states,
        c_drift: drift,
    })
}

/// Pointwise evaluation of the torsion invariant along a trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TorsionInvariant {
    pub c_mean: f64,
    pub mean_drift: f64,
    pub max_drift: f64,
}

pub fn torsion_invariant(params: &EnergyParams, states: &[BoundaryState]) -> TorsionInvariant {
    let values: Vec<f64> = states
        .iter()
        .map(|q| {
            let w = chart_factor(params, q.kappa_g);
            q.tau_g * w * w
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut max_dev = 0.0f64;
    let mut mean_dev = 0.0f64;
    for v in &values {
        let d = (v - mean).abs();
        max_dev = max_dev.max(d);
        mean_dev += d;
    }
    TorsionInvariant {
        c_mean: mean,
        mean_drift: mean_dev / values.len() as f64,
        max_drift: max_dev,
    }
}

/// Branch classification of a boundary trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BranchTag {
    /// tau_g vanishes identically: planar area-constrained elastica branch.
    TauGZero,
    /// 2 alpha kappa_g + eta vanishes identically: constant geodesic
    /// curvature branch, which requires 8 sigma alpha^2 = eta (eta^2 - 4
    /// alpha beta); the residual of that relation is attached.
    ConstKg { relation_residual: f64 },
    Generic,
}

pub fn classify_branch(
    params: &EnergyParams,
    states: &[BoundaryState],
    tol: f64,
) -> Result<BranchTag> {
    if states.is_empty() {
        return Err(Error::precondition("empty trajectory"));
    }
    let max_tau = states.iter().map(|q| q.tau_g.abs()).fold(0.0f64, f64::max);
    let max_chart = states
        .iter()
        .map(|q| chart_factor(params, q.kappa_g).abs())
        .fold(0.0f64, f64::max);
    let tau_small = max_tau <= tol;
    let chart_small = max_chart <= tol;
    match (tau_small, chart_small) {
        (true, true) => Err(Error::AmbiguousBranch {
            tau_residual: max_tau,
            const_residual: max_chart,
        }),
        (true, false) => Ok(BranchTag::TauGZero),
        (false, true) => {
            let (s, e, a, b) = (params.sigma, params.eta, params.alpha, params.beta);
            let relation_residual = (8.0 * s * a * a - e * (e * e - 4.0 * a * b)).abs();
            Ok(BranchTag::ConstKg { relation_residual })
        }
        (false, false) => Ok(BranchTag::Generic),
    }
}

/// The alpha = 0 critical configuration: a flat disk bounded by a circle of
/// radius -beta/sigma, valid exactly when beta < 0. Also reports the
/// equilibrium residual -beta*kappa_g + sigma at kappa_g = sigma/beta, which
/// vanishes identically.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlphaZeroDisk {
    pub radius: f64,
    pub valid: bool,
    pub el_residual: f64,
}

pub fn alpha_zero_solution(params: &EnergyParams) -> Result<AlphaZeroDisk> {
    if params.alpha != 0.0 {
        return Err(Error::precondition("alpha must be zero on this branch"));
    }
    if params.eta == 0.0 {
        return Err(Error::precondition("the closed form needs eta != 0"));
    }
    let radius = -params.beta / params.sigma;
    let kappa_g = params.sigma / params.beta;
    let el_residual = if params.beta != 0.0 {
        (-params.beta * kappa_g + params.sigma).abs()
    } else {
        f64::INFINITY
    };
    Ok(AlphaZeroDisk {
        radius,
        valid: params.beta < 0.0,
        el_residual,
    })
}

/// Sup-norm residuals of the two coupled boundary equations evaluated
/// independently along a trajectory, with derivatives from 4th-order finite
/// differences of the stored samples. Returns (torsion_eq, conormal_eq).
pub fn boundary_residuals(params: &EnergyParams, traj: &BoundaryTrajectory) -> (f64, f64) {
    let kg: Vec<f64> = traj.states.iter().map(|q| q.kappa_g).collect();
    let tg: Vec<f64> = traj.states.iter().map(|q| q.tau_g).collect();
    let h = traj.spacing();
    let kgp = derivative_uniform_high(&kg, h, false);
    let kgpp = second_derivative_uniform_high(&kg, h, false);
    let tgp = derivative_uniform_high(&tg, h, false);
    let (sigma, eta, alpha, beta) = (params.sigma, params.eta, params.alpha, params.beta);
    let n = kg.len();
    let mut worst_torsion = 0.0f64;
    let mut worst_conormal = 0.0f64;
    for i in 5..n.saturating_sub(5) {
        let r13 = 4.0 * alpha * kgp[i] * tg[i] + 2.0 * alpha * kg[i] * tgp[i] + eta * tgp[i];
        let r14 = 2.0 * alpha * kgpp[i]
            + (alpha * kg[i] * kg[i] - 2.0 * alpha * tg[i] * tg[i] - beta) * kg[i]
            - eta * tg[i] * tg[i]
            + sigma;
        worst_torsion = worst_torsion.max(r13.abs());
        worst_conormal = worst_conormal.max(r14.abs());
    }
    (worst_torsion, worst_conormal)
}

/// Residuals of the same system written in Frenet variables
/// (kappa = sheet * kappa_g, tau = -tau_g):
/// 4 a kappa' tau + 2 a kappa tau' + s_sheet eta tau' = 0 and
/// 2 a kappa'' + (a kappa^2 - 2 a tau^2 - b) kappa - s_sheet eta tau^2
/// + s_sheet sigma = 0. Algebraically identical to the Darboux form, so the
/// two must agree to machine precision.
pub fn frenet_form_residuals(params: &EnergyParams, traj: &BoundaryTrajectory) -> (f64, f64) {
    let sgn = traj.sheet.sign();
    let kappa: Vec<f64> = traj.states.iter().map(|q| sgn * q.kappa_g).collect();
    let tau: Vec<f64> = traj.states.iter().map(|q| -q.tau_g).collect();
    let h = traj.spacing();
    let kp = derivative_uniform_high(&kappa, h, false);
    let kpp = second_derivative_uniform_high(&kappa, h, false);
    let tp = derivative_uniform_high(&tau, h, false);
    let (sigma, eta, alpha, beta) = (params.sigma, params.eta, params.alpha, params.beta);
    let n = kappa.len();
    let mut worst_binormal = 0.0f64;
    let mut worst_normal = 0.0f64;
    for i in 5..n.saturating_sub(5) {
        let r20 = 4.0 * alpha * kp[i] * tau[i] + 2.0 * alpha * kappa[i] * tp[i] + sgn * eta * tp[i];
        let r21 = 2.0 * alpha * kpp[i]
            + (alpha * kappa[i] * kappa[i] - 2.0 * alpha * tau[i] * tau[i] - beta) * kappa[i]
            - sgn * eta * tau[i] * tau[i]
            + sgn * sigma;
        worst_binormal = worst_binormal.max(r20.abs());
        worst_normal = worst_normal.max(r21.abs());
    }
    (worst_binormal, worst_normal)
}
