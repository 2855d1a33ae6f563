//! Small numerical kernels shared across the crate: fixed-step RK4,
//! composite quadrature, smooth cumulative integration, and finite-difference
//! stencils on uniform grids.

use crate::{Error, Result};

/// One classical RK4 step of y' = f(s, y) for a fixed-size state vector.
pub fn rk4_step<const N: usize, F>(f: &F, s: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(s, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(s + 0.5 * h, &y2);
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(s + 0.5 * h, &y2);
    for i in 0..N {
        y2[i] = y[i] + h * k3[i];
    }
    let k4 = f(s + h, &y2);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Number of uniform steps covering `length` with step no larger than `step`.
pub fn step_count(length: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !length.is_finite() || length <= 0.0 {
        return Err(Error::precondition(format!(
            "need length > 0 and step > 0, got length = {length}, step = {step}"
        )));
    }
    Ok((length / step).ceil().max(1.0) as usize)
}

/// Composite Simpson on uniformly sampled values. Odd interval counts are
/// finished with a Simpson 3/8 panel on the last three intervals.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2, "simpson needs at least two samples");
    if n == 2 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let intervals = n - 1;
    let even_intervals = if intervals % 2 == 0 {
        intervals
    } else {
        intervals - 3
    };
    let mut total = 0.0;
    if even_intervals > 0 {
        let mut acc = values[0] + values[even_intervals];
        let mut i = 1;
        while i < even_intervals {
            acc += 4.0 * values[i];
            if i + 1 < even_intervals {
                acc += 2.0 * values[i + 1];
            }
            i += 2;
        }
        total += acc * h / 3.0;
    }
    if intervals % 2 == 1 {
        if intervals >= 3 {
            let j = even_intervals;
            total += 3.0 * h / 8.0
                * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]);
        } else {
            // single or double leftover intervals (n = 2 handled above, n = 3 here)
            total += h / 3.0 * (values[0] + 4.0 * values[1] + values[2]);
        }
    }
    total
}

/// Simpson for a closed (periodic) loop: `values` holds one full period
/// without the repeated endpoint.
pub fn simpson_periodic(values: &[f64], h: f64) -> f64 {
    let mut ext = Vec::with_capacity(values.len() + 1);
    ext.extend_from_slice(values);
    ext.push(values[0]);
    simpson(&ext, h)
}

/// Nodes and weights of the 8-point Gauss-Legendre rule on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_650_0,
    0.183_434_642_495_650_0,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Composite 8-point Gauss-Legendre quadrature of `f` over [a, b].
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            total += w * f(mid + half * x);
        }
    }
    total * 0.5 * h
}

/// Cumulative integral of uniformly sampled values, 6th order, with a
/// smoothly varying stencil so the error has no node-parity ripple.
///
/// Each interval [s_j, s_{j+1}] is integrated by fitting the degree-5
/// interpolant through the six nearest samples and integrating it exactly;
/// the result is the running sum. Output has the same length as the input
/// and starts at zero.
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 6 {
        // trapezoid fallback for very short runs
        for j in 1..n {
            out[j] = out[j - 1] + 0.5 * h * (values[j - 1] + values[j]);
        }
        return out;
    }
    // Integral over [x_k, x_{k+1}] of the quintic through samples at offsets
    // (k-2..k+3) relative to the window start, precomputed Newton-Cotes-style
    // weights for the centered window position.
    // Window samples w0..w5 at offsets 0..5, integrating over [2, 3]:
    const CENTER_W: [f64; 6] = [
        11.0 / 1440.0,
        -93.0 / 1440.0,
        802.0 / 1440.0,
        802.0 / 1440.0,
        -93.0 / 1440.0,
        11.0 / 1440.0,
    ];
    let panel = |lo: usize, target: usize| -> f64 {
        // integrate interpolant over [x_target, x_target+1] where the window
        // starts at sample index `lo`; generic fallback via Lagrange weights.
        let t0 = (target - lo) as f64;
        lagrange_panel_weights(t0)
            .iter()
            .zip(&values[lo..lo + 6])
            .map(|(w, v)| w * v)
            .sum::<f64>()
    };
    for j in 1..n {
        let k = j - 1; // interval [k, k+1]
        let inc = if (2..n - 3).contains(&k) {
            CENTER_W
                .iter()
                .zip(&values[k - 2..k + 4])
                .map(|(w, v)| w * v)
                .sum::<f64>()
        } else {
            let lo = k.saturating_sub(2).min(n - 6);
            panel(lo, k)
        };
        out[j] = out[j - 1] + h * inc;
    }
    out
}

/// Weights w_i so that integral over [t0, t0+1] of the quintic through
/// nodes at t = 0..5 equals sum w_i f_i.
fn lagrange_panel_weights(t0: f64) -> [f64; 6] {
    let mut w = [0.0; 6];
    // integrate each Lagrange basis polynomial with 16-point GL (exact for deg 5)
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = gauss_legendre(
            |t| {
                let mut p = 1.0;
                for k in 0..6 {
                    if k != i {
                        p *= (t - k as f64) / (i as f64 - k as f64);
                    }
                }
                p
            },
            t0,
            t0 + 1.0,
            2,
        );
    }
    w
}

/// 4th-order first derivative of uniformly sampled data.
/// `periodic` treats the samples as one full period (no repeated endpoint).
pub fn derivative_uniform(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        // low-order fallback
        for j in 0..n {
            out[j] = if j == 0 {
                (values[1.min(n - 1)] - values[0]) / h
            } else if j == n - 1 {
                (values[n - 1] - values[n - 2]) / h
            } else {
                (values[j + 1] - values[j - 1]) / (2.0 * h)
            };
        }
        return out;
    }
    let get = |j: isize| -> f64 {
        if periodic {
            let m = n as isize;
            values[(((j % m) + m) % m) as usize]
        } else {
            values[j.clamp(0, n as isize - 1) as usize]
        }
    };
    for j in 0..n {
        let ji = j as isize;
        if periodic || (2..n - 2).contains(&j) {
            out[j] =
                (get(ji - 2) - 8.0 * get(ji - 1) + 8.0 * get(ji + 1) - get(ji + 2)) / (12.0 * h);
        } else if j < 2 {
            // 4th-order one-sided
            let v = &values[0..5.min(n)];
            out[j] = one_sided_first(v, j, h);
        } else {
            let v = &values[n - 5..n];
            out[j] = -one_sided_first(
                &[v[4], v[3], v[2], v[1], v[0]],
                n - 1 - j,
                h,
            );
        }
    }
    out
}

fn one_sided_first(v: &[f64], at: usize, h: f64) -> f64 {
    // derivative at node `at` of the quartic through v[0..5]
    match at {
        0 => (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h),
        1 => (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h),
        _ => (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h),
    }
}

/// 4th-order second derivative of uniformly sampled data.
pub fn second_derivative_uniform(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    if n < 7 {
        let d1 = derivative_uniform(values, h, periodic);
        return derivative_uniform(&d1, h, periodic);
    }
    let get = |j: isize| -> f64 {
        if periodic {
            let m = n as isize;
            values[(((j % m) + m) % m) as usize]
        } else {
            values[j.clamp(0, n as isize - 1) as usize]
        }
    };
    let mut out = vec![0.0; n];
    for j in 0..n {
        let ji = j as isize;
        if periodic || (2..n - 2).contains(&j) {
            out[j] = (-get(ji - 2) + 16.0 * get(ji - 1) - 30.0 * get(ji)
                + 16.0 * get(ji + 1)
                - get(ji + 2))
                / (12.0 * h * h);
        } else {
            // one-sided 4th order (6 points)
            let (v, at): (Vec<f64>, usize) = if j < 2 {
                (values[0..6].to_vec(), j)
            } else {
                let mut v = values[n - 6..n].to_vec();
                v.reverse();
                (v, n - 1 - j)
            };
            out[j] = match at {
                0 => {
                    (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4]
                        - 10.0 * v[5])
                        / (12.0 * h * h)
                }
                _ => {
                    (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5])
                        / (12.0 * h * h)
                }
            };
        }
    }
    out
}

/// 8th-order first derivative on a uniform grid, used by independent
/// residual audits where the data has steep high derivatives. Ends fall back
/// to the 4th-order one-sided stencils of [`derivative_uniform`].
pub fn derivative_uniform_high(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    if n < 9 {
        return derivative_uniform(values, h, periodic);
    }
    let mut out = derivative_uniform(values, h, periodic);
    let c = [
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
    let get = |j: isize| -> f64 {
        if periodic {
            let m = n as isize;
            values[(((j % m) + m) % m) as usize]
        } else {
            values[j.clamp(0, n as isize - 1) as usize]
        }
    };
    for j in 0..n {
        if periodic || (4..n - 4).contains(&j) {
            let mut acc = 0.0;
            for (k, ck) in c.iter().enumerate() {
                acc += ck * get(j as isize + k as isize - 4);
            }
            out[j] = acc / h;
        }
    }
    out
}

/// 8th-order second derivative on a uniform grid (interior), 4th-order ends.
pub fn second_derivative_uniform_high(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    if n < 9 {
        return second_derivative_uniform(values, h, periodic);
    }
    let mut out = second_derivative_uniform(values, h, periodic);
    let c = [
        -1.0 / 560.0,
        8.0 / 315.0,
        -1.0 / 5.0,
        8.0 / 5.0,
        -205.0 / 72.0,
        8.0 / 5.0,
        -1.0 / 5.0,
        8.0 / 315.0,
        -1.0 / 560.0,
    ];
    let get = |j: isize| -> f64 {
        if periodic {
            let m = n as isize;
            values[(((j % m) + m) % m) as usize]
        } else {
            values[j.clamp(0, n as isize - 1) as usize]
        }
    };
    for j in 0..n {
        if periodic || (4..n - 4).contains(&j) {
            let mut acc = 0.0;
            for (k, ck) in c.iter().enumerate() {
                acc += ck * get(j as isize + k as isize - 4);
            }
            out[j] = acc / (h * h);
        }
    }
    out
}

/// Richardson-extrapolated central difference of a scalar closure, ~6th order.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = d(h);
    let d2 = d(0.5 * h);
    let d4 = d(0.25 * h);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Bisection refined by Newton, used by root polishing in the cubic solver
/// and the shooting routines. Returns the root of f in [a, b].
pub fn brent_root<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Accuracy(format!(
            "root not bracketed on [{a}, {b}] (f = {fa:.3e}, {fb:.3e})"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        let _ = fb;
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let h = 0.1;
        let values: Vec<f64> = (0..=10).map(|i| {
            let x = i as f64 * h;
            x * x * x - 2.0 * x + 1.0
        }).collect();
        // integral of x^3 - 2x + 1 over [0,1] = 1/4 - 1 + 1 = 1/4
        assert_relative_eq!(simpson(&values, h), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        let h = 0.2;
        let values: Vec<f64> = (0..=5).map(|i| (i as f64 * h).exp()).collect();
        let exact = 1f64.exp() - 1.0;
        assert_relative_eq!(simpson(&values, h), exact, epsilon = 5e-5);
    }

    #[test]
    fn cumulative_integral_is_smooth_and_accurate() {
        let n = 400;
        let h = std::f64::consts::TAU / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| (i as f64 * h).sin()).collect();
        let cum = cumulative_integral(&values, h);
        for (j, c) in cum.iter().enumerate() {
            let x = j as f64 * h;
            assert!((c - (1.0 - x.cos())).abs() < 1e-12, "node {j}: {c}");
        }
    }

    #[test]
    fn derivative_uniform_fourth_order() {
        let n = 200;
        let h = 1.0 / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| (3.0 * i as f64 * h).sin()).collect();
        let d = derivative_uniform(&values, h, false);
        for (j, dj) in d.iter().enumerate() {
            let x = j as f64 * h;
            assert!((dj - 3.0 * (3.0 * x).cos()).abs() < 1e-6, "node {j}");
        }
    }

    #[test]
    fn gauss_legendre_matches_closed_form() {
        let v = gauss_legendre(|x| (1.0 + x * x).sqrt(), 1.0, 2.0, 8);
        let anti = |r: f64| 0.5 * (r * (1.0 + r * r).sqrt() + r.asinh());
        assert_relative_eq!(v, anti(2.0) - anti(1.0), epsilon = 1e-14);
    }
}
