//! Double-exponential quadrature: tanh-sinh on finite intervals and exp-sinh on
//! half-lines.

use crate::error::{Error, Result};

/// Integral estimate with the difference between the last two refinement levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

const MAX_LEVEL: usize = 12;

/// Tanh-sinh quadrature of `f` over `[a, b]` to relative tolerance `tol`.
///
/// The integrand may have integrable endpoint singularities; it is never evaluated
/// at the endpoints themselves. Nodes near `b` are limited by the spacing of floats
/// around `b`, so singularities are best placed at `a`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let hpi = std::f64::consts::FRAC_PI_2;
    // node x = tanh(π/2 sinh t); distance to the endpoint computed without cancellation
    let eval = |t: f64| -> f64 {
        let u = hpi * t.sinh();
        let cosh_u = u.cosh();
        let w = hpi * t.cosh() / (cosh_u * cosh_u);
        let delta = 1.0 / (u.exp() * cosh_u); // 1 - tanh(u) for u > 0
        if delta == 0.0 || w == 0.0 {
            return 0.0;
        }
        // each side is dropped only once its own node reaches the endpoint
        let right = b - half * delta;
        let left = a + half * delta;
        let fr = if right < b && right > a { f(right) } else { 0.0 };
        let fl = if left > a && left < b { f(left) } else { 0.0 };
        w * (fr + fl)
    };
    let t_max = 6.5;
    let mut h = 1.0;
    let mut sum = hpi * f(mid);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h);
        k += 1;
    }
    let mut estimate = half * h * sum;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            add += eval(k as f64 * h);
            k += 2;
        }
        sum += add;
        let next = half * h * sum;
        let err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Numeric(
                "tanh-sinh quadrature produced a non-finite value".into(),
            ));
        }
        if err <= tol * estimate.abs() || err < 1e-300 {
            return Ok(QuadResult {
                value: estimate,
                error: err.max(f64::EPSILON * estimate.abs()),
            });
        }
    }
    Err(Error::Accuracy(format!(
        "tanh-sinh quadrature did not reach tolerance {tol:e} on [{a}, {b}]"
    )))
}

/// Exp-sinh quadrature of `f` over `[a, ∞)` for integrands decaying at least exponentially.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<QuadResult> {
    let hpi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> f64 {
        let e = (hpi * t.sinh()).exp();
        let w = hpi * t.cosh() * e;
        let x = a + e;
        if !x.is_finite() || !w.is_finite() {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let (t_lo, t_hi) = (-5.0, 5.0);
    let mut h = 0.5;
    let nodes = |h: f64, step: usize, start: i64| -> f64 {
        let mut acc = 0.0;
        let mut k = start;
        loop {
            let t = k as f64 * h;
            if t > t_hi {
                break;
            }
            if t >= t_lo {
                acc += eval(t);
            }
            k += step as i64;
        }
        acc
    };
    let k0 = (t_lo / h).ceil() as i64;
    let mut sum = nodes(h, 1, k0);
    let mut estimate = h * sum;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut k = (t_lo / h).ceil() as i64;
        if k % 2 == 0 {
            k += 1;
        }
        sum += nodes(h, 2, k);
        let next = h * sum;
        let err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Numeric("exp-sinh quadrature produced a non-finite value".into()));
        }
        if err <= tol * estimate.abs() || err < 1e-300 {
            return Ok(QuadResult {
                value: estimate,
                error: err.max(f64::EPSILON * estimate.abs()),
            });
        }
    }
    Err(Error::Accuracy(format!(
        "exp-sinh quadrature did not reach tolerance {tol:e} on [{a}, ∞)"
    )))
}
