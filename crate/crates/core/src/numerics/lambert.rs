use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const MAX_ITER: usize = 64;

/// Principal branch `W0(x)` of the Lambert W function, the solution `w >= -1`
/// of `w * exp(w) = x`.
///
/// Halley iteration from a piecewise starting point: the branch-point series
/// near `-1/e`, `ln(1 + x)` in the middle range and the two-term asymptotic
/// expansion for large arguments.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(Error::Domain {
            what: "lambert_w0",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).max(-1.0);
        let converged = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if converged {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // p = sqrt(2 (e x + 1)); W = -1 + p - p^2/3 + 11 p^3 / 72 - ...
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p() * (1.0 - 0.1 * x.ln_1p()).max(0.5)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W0(exp(ln_x))` for arguments whose exponential would overflow.
///
/// Solves `w + ln(w) = ln_x` by Newton iteration. Falls back to
/// [`lambert_w0`] when `exp(ln_x)` is representable.
pub fn lambert_w0_from_ln(ln_x: f64) -> Result<f64> {
    if ln_x.is_nan() {
        return Err(Error::Domain {
            what: "lambert_w0_from_ln",
            value: ln_x,
        });
    }
    if ln_x < 700.0 {
        return lambert_w0(ln_x.exp());
    }
    let mut w = ln_x - ln_x.ln();
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - ln_x;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    Ok(w)
}
