//! Double-exponential quadrature on finite and semi-infinite intervals.
//!
//! Both rules map the interval onto the real line with a transform whose
//! Jacobian decays double-exponentially, then apply the trapezoidal rule,
//! halving the step until successive estimates agree. The oracle integrals
//! all have analytic integrands with at worst algebraic or logarithmic
//! endpoint singularities, which these rules absorb.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const COARSE_STEP: f64 = 0.5;
const MAX_LEVEL: u32 = 10;
const T_LIMIT: f64 = 6.5;

/// Estimate of a definite integral and of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Trapezoidal sums of `g(t)` on `t = m h`, refined level by level.
///
/// `g` returns `None` where the transform leaves the representable range.
fn de_trapezoid<G: FnMut(f64) -> Option<f64>>(mut g: G, rel_tol: f64) -> Result<QuadResult> {
    let mut eval = |t: f64| -> Result<f64> {
        match g(t) {
            Some(v) if v.is_finite() => Ok(v),
            Some(_) => Err(Error::Quadrature { estimate: f64::NAN }),
            None => Ok(0.0),
        }
    };

    // Fix the truncation window on the coarse grid.
    let centre = eval(0.0)?;
    let mut coarse = centre;
    let mut peak = centre.abs();
    let mut bounds = [0.0; 2];
    for (slot, dir) in [(0usize, -1.0), (1, 1.0)] {
        let mut m = 1.0;
        let mut quiet = 0;
        loop {
            let t = dir * m * COARSE_STEP;
            let v = eval(t)?;
            coarse += v;
            peak = peak.max(v.abs());
            if v.abs() <= 1e-20 * peak {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 2 || t.abs() >= T_LIMIT {
                bounds[slot] = t;
                break;
            }
            m += 1.0;
        }
    }
    if peak == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }

    let mut sum = coarse;
    let mut h = COARSE_STEP;
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut t = bounds[0] + h;
        while t < bounds[1] {
            sum += eval(t)?;
            t += 2.0 * h;
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() || error <= 1e-300 {
            return Ok(QuadResult {
                value: estimate,
                error,
            });
        }
    }
    Err(Error::Quadrature { estimate: error })
}

/// `∫_a^b f(x) dx` by the tanh-sinh rule. `f` is never evaluated at the
/// endpoints themselves.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidConfig(format!(
            "tanh-sinh needs a finite interval, got [{a}, {b}]"
        )));
    }
    let half = 0.5 * (b - a);
    de_trapezoid(
        |t| {
            let s = FRAC_PI_2 * t.sinh();
            // distance to the nearer endpoint, free of cancellation
            let gap = half * 2.0 / ((2.0 * s.abs()).exp() + 1.0);
            let w = half * FRAC_PI_2 * t.cosh() / (s.cosh() * s.cosh());
            if gap == 0.0 || w == 0.0 {
                return None;
            }
            let x = if t >= 0.0 { b - gap } else { a + gap };
            if x <= a || x >= b {
                return None;
            }
            Some(w * f(x))
        },
        rel_tol,
    )
}

/// `∫_a^∞ f(x) dx` by the exp-sinh rule `x = a + scale · exp(π/2 sinh t)`.
///
/// `scale` should sit near where the integrand has most of its mass.
pub fn exp_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, rel_tol: f64) -> Result<QuadResult> {
    if !a.is_finite() || !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "exp-sinh needs a finite origin and positive scale, got a={a}, scale={scale}"
        )));
    }
    de_trapezoid(
        |t| {
            let e = (FRAC_PI_2 * t.sinh()).exp();
            let offset = scale * e;
            if offset == 0.0 || !offset.is_finite() {
                return None;
            }
            let x = a + offset;
            if x == a {
                return None;
            }
            let w = offset * FRAC_PI_2 * t.cosh();
            let v = f(x);
            if v == 0.0 {
                return Some(0.0);
            }
            Some(w * v)
        },
        rel_tol,
    )
}
