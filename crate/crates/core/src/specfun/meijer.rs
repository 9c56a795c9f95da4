//! The two Meijer-G families of the closed forms, evaluated through their
//! Laplace-type integral representations
//!
//! ```text
//! G^{1,3}_{3,2}(y | 1-a, 1, 1; 1, 0)    =  ∫_0^∞ t^{a-1} e^{-t} ln(1 + y t) dt
//! G^{2,3}_{4,3}(y | 1-a, 1, 1, 0; 1, 1, 0) = -∫_0^∞ t^{a-1} e^{-t} y t / (1 + y t) dt
//! ```
//!
//! Both representations are checked against the Mellin–Barnes contour
//! integral in [`super::mellin`].
//!
//! The `*_norm` variants divide by `Γ(a)`, i.e. they are expectations over a
//! unit-scale gamma variate of shape `a`, and stay finite for shapes in the
//! thousands.

use super::gamma::{ln_gamma, stirling_correction, HALF_LN_2PI};
use crate::error::{domain, Result};

/// `e^δ - 1 - δ` without cancellation near zero.
fn expm1_minus_x(d: f64) -> f64 {
    if d.abs() < 0.5 {
        let mut term = d * d * 0.5;
        let mut acc = term;
        let mut n = 2.0;
        while term.abs() > 1e-18 * acc.abs() {
            n += 1.0;
            term *= d / n;
            acc += term;
        }
        acc
    } else {
        d.exp_m1() - d
    }
}

/// `a ln a - a - ln Γ(a)`, the log-density of `ln T` at its mode up to the
/// Jacobian.
fn log_mode_constant(a: f64) -> f64 {
    if a >= 10.0 {
        -0.5 * (2.0 * HALF_LN_2PI - a.ln()) - stirling_correction(a)
    } else {
        a * a.ln() - a - ln_gamma(a)
    }
}

/// `E[kernel(T)]` for `T ~ Gamma(a, 1)`, by the trapezoidal rule in `x = ln t`.
///
/// The integrand in `x` is analytic in a strip around the real axis and
/// decays double-exponentially to the right and exponentially to the left,
/// so the plain trapezoidal sum converges geometrically in the step size.
fn gamma_expectation<K: Fn(f64) -> f64>(a: f64, kernel: K) -> f64 {
    let x0 = a.ln();
    let c = log_mode_constant(a);
    let h = (0.5 / a.sqrt()).min(0.2);
    let weight = |d: f64| (c - a * expm1_minus_x(d)).exp();
    let term = |d: f64| weight(d) * kernel((x0 + d).exp());

    let mut acc = term(0.0);
    for dir in [1.0, -1.0] {
        let mut m = 1.0;
        let mut small = 0;
        loop {
            let d = dir * m * h;
            let v = term(d);
            acc += v;
            if v.abs() <= 1e-18 * acc.abs() || v == 0.0 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            m += 1.0;
            if m > 1e6 {
                break;
            }
        }
    }
    acc * h
}

/// `G^{1,3}_{3,2}(y | 1-a,1,1; 1,0) / Γ(a) = E[ln(1 + y T)]`, `T ~ Gamma(a)`.
///
/// Accepts any shape `a > 0` and `y >= 0`.
pub fn meijer_g_ln_norm(a: f64, y: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("meijer_g_ln_norm (shape)", a));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain("meijer_g_ln_norm (argument)", y));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_expectation(a, |t| (y * t).ln_1p()))
}

/// `E[y T / (1 + y T)]`, `T ~ Gamma(a)`; equals `y ∂/∂y` of [`meijer_g_ln_norm`].
pub fn meijer_g_frac_norm(a: f64, y: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("meijer_g_frac_norm (shape)", a));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain("meijer_g_frac_norm (argument)", y));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_expectation(a, |t| {
        let yt = y * t;
        yt / (1.0 + yt)
    }))
}

fn check_public(function: &'static str, a: f64, y: f64) -> Result<()> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(domain(function, a));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain(function, y));
    }
    Ok(())
}

/// `G^{1,3}_{3,2}(y | 1-a, 1, 1; 1, 0)` for `a >= 1`, `y > 0`.
///
/// Overflows to infinity once `Γ(a)` does (`a > 171`); use
/// [`meijer_g_ln_norm`] there.
pub fn meijer_g_ln(a: f64, y: f64) -> Result<f64> {
    check_public("meijer_g_ln", a, y)?;
    Ok(meijer_g_ln_norm(a, y)? * ln_gamma(a).exp())
}

/// `∫_0^∞ t^{a-1} e^{-t} y t / (1 + y t) dt = y d/dy meijer_g_ln(a, y)`.
///
/// This is the magnitude of `G^{2,3}_{4,3}(y | 1-a, 1, 1, 0; 1, 1, 0)`,
/// which itself is negative.
pub fn meijer_g_frac(a: f64, y: f64) -> Result<f64> {
    check_public("meijer_g_frac", a, y)?;
    Ok(meijer_g_frac_norm(a, y)? * ln_gamma(a).exp())
}
