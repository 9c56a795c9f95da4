//! Mellin–Barnes contour evaluation of the two Meijer-G families.
//!
//! This is a reference path used to validate [`super::meijer`]; it is slow
//! and not used by the closed forms.
//!
//! With upper row `(1-a, 1, 1)` and lower row `(1, 0)` the kernel
//! `Γ(1+s) Γ(a-s) Γ(-s)² / Γ(1-s)` collapses to `-Γ(1+s) Γ(a-s) Γ(-s) / s`;
//! the derivative family loses the `1/s`. The contour `Re s = -1/2` separates
//! the left poles at `-1, -2, …` from the right poles at `0, 1, …` and
//! `a, a+1, …`, and the kernel decays like `exp(-3π|t|/2)` along it, so the
//! trapezoidal rule converges geometrically.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::ln_gamma_complex;
use crate::error::{domain, Error, Result};

/// Which of the two parameter families to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeijerFamily {
    /// `G^{1,3}_{3,2}(y | 1-a, 1, 1; 1, 0)`
    Log,
    /// `G^{2,3}_{4,3}(y | 1-a, 1, 1, 0; 1, 1, 0)`
    Frac,
}

const CONTOUR: f64 = -0.5;
const STEP: f64 = 1.0 / 32.0;
const MIN_POLE_GAP: f64 = 1e-6;

fn kernel(family: MeijerFamily, a: f64, ln_y: f64, s: Complex64) -> Complex64 {
    let log_gammas =
        ln_gamma_complex(1.0 + s) + ln_gamma_complex(a - s) + ln_gamma_complex(-s) - s * ln_y;
    let g = -log_gammas.exp();
    match family {
        MeijerFamily::Log => g / s,
        MeijerFamily::Frac => g,
    }
}

/// Numerical Mellin–Barnes integral of the selected family at shape `a`
/// and argument `y > 0`. The result of the `Frac` family is the signed
/// Meijer-G value (negative for `y > 0`).
pub fn mellin_barnes_oracle(family: MeijerFamily, a: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain("mellin_barnes_oracle", y));
    }
    if !a.is_finite() {
        return Err(domain("mellin_barnes_oracle", a));
    }
    // Right poles start at min(0, a); left poles at -1.
    if a - CONTOUR < MIN_POLE_GAP || a + 1.0 < MIN_POLE_GAP {
        return Err(Error::DegenerateParameters(format!(
            "shape {a} pinches the contour between the pole families"
        )));
    }
    let ln_y = y.ln();
    let re = |t: f64| kernel(family, a, ln_y, Complex64::new(CONTOUR, t)).re;

    // G = (1/π) ∫_0^∞ Re K(c + it) dt by conjugate symmetry.
    let mut acc = 0.5 * re(0.0);
    let mut peak = acc.abs();
    let mut m = 1.0;
    loop {
        let t = m * STEP;
        let v = re(t);
        acc += v;
        let mag = kernel(family, a, ln_y, Complex64::new(CONTOUR, t)).norm();
        peak = peak.max(mag);
        // Past the peak the modulus decays at least like exp(-(3π/2 - (a+1)/t) t);
        // the remaining tail is bounded by mag / rate.
        let rate = 1.5 * PI - (a + 1.0).max(0.0) / t;
        if rate > 1.0 && mag / rate < 1e-17 * peak.max(acc.abs() * STEP) {
            break;
        }
        m += 1.0;
        if t > 400.0 {
            return Err(Error::NonConvergence {
                terms: m as usize,
                last_term: mag,
            });
        }
    }
    Ok(acc * STEP / PI)
}
