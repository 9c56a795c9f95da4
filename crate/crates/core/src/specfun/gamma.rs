use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result};

/// 0.5 * ln(2π)
pub(crate) const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_{2k} / (2k (2k-1)) for k = 1..7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// B_{2k} / (2k) for k = 1..7.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

const SHIFT_TO: f64 = 10.0;

/// Remainder of Stirling's formula,
/// `ln Γ(x) - (x - 1/2) ln x + x - ln(2π)/2`, valid for `x >= 10`.
pub(crate) fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut shift = 0.0;
    let mut prod = 1.0;
    let mut z = x;
    while z < SHIFT_TO {
        prod *= z;
        z += 1.0;
    }
    if prod != 1.0 {
        shift = prod.ln();
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_correction(z) - shift
}

/// Principal-ish log gamma for complex arguments; only `exp` of the result is
/// meaningful, the branch is not tracked.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z);
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < SHIFT_TO {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + acc * inv - shift
}

/// Digamma function ψ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", x));
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < SHIFT_TO {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = 0.0;
    for c in DIGAMMA_ASYMP.iter().rev() {
        series = series * inv2 + c;
    }
    Ok(acc + z.ln() - 0.5 / z - series * inv2)
}

/// `(ψ(k+1) + ψ(k+2)) / 2`, the constant that accompanies the logarithm in
/// the small-argument expansion of `x K1(x)`.
pub fn psi_k(k: u32) -> f64 {
    // ψ(n + 1) = H_n - γ
    let harmonic: f64 = (1..=k).map(|i| 1.0 / f64::from(i)).sum();
    harmonic - EULER_GAMMA + 0.5 / f64::from(k + 1)
}

/// `ln C(n, k)` for `k <= n`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(f64::from(n) + 1.0) - ln_gamma(f64::from(k) + 1.0) - ln_gamma(f64::from(n - k) + 1.0)
}
