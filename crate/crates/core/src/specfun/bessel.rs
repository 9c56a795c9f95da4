//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Small arguments use the logarithmic power series; larger ones use the
//! trapezoidal rule on `e^x K_ν(x) = ∫_0^∞ exp(-x (cosh t - 1)) cosh(ν t) dt`,
//! which converges geometrically because the integrand is entire.

use super::gamma::{psi_k, EULER_GAMMA};
use crate::error::{domain, Result};

const SERIES_LIMIT: f64 = 2.0;

/// `(ln(x/2) - ψ_k)`-weighted series shared by K1 and `1 - x K1(x)`:
/// returns `Σ_k (x/2)^{2k+2} / (k! (k+1)!) (ln(x/2) - ψ_k)`.
fn k1_log_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let ln_half = half.ln();
    let mut term = q; // (x/2)^{2k+2} / (k! (k+1)!) at k = 0
    let mut acc = 0.0;
    for k in 0..60u32 {
        let contrib = term * (ln_half - psi_k(k));
        acc += contrib;
        if contrib.abs() < 1e-18 * acc.abs().max(1e-300) && k > 2 {
            break;
        }
        let kf = f64::from(k);
        term *= q / ((kf + 1.0) * (kf + 2.0));
    }
    acc
}

fn k0_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let ln_half = half.ln();
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut acc = 0.0;
    for k in 0..60u32 {
        // ψ(k+1) = H_k - γ
        let contrib = term * (harmonic - EULER_GAMMA - ln_half);
        acc += contrib;
        if contrib.abs() < 1e-18 * acc.abs() && k > 2 {
            break;
        }
        let kf = f64::from(k + 1);
        harmonic += 1.0 / kf;
        term *= q / (kf * kf);
    }
    acc
}

/// `e^x K_ν(x)` for ν ∈ {0, 1} by the trapezoidal rule.
fn scaled_integral(nu: f64, x: f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.2);
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    let mut acc = 0.5 * f(0.0);
    let mut m = 1.0;
    loop {
        let t = m * h;
        let arg = x * (t.cosh() - 1.0);
        acc += f(t);
        if arg > 46.0 {
            break;
        }
        m += 1.0;
    }
    acc * h
}

/// K0(x) for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k0", x));
    }
    if x <= SERIES_LIMIT {
        Ok(k0_series(x))
    } else {
        Ok(scaled_integral(0.0, x) * (-x).exp())
    }
}

/// K1(x) for `x > 0`. Underflows gracefully to zero beyond `x ≈ 705`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k1", x));
    }
    if x <= SERIES_LIMIT {
        Ok(1.0 / x + 2.0 * k1_log_series(x) / x)
    } else {
        Ok(scaled_integral(1.0, x) * (-x).exp())
    }
}

/// `e^x K1(x)` for `x > 0`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k1_scaled", x));
    }
    if x <= SERIES_LIMIT {
        Ok(bessel_k1(x)? * x.exp())
    } else {
        Ok(scaled_integral(1.0, x))
    }
}

/// `1 - x K1(x)` without cancellation at small `x`; equals 1 at infinity
/// and 0 at the origin.
pub fn one_minus_x_k1(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if !(x > 0.0) {
        return Err(domain("one_minus_x_k1", x));
    }
    if x <= SERIES_LIMIT {
        Ok(-2.0 * k1_log_series(x))
    } else {
        Ok(1.0 - x * bessel_k1(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // mpmath.besselk at 30 digits
    const TABLE: [(f64, f64, f64); 10] = [
        (1e-8, 99999999.99999999, 18.536612259610778),
        (0.01, 99.97389411829625, 4.721244730161095),
        (0.5, 1.6564411200033009, 0.9244190712276659),
        (1.0, 0.6019072301972346, 0.42102443824070834),
        (2.0, 0.13986588181652243, 0.11389387274953344),
        (2.5, 0.07389081634774707, 0.06234755320036619),
        (5.0, 0.004044613445452164, 0.0036910983340425942),
        (10.0, 1.8648773453825585e-5, 1.7780062316167652e-5),
        (25.0, 3.532778073199934e-12, 3.464161562213114e-12),
        (50.0, 3.4441022267175556e-23, 3.4101677497894955e-23),
    ];

    #[test]
    fn k1_matches_reference_table() {
        for &(x, k1, _) in &TABLE {
            let got = bessel_k1(x).unwrap();
            assert!(rel(got, k1) < 1e-12, "x={x}: {got} vs {k1}");
        }
    }

    #[test]
    fn k0_matches_reference_table() {
        for &(x, _, k0) in &TABLE {
            let got = bessel_k0(x).unwrap();
            assert!(rel(got, k0) < 1e-12, "x={x}: {got} vs {k0}");
        }
    }

    #[test]
    fn one_minus_x_k1_is_accurate_near_zero() {
        // mpmath: 1 - x K1(x)
        let cases = [
            (1e-8, 9.5183061298053897e-16),
            (0.01, 0.00026105881703752358),
            (0.5, 0.17177943999834955),
            (2.0, 0.72026823636695515),
            (2.5, 0.81527295913063234),
        ];
        for (x, want) in cases {
            let got = one_minus_x_k1(x).unwrap();
            assert!(rel(got, want) < 1e-12, "x={x}: {got} vs {want}");
        }
        assert_eq!(one_minus_x_k1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn leading_singularity() {
        for &x in &[1e-6, 1e-9, 1e-12] {
            assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn large_arguments_decay_without_panicking() {
        let k = bessel_k1(50.0).unwrap();
        assert!(k > 0.0 && k < 1e-20);
        assert_eq!(bessel_k1(800.0).unwrap(), 0.0);
        // mpmath: e^700 K1(700)
        let s = bessel_k1_scaled(700.0).unwrap();
        assert!(rel(s, 0.047396187653494544) < 1e-12, "{s}");
    }

    #[test]
    fn rejects_non_positive_arguments() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k0(0.0).is_err());
    }

    #[test]
    fn series_and_integral_agree_at_the_switch() {
        let x = SERIES_LIMIT;
        let series = 1.0 / x + 2.0 * k1_log_series(x) / x;
        let integral = scaled_integral(1.0, x) * (-x).exp();
        assert!(rel(series, integral) < 1e-14);
    }
}
