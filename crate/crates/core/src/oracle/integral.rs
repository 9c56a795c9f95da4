//! Direct quadrature of the conditional integrals.
//!
//! Given the interference sums, the hop SNRs integrate out in closed form:
//! `P(Z > z | U, V) = e^{-A} x K1(x)` with `A = zU/λy + zV/λx` and
//! `x = 2z √(UV/(λx λy))`. What remains is an expectation over `U` and `V`,
//! evaluated here by double-exponential quadrature against their densities.
//! Nothing is expanded in series, so agreement with [`crate::analytic`] is a
//! real check of the series and its Meijer-G terms.

use crate::analytic::{NodeInterference, Sm1Params, Sm2Params};
use crate::error::{domain, Result};
use crate::quad::exp_sinh;
use crate::specfun::{bessel_k0, bessel_k1, one_minus_x_k1};

const INNER_TOL: f64 = 1e-11;
const OUTER_TOL: f64 = 1e-10;

/// `E[f(U)]` for the law of one node.
fn expectation<F: FnMut(f64) -> Result<f64>>(node: &NodeInterference, mut f: F, tol: f64) -> Result<f64> {
    if node.is_none() {
        return f(1.0);
    }
    let scale = (node.mean() - 1.0).max(1e-300);
    let mut failure = None;
    let r = exp_sinh(
        |u| {
            let value = node.pdf(u).and_then(|d| if d == 0.0 { Ok(0.0) } else { Ok(d * f(u)?) });
            match value {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        1.0,
        scale,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// `1 - e^{-A} x K1(x)` without cancellation.
fn conditional_cdf(a: f64, x: f64) -> Result<f64> {
    Ok(-(-a).exp_m1() + (-a).exp() * one_minus_x_k1(x)?)
}

/// `P(W <= w)` by quadrature over the relay interference.
pub fn quad_cdf_sm1(w: f64, params: &Sm1Params) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(domain("quad_cdf_sm1", w));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let (lx, ly) = (params.lambda_x, params.lambda_y);
    expectation(
        &params.relay,
        |u| conditional_cdf(w / ly + w * u / lx, 2.0 * w * (u / (lx * ly)).sqrt()),
        OUTER_TOL,
    )
}

/// Density of `W` by quadrature, using `d/dx [x K1(x)] = -x K0(x)`.
pub fn quad_pdf_sm1(w: f64, params: &Sm1Params) -> Result<f64> {
    if !(w > 0.0) {
        return Err(domain("quad_pdf_sm1", w));
    }
    let (lx, ly) = (params.lambda_x, params.lambda_y);
    expectation(
        &params.relay,
        |u| {
            let rate = 1.0 / ly + u / lx;
            let x = 2.0 * w * (u / (lx * ly)).sqrt();
            let e = (-w * rate).exp();
            if e == 0.0 {
                return Ok(0.0);
            }
            Ok(e * (rate * x * bessel_k1(x)? + x * x * bessel_k0(x)? / w))
        },
        OUTER_TOL,
    )
}

/// `P(Z <= z)` by nested quadrature over both interference sums.
pub fn quad_cdf_sm2(z: f64, params: &Sm2Params) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(domain("quad_cdf_sm2", z));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let (lx, ly) = (params.lambda_x, params.lambda_y);
    expectation(
        &params.relay,
        |u| {
            expectation(
                &params.destination,
                |v| conditional_cdf(z * u / ly + z * v / lx, 2.0 * z * (u * v / (lx * ly)).sqrt()),
                INNER_TOL,
            )
        },
        OUTER_TOL,
    )
}
