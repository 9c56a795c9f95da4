//! The i.i.d. specialisations, summed exactly as written: a triple sum over
//! `k`, `n`, `r` with no factorisation of the inner double sum. They share
//! no code with the general series beyond the special functions, which
//! makes them an independent check of it.

use super::{SeriesControl, SeriesMode};
use crate::error::{domain, Error, Result};
use crate::specfun::{ln_binomial, ln_gamma, meijer_g_ln_norm, psi_k};

/// i.i.d. Nakagami-m interferers at both nodes.
///
/// Node 1 is the relay: its `L1` interferers of mean INR `inr1` and shape
/// `m1` load the first hop, of mean SNR `lambda1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub inr1: f64,
    pub inr2: f64,
    pub m1: f64,
    pub m2: f64,
    pub l1: u32,
    pub l2: u32,
}

/// One node's gamma law in the triple sum: `U - 1 ~ Gamma(shape, scale)`,
/// travelling with the hop of mean SNR `lambda`.
struct Node {
    lambda: f64,
    shape: f64,
    scale: f64,
}

fn triple_sum(gamma: f64, a: Node, b: Node, ctl: &SeriesControl) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let beta_a = a.lambda * a.scale / (a.lambda + gamma * a.scale);
    let beta_b = b.lambda * b.scale / (b.lambda + gamma * b.scale);
    let log_p = -gamma * (1.0 / a.lambda + 1.0 / b.lambda)
        - a.shape * (gamma * a.scale / a.lambda).ln_1p()
        - b.shape * (gamma * b.scale / b.lambda).ln_1p();
    let ln_gamma_over = (gamma * gamma / (a.lambda * b.lambda)).ln();
    let ell = gamma.ln() - 0.5 * (a.lambda * b.lambda).ln();
    let lg_a0 = ln_gamma(a.shape);
    let lg_b0 = ln_gamma(b.shape);

    let mut g_a: Vec<f64> = Vec::new();
    let mut g_b: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut history = Vec::with_capacity(ctl.k_max + 1);
    for k in 0..=ctl.k_max {
        let n_top = k + 1;
        while g_a.len() <= n_top {
            g_a.push(meijer_g_ln_norm(a.shape + g_a.len() as f64, beta_a)?);
            g_b.push(meijer_g_ln_norm(b.shape + g_b.len() as f64, beta_b)?);
        }
        let kf = k as f64;
        let psi = psi_k(k as u32);
        let lead = log_p + (kf + 1.0) * ln_gamma_over - ln_gamma(kf + 1.0) - ln_gamma(kf + 2.0)
            - lg_a0
            - lg_b0;
        let mut block = 0.0;
        for n in 0..=n_top {
            let nf = n as f64;
            let lg_bn = ln_gamma(b.shape + nf);
            for r in 0..=n_top {
                let rf = r as f64;
                let lg_ar = ln_gamma(a.shape + rf);
                let ln_w = lead
                    + ln_binomial(n_top as u32, n as u32)
                    + ln_binomial(n_top as u32, r as u32)
                    + rf * beta_a.ln()
                    + nf * beta_b.ln()
                    + lg_ar
                    + lg_bn;
                // Γ(a+r)Γ(b+n)·2(ℓ-ψ_k) + Γ(a+r)G(b+n) + Γ(b+n)G(a+r), with the
                // common Γ(a+r)Γ(b+n) folded into ln_w
                let bracket = 2.0 * (ell - psi) + g_b[n] + g_a[r];
                block += ln_w.exp() * bracket;
            }
        }
        sum += block;
        let reference = (log_p.exp() + sum).abs();
        let small = block.abs() <= ctl.rel_tol * reference;
        history.push(block.abs());
        match ctl.mode {
            SeriesMode::Adaptive => {
                let decreasing = k == 0 || block.abs() < history[k - 1];
                if small && decreasing {
                    quiet += 1;
                    if quiet >= 3 {
                        return finish(log_p, sum);
                    }
                } else {
                    quiet = 0;
                }
            }
            SeriesMode::FixedK if k == ctl.k_max => {
                if !small && block.abs() >= history[ctl.k_max / 2] {
                    return Err(Error::NonConvergence {
                        terms: k + 1,
                        last_term: block.abs(),
                    });
                }
                return finish(log_p, sum);
            }
            SeriesMode::FixedK => {}
        }
    }
    Err(Error::NonConvergence {
        terms: ctl.k_max + 1,
        last_term: history.last().copied().unwrap_or(f64::NAN),
    })
}

fn finish(log_p: f64, sum: f64) -> Result<f64> {
    let value = -log_p.exp_m1() - sum;
    if !(-1e-9..=1.0 + 1e-9).contains(&value) {
        return Err(Error::OutOfRange {
            quantity: "probability",
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Outage CDF with `L` i.i.d. Rayleigh interferers of mean INR `lambda_i` at
/// each node and equal mean SNR `lambda` on both hops.
pub fn cdf_sm2_iid_equal(gamma: f64, lambda: f64, lambda_i: f64, l: u32, ctl: &SeriesControl) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(domain("cdf_sm2_iid_equal", gamma));
    }
    if !(lambda > 0.0 && lambda_i > 0.0) || l == 0 {
        return Err(Error::InvalidConfig(format!(
            "need positive means and at least one interferer, got λ={lambda}, λ_I={lambda_i}, L={l}"
        )));
    }
    let node = || Node {
        lambda,
        shape: f64::from(l),
        scale: lambda_i,
    };
    triple_sum(gamma, node(), node(), ctl)
}

/// Outage CDF with i.i.d. Nakagami-m interferers at both nodes; the
/// aggregate INR at node `i` is `Gamma(m_i L_i, inr_i / m_i)`.
pub fn cdf_nakagami(gamma: f64, p: &NakagamiParams, ctl: &SeriesControl) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(domain("cdf_nakagami", gamma));
    }
    let positive = [p.lambda1, p.lambda2, p.inr1, p.inr2, p.m1, p.m2];
    if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || p.l1 == 0 || p.l2 == 0 {
        return Err(Error::InvalidConfig(format!("invalid Nakagami parameters {p:?}")));
    }
    let relay = Node {
        lambda: p.lambda1,
        shape: p.m1 * f64::from(p.l1),
        scale: p.inr1 / p.m1,
    };
    let dest = Node {
        lambda: p.lambda2,
        shape: p.m2 * f64::from(p.l2),
        scale: p.inr2 / p.m2,
    };
    triple_sum(gamma, relay, dest, ctl)
}
