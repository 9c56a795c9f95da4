//! The double series behind both closed forms.
//!
//! For `Z = XY / (XU + YV)` with `X ~ Exp(λx)`, `Y ~ Exp(λy)` and
//! `U - 1`, `V - 1` gamma mixtures, conditioning on `U, V` gives
//! `P(Z > z | U, V) = e^{-zU/λy - zV/λx} 2c K1(2c)`, `c = z √(UV/(λx λy))`.
//! Expanding `2c K1(2c)` in powers of `c` and integrating each gamma
//! component term by term yields, per component pair `(j, μu) × (q, μv)`,
//!
//! ```text
//! S = P(z) [1 + Σ_k c_k Σ_{r,n} A_r B_n (2(ℓ - ψ_k) + Ĝ(j+r, βu) + Ĝ(q+n, βv))]
//! ```
//!
//! with `A_r = C(k+1, r) βu^r Γ(j+r)/Γ(j)` and likewise `B_n`. The double
//! inner sum factorises into per-side moment sums, so each `k` costs `O(k)`.
//! Every per-side sum is kept as a log-scale plus a scaled value.

use std::sync::OnceLock;

use super::{SeriesControl, SeriesMode};
use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, meijer_g_frac_norm, meijer_g_ln_norm, psi_k};

/// One gamma component of `U - 1`: weight, shape and scale. A zero shape
/// stands for `U ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Component {
    pub coeff: f64,
    pub shape: f64,
    pub mean: f64,
}

impl Component {
    pub const UNIT: Self = Self {
        coeff: 1.0,
        shape: 0.0,
        mean: 0.0,
    };
}

const LN_FACTORIAL_CACHE: usize = 4096;

fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..LN_FACTORIAL_CACHE)
            .map(|i| ln_gamma(i as f64 + 1.0))
            .collect()
    });
    match table.get(n) {
        Some(&v) => v,
        None => ln_gamma(n as f64 + 1.0),
    }
}

fn ln_choose(n: usize, r: usize) -> f64 {
    ln_factorial(n) - ln_factorial(r) - ln_factorial(n - r)
}

/// Per-side moment sums at one `k`, all scaled by `e^{-scale}`.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    scale: f64,
    s0: f64,
    s1: f64,
    sg: f64,
    s1g: f64,
    sf: f64,
}

/// Lazily grown tables for one side at fixed `z`.
struct Side {
    shape: f64,
    beta: f64,
    ln_beta: f64,
    // r ln β + ln Γ(j + r) - ln Γ(j)
    ln_ratio: Vec<f64>,
    g: Vec<f64>,
    f: Vec<f64>,
    with_frac: bool,
}

impl Side {
    fn new(c: &Component, lambda: f64, z: f64, with_frac: bool) -> Self {
        let beta = if c.shape == 0.0 {
            0.0
        } else {
            c.mean * lambda / (lambda + z * c.mean)
        };
        Self {
            shape: c.shape,
            beta,
            ln_beta: beta.ln(),
            ln_ratio: vec![0.0],
            g: Vec::new(),
            f: Vec::new(),
            with_frac,
        }
    }

    fn grow(&mut self, upto: usize) -> Result<()> {
        while self.ln_ratio.len() <= upto {
            let r = self.ln_ratio.len() - 1;
            let next = self.ln_ratio[r] + self.ln_beta + (self.shape + r as f64).ln();
            self.ln_ratio.push(next);
        }
        while self.g.len() <= upto {
            let a = self.shape + self.g.len() as f64;
            self.g.push(meijer_g_ln_norm(a, self.beta)?);
            if self.with_frac {
                self.f.push(meijer_g_frac_norm(a, self.beta)?);
            }
        }
        Ok(())
    }

    fn moments(&mut self, k: usize, scratch: &mut Vec<f64>) -> Result<Moments> {
        if self.shape == 0.0 {
            return Ok(Moments {
                s0: 1.0,
                ..Moments::default()
            });
        }
        let n = k + 1;
        self.grow(n)?;
        scratch.clear();
        scratch.extend((0..=n).map(|r| ln_choose(n, r) + self.ln_ratio[r]));
        let scale = scratch.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut m = Moments {
            scale,
            ..Moments::default()
        };
        for (r, &la) in scratch.iter().enumerate() {
            let w = (la - scale).exp();
            if w == 0.0 {
                continue;
            }
            let rf = r as f64;
            m.s0 += w;
            m.s1 += rf * w;
            m.sg += w * self.g[r];
            m.s1g += rf * w * self.g[r];
            if self.with_frac {
                m.sf += w * self.f[r];
            }
        }
        Ok(m)
    }
}

/// Series output for one component pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairSums {
    /// `ln P(z)`.
    pub log_p: f64,
    /// `-d ln P / dz`.
    pub rate: f64,
    /// `P Σ_k T_k`.
    pub pt: f64,
    /// `P Σ_k dT_k/dz`.
    pub pdt: f64,
}

impl PairSums {
    pub fn survival(&self) -> f64 {
        self.log_p.exp() + self.pt
    }

    pub fn distribution(&self) -> f64 {
        -self.log_p.exp_m1() - self.pt
    }

    pub fn density(&self) -> f64 {
        self.rate * (self.log_p.exp() + self.pt) - self.pdt
    }
}

/// Evaluates the pair series at `z > 0`. `u` is the component paired with
/// `λy`, `v` the one paired with `λx`.
pub(crate) fn pair_series(
    z: f64,
    lambda_x: f64,
    lambda_y: f64,
    u: &Component,
    v: &Component,
    ctl: &SeriesControl,
    with_density: bool,
) -> Result<PairSums> {
    debug_assert!(z > 0.0);
    let mut su = Side::new(u, lambda_y, z, with_density);
    let mut sv = Side::new(v, lambda_x, z, with_density);
    // dβ/dz = -β d
    let du = if u.shape == 0.0 { 0.0 } else { u.mean / (lambda_y + z * u.mean) };
    let dv = if v.shape == 0.0 { 0.0 } else { v.mean / (lambda_x + z * v.mean) };

    let log_p = log_prefactor(z, lambda_x, lambda_y, u, v);
    let rate = 1.0 / lambda_x + 1.0 / lambda_y + u.shape * du + v.shape * dv;

    let ln_z = z.ln();
    let ln_xy = (lambda_x * lambda_y).ln();
    let ell = ln_z - 0.5 * ln_xy;

    let mut pt = 0.0;
    let mut pdt = 0.0;
    let mut quiet = 0usize;
    let mut prev_mag = f64::INFINITY;
    // rounding noise of the alternating partial sums; terms below it cannot
    // move the result, whatever the relative target
    let mut peak = log_p.exp();
    let mut d_peak = 0.0f64;
    let mut history: Vec<f64> = Vec::with_capacity(ctl.k_max + 1);
    let mut scratch = Vec::new();

    for k in 0..=ctl.k_max {
        let mu = su.moments(k, &mut scratch)?;
        let mv = sv.moments(k, &mut scratch)?;
        let kf = k as f64;
        let ln_ck = (2.0 * kf + 2.0) * ln_z
            - (kf + 1.0) * ln_xy
            - ln_factorial(k)
            - ln_factorial(k + 1);
        let ln_base = log_p + ln_ck + mu.scale + mv.scale;
        let base = ln_base.exp();
        let two_l = 2.0 * (ell - psi_k(k as u32));

        let inner = two_l * mu.s0 * mv.s0 + mu.sg * mv.s0 + mu.s0 * mv.sg;
        let term = base * inner;
        pt += term;

        let mut d_inner = 0.0;
        if with_density {
            let d_ck = (2.0 * kf + 2.0) / z * inner;
            let d_u = du * (two_l * mu.s1 * mv.s0 + mu.s1g * mv.s0 + mu.s1 * mv.sg + mu.sf * mv.s0);
            let d_v = dv * (two_l * mu.s0 * mv.s1 + mu.sg * mv.s1 + mu.s0 * mv.s1g + mu.s0 * mv.sf);
            let d_l = 2.0 / z * mu.s0 * mv.s0;
            d_inner = d_ck - d_u - d_v + d_l;
        }
        let dterm = base * d_inner;
        pdt += dterm;

        // log-magnitude of the term envelope, robust to underflow of `base`
        let mag_inner = inner.abs().max(d_inner.abs() / rate);
        let log_mag = ln_base + mag_inner.max(f64::MIN_POSITIVE).ln();
        history.push(log_mag);

        let reference = (log_p.exp() + pt).abs().max(if with_density {
            (rate * (log_p.exp() + pt) - pdt).abs() / rate
        } else {
            0.0
        });
        peak = peak.max(term.abs());
        d_peak = d_peak.max(dterm.abs());
        // geometric remainder r/(1-r) times the current term
        let ratio = (log_mag - prev_mag).exp();
        let tail = if ratio < 1.0 { ratio / (1.0 - ratio) } else { f64::INFINITY };
        let small = tail * term.abs() <= (ctl.rel_tol * reference).max(f64::EPSILON * peak)
            && (!with_density
                || tail * dterm.abs()
                    <= (ctl.rel_tol * rate * reference).max(f64::EPSILON * d_peak.max(rate * peak)));
        let decreasing = log_mag < prev_mag;
        prev_mag = log_mag;

        if ctl.mode == SeriesMode::Adaptive {
            if small && decreasing {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(PairSums {
                        log_p,
                        rate,
                        pt,
                        pdt,
                    });
                }
            } else {
                quiet = 0;
            }
        }
        if ctl.mode == SeriesMode::FixedK && k == ctl.k_max {
            let mid = history[ctl.k_max / 2];
            if !small && log_mag >= mid {
                return Err(Error::NonConvergence {
                    terms: k + 1,
                    last_term: log_mag.exp(),
                });
            }
            return Ok(PairSums {
                log_p,
                rate,
                pt,
                pdt,
            });
        }
    }
    Err(Error::NonConvergence {
        terms: ctl.k_max + 1,
        last_term: history.last().map_or(f64::NAN, |l| l.exp()),
    })
}

/// `ln P(z) = -z(1/λx + 1/λy) - j ln(1 + zμu/λy) - q ln(1 + zμv/λx)`.
fn log_prefactor(z: f64, lambda_x: f64, lambda_y: f64, u: &Component, v: &Component) -> f64 {
    let mut lp = -z * (1.0 / lambda_x + 1.0 / lambda_y);
    if u.shape != 0.0 {
        lp -= u.shape * (z * u.mean / lambda_y).ln_1p();
    }
    if v.shape != 0.0 {
        lp -= v.shape * (z * v.mean / lambda_x).ln_1p();
    }
    lp
}

/// `P(z)` derivative rate at the origin, where the series vanishes.
pub(crate) fn density_at_origin(lambda_x: f64, lambda_y: f64, u: &Component, v: &Component) -> f64 {
    1.0 / lambda_x + 1.0 / lambda_y + u.shape * u.mean / lambda_y + v.shape * v.mean / lambda_x
}
