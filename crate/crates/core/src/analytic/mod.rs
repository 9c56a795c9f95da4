//! Closed-form CDFs and PDFs of the end-to-end SINR.
//!
//! Both system models reduce to `Z = XY / (XU + YV)`:
//!
//! * interferers at the relay only: `W = XY / (X + YU)`, which is `Z` with
//!   the `λy`-side interference absent and `V = U`;
//! * interferers at both nodes: `Z` itself.
//!
//! Physically, `1/SINR = U/γ1 + V/γ2` under the hypothetical relay gain, so
//! the relay-side sum always travels with the first-hop mean SNR.

mod iid;
mod series;

use rayon::prelude::*;

use crate::charcoef::ShiftedSum;
use crate::error::{Error, Result};
use crate::model::{
    derive_hop_params, outage_threshold, Fading, Interference, InterfererPopulation,
    NetworkConfig, SystemModel, ThresholdSpec,
};
use crate::specfun::{bessel_k0, bessel_k1, ln_gamma, one_minus_x_k1};
use series::{density_at_origin, pair_series, Component, PairSums};

pub use iid::{cdf_nakagami, cdf_sm2_iid_equal, NakagamiParams};

/// How the outer `k` series is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesMode {
    /// Sum `k = 0..=k_max`; fail only if the terms are still growing.
    FixedK,
    /// Stop once three consecutive decreasing terms fall below
    /// `rel_tol` of the partial sum; fail at `k_max`.
    Adaptive,
}

/// Truncation of the outer series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub k_max: usize,
    pub rel_tol: f64,
    pub mode: SeriesMode,
}

impl SeriesControl {
    pub fn new(k_max: usize, rel_tol: f64, mode: SeriesMode) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::InvalidConfig("k_max must be at least 1".into()));
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "series tolerance {rel_tol} outside (0, 1e-3]"
            )));
        }
        Ok(Self {
            k_max,
            rel_tol,
            mode,
        })
    }

    pub fn fixed(k_max: usize) -> Self {
        Self {
            k_max: k_max.max(1),
            ..Self::default()
        }
    }

    pub fn adaptive(k_max: usize, rel_tol: f64) -> Result<Self> {
        Self::new(k_max, rel_tol, SeriesMode::Adaptive)
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            k_max: 100,
            rel_tol: 1e-12,
            mode: SeriesMode::FixedK,
        }
    }
}

/// Law of `U - 1` at one node: the aggregate INR.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeInterference {
    /// No interferers, `U ≡ 1`.
    None,
    /// Independent Rayleigh interferers: a hypoexponential sum.
    Rayleigh(ShiftedSum),
    /// A single gamma law, e.g. i.i.d. Nakagami interferers where the shape
    /// is `m L` and the scale `λ_I / m`.
    Gamma { shape: f64, scale: f64 },
}

impl NodeInterference {
    /// Rayleigh interferers with the given mean INRs; empty means none.
    pub fn rayleigh(mean_inrs: &[f64]) -> Result<Self> {
        if mean_inrs.is_empty() {
            return Ok(Self::None);
        }
        Ok(Self::Rayleigh(ShiftedSum::from_means(mean_inrs)?))
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma interference needs positive shape and scale, got {shape}, {scale}"
            )));
        }
        Ok(Self::Gamma { shape, scale })
    }

    /// Aggregate INR law of a population.
    ///
    /// Nakagami interferers of a common mean sum to one gamma variate; with
    /// distinct means and integer `m` each interferer splits into `m`
    /// exponentials of mean `λ_I / m`.
    pub fn from_population(pop: &InterfererPopulation) -> Result<Self> {
        if pop.is_empty() {
            return Ok(Self::None);
        }
        match pop.fading() {
            Fading::Rayleigh => Self::rayleigh(pop.mean_inrs()),
            Fading::Nakagami { m } => {
                if let Some(mean) = pop.common_mean() {
                    return Self::gamma(m * pop.len() as f64, mean / m);
                }
                if m.fract() == 0.0 && m <= 64.0 {
                    let reps = m as usize;
                    let expanded: Vec<f64> = pop
                        .mean_inrs()
                        .iter()
                        .flat_map(|&x| std::iter::repeat_n(x / m, reps))
                        .collect();
                    return Self::rayleigh(&expanded);
                }
                Err(Error::InvalidConfig(
                    "Nakagami interferers with distinct means need an integer shape".into(),
                ))
            }
        }
    }

    /// `ln E[e^{-t(U-1)}]`, the log Laplace transform of the aggregate INR.
    pub fn ln_laplace(&self, t: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Rayleigh(s) => {
                let sp = s.spectrum();
                sp.distinct_means()
                    .iter()
                    .zip(sp.multiplicities())
                    .map(|(m, &k)| -f64::from(k) * (m * t).ln_1p())
                    .sum()
            }
            Self::Gamma { shape, scale } => -shape * (scale * t).ln_1p(),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }

    /// `E[U]`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::None => 1.0,
            Self::Rayleigh(s) => s.mean(),
            Self::Gamma { shape, scale } => 1.0 + shape * scale,
        }
    }

    /// Density of `U` at `u >= 1`; [`Error::PointMass`] without interferers.
    pub fn pdf(&self, u: f64) -> Result<f64> {
        match self {
            Self::None => Err(Error::PointMass),
            Self::Rayleigh(s) => s.pdf(u),
            Self::Gamma { shape, scale } => {
                if !(u >= 1.0) || !u.is_finite() {
                    return Err(crate::error::domain("NodeInterference::pdf", u));
                }
                let x = u - 1.0;
                if x == 0.0 {
                    return Ok(match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    });
                }
                Ok(((shape - 1.0) * x.ln() - x / scale - ln_gamma(*shape) - shape * scale.ln()).exp())
            }
        }
    }

    fn components(&self) -> Vec<Component> {
        match self {
            Self::None => vec![Component::UNIT],
            Self::Rayleigh(s) => s
                .terms()
                .map(|t| Component {
                    coeff: t.coeff,
                    shape: f64::from(t.order),
                    mean: t.mean,
                })
                .collect(),
            Self::Gamma { shape, scale } => vec![Component {
                coeff: 1.0,
                shape: *shape,
                mean: *scale,
            }],
        }
    }
}

fn check_means(lambda_x: f64, lambda_y: f64) -> Result<()> {
    for (name, v) in [("lambda_x", lambda_x), ("lambda_y", lambda_y)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Parameters of `W = XY / (X + YU)`: interferers at the relay only.
#[derive(Debug, Clone, PartialEq)]
pub struct Sm1Params {
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub relay: NodeInterference,
}

impl Sm1Params {
    pub fn new(lambda_x: f64, lambda_y: f64, relay: NodeInterference) -> Result<Self> {
        check_means(lambda_x, lambda_y)?;
        Ok(Self {
            lambda_x,
            lambda_y,
            relay,
        })
    }

    /// Rayleigh interferers with the given mean INRs.
    pub fn rayleigh(lambda_x: f64, lambda_y: f64, relay_inrs: &[f64]) -> Result<Self> {
        Self::new(lambda_x, lambda_y, NodeInterference::rayleigh(relay_inrs)?)
    }

    fn as_sm2(&self) -> Sm2Params {
        Sm2Params {
            lambda_x: self.lambda_x,
            lambda_y: self.lambda_y,
            relay: NodeInterference::None,
            destination: self.relay.clone(),
        }
    }
}

/// Parameters of `Z = XY / (XU + YV)`. `relay` is `U`, paired with `λy`;
/// `destination` is `V`, paired with `λx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sm2Params {
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub relay: NodeInterference,
    pub destination: NodeInterference,
}

impl Sm2Params {
    pub fn new(
        lambda_x: f64,
        lambda_y: f64,
        relay: NodeInterference,
        destination: NodeInterference,
    ) -> Result<Self> {
        check_means(lambda_x, lambda_y)?;
        Ok(Self {
            lambda_x,
            lambda_y,
            relay,
            destination,
        })
    }

    pub fn rayleigh(lambda_x: f64, lambda_y: f64, relay_inrs: &[f64], dest_inrs: &[f64]) -> Result<Self> {
        Self::new(
            lambda_x,
            lambda_y,
            NodeInterference::rayleigh(relay_inrs)?,
            NodeInterference::rayleigh(dest_inrs)?,
        )
    }
}

#[derive(Clone, Copy)]
enum Quantity {
    Cdf,
    Sf,
    Pdf,
}

fn check_abscissa(function: &'static str, z: f64) -> Result<()> {
    if !(z >= 0.0) || z.is_nan() {
        return Err(crate::error::domain(function, z));
    }
    Ok(())
}

fn evaluate(z: f64, p: &Sm2Params, ctl: &SeriesControl, what: Quantity) -> Result<f64> {
    if p.relay.is_none() && p.destination.is_none() {
        return match what {
            Quantity::Cdf => cdf_no_interference(z, p.lambda_x, p.lambda_y),
            Quantity::Sf => Ok(1.0 - cdf_no_interference(z, p.lambda_x, p.lambda_y)?),
            Quantity::Pdf => pdf_no_interference(z, p.lambda_x, p.lambda_y),
        };
    }
    if z.is_infinite() {
        return Ok(match what {
            Quantity::Cdf => 1.0,
            Quantity::Sf | Quantity::Pdf => 0.0,
        });
    }
    let us = p.relay.components();
    let vs = p.destination.components();
    if z == 0.0 {
        return Ok(match what {
            Quantity::Cdf => 0.0,
            Quantity::Sf => 1.0,
            Quantity::Pdf => us
                .iter()
                .flat_map(|u| vs.iter().map(move |v| (u, v)))
                .map(|(u, v)| u.coeff * v.coeff * density_at_origin(p.lambda_x, p.lambda_y, u, v))
                .sum(),
        });
    }
    // x K1(x) <= 1 gives P(Z > z) <= E[e^{-zS}] with S = U/λy + V/λx >= a,
    // a product of Laplace transforms. The density is at most 2 E[S e^{-zS}],
    // and S e^{-zS} <= 2/(e z) e^{-zS/2}
    let a = density_at_scale(p);
    let ln_tail = |t: f64| -a * t + p.relay.ln_laplace(t / p.lambda_y) + p.destination.ln_laplace(t / p.lambda_x);
    let ln_bound = ln_tail(z);
    let negligible = match what {
        Quantity::Cdf => ln_bound < -54.0 * std::f64::consts::LN_2,
        Quantity::Sf => ln_bound < f64::MIN_POSITIVE.ln(),
        Quantity::Pdf => (4.0 / (std::f64::consts::E * z)).ln() + ln_tail(0.5 * z) < f64::MIN_POSITIVE.ln(),
    };
    if negligible {
        return Ok(match what {
            Quantity::Cdf => 1.0,
            Quantity::Sf | Quantity::Pdf => 0.0,
        });
    }
    let with_density = matches!(what, Quantity::Pdf);
    let mut acc = crate::sum::CompensatedSum::new();
    for u in &us {
        for v in &vs {
            let s: PairSums = pair_series(z, p.lambda_x, p.lambda_y, u, v, ctl, with_density)?;
            let value = match what {
                Quantity::Cdf => s.distribution(),
                Quantity::Sf => s.survival(),
                Quantity::Pdf => s.density(),
            };
            acc.add(u.coeff * v.coeff * value);
        }
    }
    let value = acc.value();
    match what {
        Quantity::Cdf | Quantity::Sf => clamp_probability(value),
        Quantity::Pdf => {
            if value < -1e-9 * density_at_scale(p) {
                return Err(Error::OutOfRange {
                    quantity: "density",
                    value,
                });
            }
            Ok(value.max(0.0))
        }
    }
}

fn density_at_scale(p: &Sm2Params) -> f64 {
    1.0 / p.lambda_x + 1.0 / p.lambda_y
}

fn clamp_probability(value: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&value) {
        return Err(Error::OutOfRange {
            quantity: "probability",
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `P(W <= w)` for `W = XY / (X + YU)`.
pub fn cdf_sm1(w: f64, params: &Sm1Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("cdf_sm1", w)?;
    evaluate(w, &params.as_sm2(), ctl, Quantity::Cdf)
}

/// `P(W > w)`, accurate where the CDF is close to one.
pub fn sf_sm1(w: f64, params: &Sm1Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("sf_sm1", w)?;
    evaluate(w, &params.as_sm2(), ctl, Quantity::Sf)
}

/// Density of `W`.
pub fn pdf_sm1(w: f64, params: &Sm1Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("pdf_sm1", w)?;
    evaluate(w, &params.as_sm2(), ctl, Quantity::Pdf)
}

/// `P(Z <= z)` for `Z = XY / (XU + YV)`.
pub fn cdf_sm2(z: f64, params: &Sm2Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("cdf_sm2", z)?;
    evaluate(z, params, ctl, Quantity::Cdf)
}

/// `P(Z > z)`.
pub fn sf_sm2(z: f64, params: &Sm2Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("sf_sm2", z)?;
    evaluate(z, params, ctl, Quantity::Sf)
}

/// Density of `Z`.
pub fn pdf_sm2(z: f64, params: &Sm2Params, ctl: &SeriesControl) -> Result<f64> {
    check_abscissa("pdf_sm2", z)?;
    evaluate(z, params, ctl, Quantity::Pdf)
}

/// Evaluates `cdf_sm2` on a grid in parallel; element `i` depends only on
/// `grid[i]`.
pub fn cdf_sm2_grid(grid: &[f64], params: &Sm2Params, ctl: &SeriesControl) -> Vec<Result<f64>> {
    grid.par_iter().map(|&z| cdf_sm2(z, params, ctl)).collect()
}

/// `P(XY/(X+Y) <= w)`, `1 - 2c e^{-w(1/λx + 1/λy)} K1(2c)` with
/// `c = w / √(λx λy)`.
pub fn cdf_no_interference(w: f64, lambda_x: f64, lambda_y: f64) -> Result<f64> {
    check_abscissa("cdf_no_interference", w)?;
    check_means(lambda_x, lambda_y)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    if w.is_infinite() {
        return Ok(1.0);
    }
    let a = w * (1.0 / lambda_x + 1.0 / lambda_y);
    let x = 2.0 * w / (lambda_x * lambda_y).sqrt();
    Ok((-(-a).exp_m1() + (-a).exp() * one_minus_x_k1(x)?).clamp(0.0, 1.0))
}

/// Density of `XY/(X+Y)`.
pub fn pdf_no_interference(w: f64, lambda_x: f64, lambda_y: f64) -> Result<f64> {
    check_abscissa("pdf_no_interference", w)?;
    check_means(lambda_x, lambda_y)?;
    let rate = 1.0 / lambda_x + 1.0 / lambda_y;
    if w == 0.0 {
        return Ok(rate);
    }
    if w.is_infinite() {
        return Ok(0.0);
    }
    let b = 2.0 / (lambda_x * lambda_y).sqrt();
    let x = b * w;
    // d/dx [x K1(x)] = -x K0(x)
    Ok((-w * rate).exp() * (rate * x * bessel_k1(x)? + b * x * bessel_k0(x)?))
}

/// Closed-form parameters of a configuration in the unified form
/// `Z = XY / (XU + YV)`. System model 1 puts its relay interferers in `V`,
/// the slot paired with the first hop.
pub fn link_params(config: &NetworkConfig, interference: &Interference) -> Result<Sm2Params> {
    interference.check_model(config.model())?;
    let hops = derive_hop_params(config)?;
    let relay = NodeInterference::from_population(&interference.relay)?;
    match config.model() {
        SystemModel::Sm1 => Ok(Sm1Params::new(hops.lambda1, hops.lambda2, relay)?.as_sm2()),
        SystemModel::Sm2 => {
            let dest = NodeInterference::from_population(&interference.destination)?;
            Sm2Params::new(hops.lambda2, hops.lambda1, relay, dest)
        }
    }
}

/// Outage probability `P(SINR < γ_th)` under the hypothetical relay gain.
pub fn outage_probability(
    config: &NetworkConfig,
    interference: &Interference,
    spec: &ThresholdSpec,
    ctl: &SeriesControl,
) -> Result<f64> {
    let params = link_params(config, interference)?;
    if spec.is_degenerate() {
        return Ok(0.0);
    }
    cdf_sm2(outage_threshold(spec), &params, ctl)
}
