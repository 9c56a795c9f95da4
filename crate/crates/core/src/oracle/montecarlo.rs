//! Monte-Carlo simulation of the end-to-end SINR.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use rayon::prelude::*;

use super::rng::SampleRng;
use crate::error::{Error, Result};
use crate::model::{derive_hop_params, Fading, HopParams, Interference, InterfererPopulation, NetworkConfig, SystemModel};

/// Relay amplification rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainModel {
    /// `G² = P_R / (P_S |h1|²)`; the model behind the closed forms.
    Hypothetical,
    /// `G² = P_R / (P_S |h1|² + σ1²)`.
    CsiAssisted,
}

/// Draws of the end-to-end SINR with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSampleSet {
    samples: Vec<f64>,
    seed: u64,
    gain_model: GainModel,
    model: SystemModel,
}

impl SinrSampleSet {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gain_model(&self) -> GainModel {
        self.gain_model
    }

    pub fn model(&self) -> SystemModel {
        self.model
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// The draws in increasing order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut s = self.samples.clone();
        s.par_sort_unstable_by(f64::total_cmp);
        s
    }
}

enum Draw {
    Exp(Exp<f64>),
    Gamma(Gamma<f64>),
}

impl Draw {
    fn sample(&self, rng: &mut SampleRng) -> f64 {
        match self {
            Self::Exp(d) => d.sample(rng),
            Self::Gamma(d) => d.sample(rng),
        }
    }
}

fn exp_with_mean(mean: f64) -> Result<Exp<f64>> {
    Exp::new(1.0 / mean).map_err(|e| Error::InvalidConfig(format!("exponential mean {mean}: {e}")))
}

fn interferer_draws(pop: &InterfererPopulation) -> Result<Vec<Draw>> {
    pop.mean_inrs()
        .iter()
        .map(|&mean| match pop.fading() {
            Fading::Rayleigh => exp_with_mean(mean).map(Draw::Exp),
            Fading::Nakagami { m } => Gamma::new(m, mean / m)
                .map(Draw::Gamma)
                .map_err(|e| Error::InvalidConfig(format!("Nakagami interferer: {e}"))),
        })
        .collect()
}

/// SINR draws for a configuration; see [`sample_sinr_with_hops`].
pub fn sample_sinr(
    config: &NetworkConfig,
    interference: &Interference,
    gain_model: GainModel,
    n: usize,
    seed: u64,
) -> Result<SinrSampleSet> {
    let hops = derive_hop_params(config)?;
    sample_sinr_with_hops(&hops, config.model(), interference, gain_model, n, seed)
}

/// Draws `n` end-to-end SINRs. Sample `i` is a function of `(seed, i)`
/// alone, so the set does not depend on the thread count.
///
/// With `γ1, γ2` the hop SNRs and `I1, I2` the aggregate INRs at relay and
/// destination:
///
/// * hypothetical gain: `γ1γ2 / (γ1 + γ2 + γ2 I1 + γ1 I2)`;
/// * CSI-assisted gain: `γ1γ2 / (γ1 + γ2 + γ2 I1 + γ1 I2 + I2 + 1)`.
pub fn sample_sinr_with_hops(
    hops: &HopParams,
    model: SystemModel,
    interference: &Interference,
    gain_model: GainModel,
    n: usize,
    seed: u64,
) -> Result<SinrSampleSet> {
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    interference.check_model(model)?;
    let hop1 = exp_with_mean(hops.lambda1)?;
    let hop2 = exp_with_mean(hops.lambda2)?;
    let relay = interferer_draws(&interference.relay)?;
    let dest = interferer_draws(&interference.destination)?;

    let samples = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::new(seed, i);
            let g1: f64 = hop1.sample(&mut rng);
            let g2: f64 = hop2.sample(&mut rng);
            let i1: f64 = relay.iter().map(|d| d.sample(&mut rng)).sum();
            let i2: f64 = dest.iter().map(|d| d.sample(&mut rng)).sum();
            let base = g1 + g2 + g2 * i1 + g1 * i2;
            let den = match gain_model {
                GainModel::Hypothetical => base,
                GainModel::CsiAssisted => base + i2 + 1.0,
            };
            g1 * g2 / den
        })
        .collect();
    Ok(SinrSampleSet {
        samples,
        seed,
        gain_model,
        model,
    })
}

/// Draws of `1 + Σ E_l`, `E_l ~ Exp(means[l])`, keyed like the SINR draws.
pub fn sample_shifted_sum(means: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
    let draws: Vec<Exp<f64>> = means.iter().map(|&m| exp_with_mean(m)).collect::<Result<_>>()?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::new(seed, i);
            1.0 + draws.iter().map(|d| rng.sample(d)).sum::<f64>()
        })
        .collect())
}

/// Estimates on a grid with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Number of draws at each grid point: `values[i] * n` for a CDF.
    pub counts: Vec<u64>,
    pub n: u64,
}

/// `P̂(SINR <= x)` on `grid`, with `√(p̂(1-p̂)/n)` errors.
pub fn empirical_cdf(samples: &SinrSampleSet, grid: &[f64]) -> Result<EmpiricalCurve> {
    empirical_cdf_sorted(&samples.sorted(), grid)
}

/// As [`empirical_cdf`] on draws already sorted increasingly.
pub fn empirical_cdf_sorted(sorted: &[f64], grid: &[f64]) -> Result<EmpiricalCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty evaluation grid".into()));
    }
    if sorted.is_empty() {
        return Err(Error::InvalidConfig("no samples".into()));
    }
    let n = sorted.len() as u64;
    let nf = n as f64;
    let counts: Vec<u64> = grid
        .iter()
        .map(|&x| sorted.partition_point(|&s| s <= x) as u64)
        .collect();
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let stderr = values.iter().map(|&p| (p * (1.0 - p) / nf).sqrt()).collect();
    Ok(EmpiricalCurve {
        grid: grid.to_vec(),
        values,
        stderr,
        counts,
        n,
    })
}

/// Histogram density on the bins delimited by increasing `edges`; the grid
/// holds the bin centres.
pub fn empirical_pdf(samples: &SinrSampleSet, edges: &[f64]) -> Result<EmpiricalCurve> {
    if edges.len() < 2 {
        return Err(Error::InvalidConfig("need at least one bin".into()));
    }
    if edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("bin edges must increase".into()));
    }
    let sorted = samples.sorted();
    let n = sorted.len() as u64;
    let nf = n as f64;
    let below = |x: f64| sorted.partition_point(|&s| s < x) as u64;
    let mut grid = Vec::with_capacity(edges.len() - 1);
    let mut values = Vec::with_capacity(edges.len() - 1);
    let mut stderr = Vec::with_capacity(edges.len() - 1);
    let mut counts = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let c = below(w[1]) - below(w[0]);
        let width = w[1] - w[0];
        let p = c as f64 / nf;
        grid.push(0.5 * (w[0] + w[1]));
        values.push(p / width);
        stderr.push((p * (1.0 - p) / nf).sqrt() / width);
        counts.push(c);
    }
    Ok(EmpiricalCurve {
        grid,
        values,
        stderr,
        counts,
        n,
    })
}

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
