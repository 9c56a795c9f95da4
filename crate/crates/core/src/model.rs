//! Physical configuration of the relay link and the quantities derived from it.
//!
//! Everything here is linear. A mean SNR of 20 dB is passed around as `100.0`.

use crate::error::{Error, Result};

/// Where the interference is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemModel {
    /// Interferers at the relay only.
    Sm1,
    /// Interferers at both the relay and the destination.
    Sm2,
}

/// Transmit powers, noise levels and mean channel gains of the two hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    total_power: f64,
    power_share: f64,
    noise_relay: f64,
    noise_dest: f64,
    gain_hop1: f64,
    gain_hop2: f64,
    model: SystemModel,
}

/// Share of the total power given to the relay when none is specified.
pub const EQUAL_POWER_SHARE: f64 = 0.5;

impl NetworkConfig {
    pub fn new(
        total_power: f64,
        power_share: f64,
        noise_relay: f64,
        noise_dest: f64,
        gain_hop1: f64,
        gain_hop2: f64,
        model: SystemModel,
    ) -> Result<Self> {
        let positive = [
            ("total_power", total_power),
            ("noise_relay", noise_relay),
            ("noise_dest", noise_dest),
            ("gain_hop1", gain_hop1),
            ("gain_hop2", gain_hop2),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !(power_share > 0.0 && power_share <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "power share must lie in (0, 1], got {power_share}"
            )));
        }
        Ok(Self {
            total_power,
            power_share,
            noise_relay,
            noise_dest,
            gain_hop1,
            gain_hop2,
            model,
        })
    }

    /// Unit gains, a common noise power and an even power split.
    pub fn with_equal_share(total_power: f64, noise: f64, model: SystemModel) -> Result<Self> {
        Self::new(total_power, EQUAL_POWER_SHARE, noise, noise, 1.0, 1.0, model)
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn power_share(&self) -> f64 {
        self.power_share
    }

    pub fn noise_relay(&self) -> f64 {
        self.noise_relay
    }

    pub fn noise_dest(&self) -> f64 {
        self.noise_dest
    }

    pub fn gains(&self) -> (f64, f64) {
        (self.gain_hop1, self.gain_hop2)
    }

    pub fn model(&self) -> SystemModel {
        self.model
    }

    /// Source transmit power `(1 - ζ) P_tot`.
    pub fn source_power(&self) -> f64 {
        (1.0 - self.power_share) * self.total_power
    }

    /// Relay transmit power `ζ P_tot`.
    pub fn relay_power(&self) -> f64 {
        self.power_share * self.total_power
    }
}

/// Mean SNRs of the source-relay and relay-destination hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl HopParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, value) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(Self { lambda1, lambda2 })
    }
}

/// Mean hop SNRs `λ1 = P_S Ω1 / σ1²` and `λ2 = P_R Ω2 / σ2²`.
///
/// Fails when a hop ends up with no power, e.g. `ζ = 1` leaves the source silent.
pub fn derive_hop_params(config: &NetworkConfig) -> Result<HopParams> {
    let lambda1 = config.source_power() * config.gain_hop1 / config.noise_relay;
    let lambda2 = config.relay_power() * config.gain_hop2 / config.noise_dest;
    HopParams::new(lambda1, lambda2)
}

/// Fading law of the interfering channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    Rayleigh,
    /// Nakagami-m with shape `m`; `m = 1` is Rayleigh.
    Nakagami { m: f64 },
}

/// Interferers seen by one receiving node.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererPopulation {
    mean_inrs: Vec<f64>,
    fading: Fading,
}

impl InterfererPopulation {
    pub fn new(mean_inrs: Vec<f64>, fading: Fading) -> Result<Self> {
        if let Some(bad) = mean_inrs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "mean INRs must be positive and finite, got {bad}"
            )));
        }
        if let Fading::Nakagami { m } = fading {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "Nakagami shape must be positive, got {m}"
                )));
            }
        }
        Ok(Self { mean_inrs, fading })
    }

    pub fn rayleigh(mean_inrs: Vec<f64>) -> Result<Self> {
        Self::new(mean_inrs, Fading::Rayleigh)
    }

    /// `count` interferers sharing the same mean INR.
    pub fn iid(count: usize, mean_inr: f64, fading: Fading) -> Result<Self> {
        Self::new(vec![mean_inr; count], fading)
    }

    pub fn empty() -> Self {
        Self {
            mean_inrs: Vec::new(),
            fading: Fading::Rayleigh,
        }
    }

    pub fn mean_inrs(&self) -> &[f64] {
        &self.mean_inrs
    }

    pub fn fading(&self) -> Fading {
        self.fading
    }

    pub fn len(&self) -> usize {
        self.mean_inrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_inrs.is_empty()
    }

    /// The common mean INR when every interferer has the same one.
    pub fn common_mean(&self) -> Option<f64> {
        let first = *self.mean_inrs.first()?;
        self.mean_inrs
            .iter()
            .all(|x| (x - first).abs() <= 1e-12 * first)
            .then_some(first)
    }
}

/// Interference at the two receiving nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Interference {
    pub relay: InterfererPopulation,
    pub destination: InterfererPopulation,
}

impl Interference {
    pub fn relay_only(relay: InterfererPopulation) -> Self {
        Self {
            relay,
            destination: InterfererPopulation::empty(),
        }
    }

    pub fn none() -> Self {
        Self::relay_only(InterfererPopulation::empty())
    }

    /// Checks that the populations fit the system model.
    pub fn check_model(&self, model: SystemModel) -> Result<()> {
        if model == SystemModel::Sm1 && !self.destination.is_empty() {
            return Err(Error::InvalidConfig(
                "system model 1 has no interferers at the destination".into(),
            ));
        }
        Ok(())
    }
}

/// Coding factor, hop count and spectral efficiency defining the outage threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub rho: f64,
    pub hops: u32,
    pub rate: f64,
}

impl ThresholdSpec {
    pub fn new(rho: f64, hops: u32, rate: f64) -> Result<Self> {
        if !(1.0..=6.4).contains(&rho) {
            return Err(Error::InvalidConfig(format!(
                "coding factor must lie in [1, 6.4], got {rho}"
            )));
        }
        if hops == 0 {
            return Err(Error::InvalidConfig("hop count must be positive".into()));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rate must be non-negative, got {rate}"
            )));
        }
        Ok(Self { rho, hops, rate })
    }

    /// A zero rate gives a zero threshold, so outage is impossible.
    pub fn is_degenerate(&self) -> bool {
        self.rate == 0.0
    }
}

impl Default for ThresholdSpec {
    /// Two hops at 1 bit/s/Hz without coding loss: `γ_th = 3`.
    fn default() -> Self {
        Self {
            rho: 1.0,
            hops: 2,
            rate: 1.0,
        }
    }
}

/// SINR threshold `ρ (2^{M R} - 1)`.
pub fn outage_threshold(spec: &ThresholdSpec) -> f64 {
    spec.rho * (f64::from(spec.hops) * spec.rate * std::f64::consts::LN_2).exp_m1()
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(crate::error::domain("linear_to_db", x));
    }
    Ok(10.0 * x.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(total: f64, share: f64, gain1: f64, noise1: f64) -> NetworkConfig {
        NetworkConfig::new(total, share, noise1, 1.0, gain1, 1.0, SystemModel::Sm2).unwrap()
    }

    #[test]
    fn equal_share_gives_twenty_db_per_hop() {
        let hops = derive_hop_params(&config(200.0, 0.5, 1.0, 1.0)).unwrap();
        assert_eq!(hops.lambda1, 100.0);
        assert_eq!(hops.lambda2, 100.0);
    }

    #[test]
    fn full_relay_share_silences_the_source() {
        let err = derive_hop_params(&config(200.0, 1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn gain_and_noise_enter_the_first_hop() {
        let hops = derive_hop_params(&config(2.0, 0.5, 2.0, 4.0)).unwrap();
        assert_eq!(hops.lambda1, 0.5);
    }

    #[test]
    fn powers_sum_to_total() {
        let c = config(7.3, 0.31, 1.0, 1.0);
        assert!((c.source_power() + c.relay_power() - 7.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_share_and_powers() {
        assert!(NetworkConfig::new(1.0, 0.0, 1.0, 1.0, 1.0, 1.0, SystemModel::Sm1).is_err());
        assert!(NetworkConfig::new(1.0, 1.2, 1.0, 1.0, 1.0, 1.0, SystemModel::Sm1).is_err());
        assert!(NetworkConfig::new(-1.0, 0.5, 1.0, 1.0, 1.0, 1.0, SystemModel::Sm1).is_err());
        assert!(NetworkConfig::new(1.0, 0.5, 0.0, 1.0, 1.0, 1.0, SystemModel::Sm1).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(outage_threshold(&ThresholdSpec::default()), 3.0);
        let zero = ThresholdSpec::new(1.0, 1, 0.0).unwrap();
        assert_eq!(outage_threshold(&zero), 0.0);
        assert!(zero.is_degenerate());
        let coded = ThresholdSpec::new(2.0, 2, 1.0).unwrap();
        assert!((outage_threshold(&coded) - 6.0).abs() < 1e-15);
        assert!(ThresholdSpec::new(0.5, 2, 1.0).is_err());
        assert!(ThresholdSpec::new(1.0, 0, 1.0).is_err());
    }

    #[test]
    fn decibels() {
        assert!((db_to_linear(3.0) - 1.9953).abs() < 1e-4);
        assert_eq!(db_to_linear(0.0), 1.0);
        let back = linear_to_db(db_to_linear(77.0)).unwrap();
        assert!((back - 77.0).abs() <= 1e-12 * 77.0);
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-3.0).is_err());
    }

    #[test]
    fn sm1_rejects_destination_interferers() {
        let pop = InterfererPopulation::iid(2, 1.0, Fading::Rayleigh).unwrap();
        let both = Interference {
            relay: pop.clone(),
            destination: pop,
        };
        assert!(both.check_model(SystemModel::Sm1).is_err());
        assert!(both.check_model(SystemModel::Sm2).is_ok());
    }

    #[test]
    fn population_validation() {
        assert!(InterfererPopulation::rayleigh(vec![1.0, 0.0]).is_err());
        assert!(InterfererPopulation::new(vec![1.0], Fading::Nakagami { m: 0.0 }).is_err());
        let p = InterfererPopulation::iid(3, 2.0, Fading::Rayleigh).unwrap();
        assert_eq!(p.common_mean(), Some(2.0));
        let q = InterfererPopulation::rayleigh(vec![2.0, 3.0]).unwrap();
        assert_eq!(q.common_mean(), None);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hop_params_are_homogeneous_in_power_and_noise(
                total in 1e-3f64..1e6,
                share in 0.01f64..0.99,
                noise1 in 1e-3f64..1e3,
                noise2 in 1e-3f64..1e3,
                scale in 1e-3f64..1e3,
            ) {
                let a = NetworkConfig::new(total, share, noise1, noise2, 1.0, 1.0, SystemModel::Sm2).unwrap();
                let b = NetworkConfig::new(total * scale, share, noise1 * scale, noise2 * scale, 1.0, 1.0, SystemModel::Sm2).unwrap();
                let ha = derive_hop_params(&a).unwrap();
                let hb = derive_hop_params(&b).unwrap();
                prop_assert!((ha.lambda1 - hb.lambda1).abs() <= 1e-12 * ha.lambda1);
                prop_assert!((ha.lambda2 - hb.lambda2).abs() <= 1e-12 * ha.lambda2);
            }

            #[test]
            fn decibel_round_trip(x in -200.0f64..200.0) {
                let back = linear_to_db(db_to_linear(x)).unwrap();
                prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }
}
