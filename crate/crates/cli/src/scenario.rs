//! The scenario file: schema, defaults and resolution into evaluation points.
//!
//! Powers are given in dB relative to a unit noise reference. `noise` is the
//! actual noise power at both receivers, so hop SNRs and INRs are the
//! referenced powers divided by it.

use relay_sinr::analytic::{link_params, SeriesControl, SeriesMode};
use relay_sinr::model::{
    db_to_linear, outage_threshold, Fading, Interference, InterfererPopulation, NetworkConfig, SystemModel,
    ThresholdSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sm1,
    Sm2,
}

impl From<Model> for SystemModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Sm1 => SystemModel::Sm1,
            Model::Sm2 => SystemModel::Sm2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingKind {
    #[default]
    Rayleigh,
    Nakagami,
}

/// What each row reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// `P(SINR < γ_th)` with the threshold from the `threshold` block.
    #[default]
    Outage,
    /// `P(SINR <= γ)` at the `gamma` or `gamma_db` abscissa.
    Cdf,
    /// Density of the SINR at `gamma` or `gamma_db`.
    Pdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Producer {
    Analytic,
    Mc,
    Quad,
}

impl Producer {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Mc => "mc",
            Self::Quad => "quad",
        }
    }
}

/// `start, start + step, ...` up to and including `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

const MAX_GRID: usize = 1_000_000;

impl Sweep {
    fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let bad = |why: &str| CliError::Schema(format!("{field}: {why}"));
        if ![self.start, self.stop, self.step].iter().all(|v| v.is_finite()) {
            return Err(bad("sweep bounds must be finite"));
        }
        if !(self.step > 0.0) {
            return Err(bad("sweep step must be positive"));
        }
        if self.stop < self.start {
            return Err(bad("sweep stop lies below start"));
        }
        let span = (self.stop - self.start) / self.step;
        if span >= MAX_GRID as f64 {
            return Err(bad("sweep has too many points"));
        }
        let n = (span + 1e-9).floor() as usize + 1;
        // round to the decimals the bounds are written with, so 0.1 + 2 * 0.05
        // prints as 0.2
        let decimals = [self.start, self.step].iter().map(|v| decimals_of(*v)).max().unwrap_or(0);
        Ok((0..n)
            .map(|k| {
                let v = self.start + k as f64 * self.step;
                format!("{v:.decimals$}").parse().unwrap_or(v)
            })
            .collect())
    }
}

fn decimals_of(v: f64) -> usize {
    let s = format!("{v}");
    s.split_once('.').map_or(0, |(_, frac)| frac.len()).min(17)
}

/// A number or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "Value")]
pub enum Level {
    Value(f64),
    Sweep(Sweep),
}

/// One INR for every interferer, one per interferer (relay first), or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "Value")]
pub enum InrSpec {
    Value(f64),
    List(Vec<f64>),
    Sweep(Sweep),
}

impl Default for InrSpec {
    fn default() -> Self {
        Self::Value(3.0)
    }
}

/// An interferer count or a sweep over counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "Value")]
pub enum CountSpec {
    Value(u32),
    Sweep(Sweep),
}

impl Default for CountSpec {
    fn default() -> Self {
        Self::Value(0)
    }
}

fn sweep_from(v: Value) -> Result<Sweep, String> {
    serde_json::from_value(v).map_err(|e| format!("expected a sweep {{start, stop, step}}: {e}"))
}

impl TryFrom<Value> for Level {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().map(Self::Value).ok_or_else(|| "expected a number".into()),
            Value::Object(_) => sweep_from(v).map(Self::Sweep),
            other => Err(format!("expected a number or a sweep {{start, stop, step}}, got {other}")),
        }
    }
}

impl TryFrom<Value> for InrSpec {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().map(Self::Value).ok_or_else(|| "expected a number".into()),
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| format!("expected numbers in the INR list, got {x}")))
                .collect::<Result<_, _>>()
                .map(Self::List),
            Value::Object(_) => sweep_from(v).map(Self::Sweep),
            other => Err(format!("expected a number, a list or a sweep {{start, stop, step}}, got {other}")),
        }
    }
}

impl TryFrom<Value> for CountSpec {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n
                .as_u64()
                .and_then(|c| u32::try_from(c).ok())
                .map(Self::Value)
                .ok_or_else(|| format!("expected a whole interferer count, got {n}")),
            Value::Object(_) => sweep_from(v).map(Self::Sweep),
            other => Err(format!("expected a count or a sweep {{start, stop, step}}, got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(rename = "M", default = "two")]
    pub hops: u32,
    #[serde(rename = "R", default = "one")]
    pub rate: f64,
}

impl Default for Threshold {
    fn default() -> Self {
        Self {
            rho: 1.0,
            hops: 2,
            rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    #[default]
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub mode: Truncation,
}

impl Default for Series {
    fn default() -> Self {
        Self {
            k_max: default_k_max(),
            rel_tol: default_rel_tol(),
            mode: Truncation::Fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mc {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for Mc {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: default_seed(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> u32 {
    2
}
fn default_k_max() -> usize {
    100
}
fn default_rel_tol() -> f64 {
    1e-12
}
fn default_samples() -> usize {
    1_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_zeta() -> f64 {
    0.5
}
fn default_producers() -> Vec<Producer> {
    vec![Producer::Analytic]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: Model,
    #[serde(default)]
    pub fading: FadingKind,
    #[serde(default)]
    pub quantity: Quantity,
    pub total_snr_db: Level,
    #[serde(default)]
    pub inr_db: InrSpec,
    pub l1: CountSpec,
    #[serde(default)]
    pub l2: CountSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default = "one")]
    pub noise: f64,
    #[serde(default)]
    pub threshold: Threshold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_db: Option<Level>,
    #[serde(default)]
    pub series: Series,
    #[serde(default)]
    pub mc: Mc,
    #[serde(default = "default_producers")]
    pub producers: Vec<Producer>,
    /// Outage points whose reference value falls below this are dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op_floor: Option<f64>,
    /// Overrides applied on top of the other fields, one curve each; every
    /// entry needs a `label`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// The quantity on the x column, named as in the CSV unit line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    TotalSnrDb,
    InrDb,
    InterferersPerNode,
    InterferersRelay,
    InterferersDestination,
    SinrDb,
    Sinr,
}

impl Axis {
    pub fn unit(self) -> &'static str {
        match self {
            Self::TotalSnrDb => "dB_total_snr",
            Self::InrDb => "dB_inr",
            Self::InterferersPerNode => "interferers_per_node",
            Self::InterferersRelay => "interferers_relay",
            Self::InterferersDestination => "interferers_destination",
            Self::SinrDb => "dB_sinr",
            Self::Sinr => "sinr_linear",
        }
    }
}

/// One evaluation point with every swept field fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: f64,
    pub total_snr_db: f64,
    pub relay_inr_db: Vec<f64>,
    pub dest_inr_db: Vec<f64>,
    /// SINR abscissa, linear; `None` for outage rows.
    pub gamma: Option<f64>,
}

/// A scenario with its overrides applied and its grid expanded.
#[derive(Debug, Clone)]
pub struct Curve {
    pub label: Option<String>,
    pub scenario: Scenario,
    pub axis: Axis,
    pub points: Vec<Point>,
}

/// Everything a run needs: the resolved base scenario and its curves.
#[derive(Debug, Clone)]
pub struct Plan {
    pub scenario: Scenario,
    pub axis: Axis,
    pub curves: Vec<Curve>,
}

impl Curve {
    pub fn producer_tag(&self, p: Producer) -> String {
        match &self.label {
            Some(l) => format!("{}:{l}", p.tag()),
            None => p.tag().to_string(),
        }
    }

    pub fn network(&self, p: &Point) -> relay_sinr::Result<NetworkConfig> {
        self.network_at(db_to_linear(p.total_snr_db))
    }

    /// The configuration at a given linear total power.
    pub fn network_at(&self, total_power: f64) -> relay_sinr::Result<NetworkConfig> {
        let s = &self.scenario;
        NetworkConfig::new(total_power, s.zeta, s.noise, s.noise, 1.0, 1.0, s.model.into())
    }

    pub fn interference(&self, p: &Point) -> relay_sinr::Result<Interference> {
        let s = &self.scenario;
        let linear = |db: &[f64]| db.iter().map(|x| db_to_linear(*x) / s.noise).collect::<Vec<_>>();
        let fading = |m: Option<f64>| match s.fading {
            FadingKind::Rayleigh => Fading::Rayleigh,
            FadingKind::Nakagami => Fading::Nakagami { m: m.unwrap_or(1.0) },
        };
        Ok(Interference {
            relay: InterfererPopulation::new(linear(&p.relay_inr_db), fading(s.m1))?,
            destination: InterfererPopulation::new(linear(&p.dest_inr_db), fading(s.m2))?,
        })
    }

    pub fn threshold(&self) -> relay_sinr::Result<ThresholdSpec> {
        let t = &self.scenario.threshold;
        ThresholdSpec::new(t.rho, t.hops, t.rate)
    }

    pub fn series(&self) -> relay_sinr::Result<SeriesControl> {
        let s = &self.scenario.series;
        let mode = match s.mode {
            Truncation::Fixed => SeriesMode::FixedK,
            Truncation::Adaptive => SeriesMode::Adaptive,
        };
        SeriesControl::new(s.k_max, s.rel_tol, mode)
    }

    /// Linear SINR at which the point's distribution is evaluated.
    pub fn abscissa(&self, p: &Point) -> relay_sinr::Result<f64> {
        match p.gamma {
            Some(g) => Ok(g),
            None => {
                let spec = self.threshold()?;
                Ok(if spec.is_degenerate() { 0.0 } else { outage_threshold(&spec) })
            }
        }
    }
}

/// Parses scenario text with the path of the offending field and its line.
pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Schema(format!("invalid JSON: {e}")))?;
    // a manifest carries the scenario it ran
    if let Some(inner) = value.get("scenario").filter(|_| value.get("tool") == Some(&Value::from("relay-sinr"))) {
        return from_value(inner.clone(), "scenario");
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Schema(format!("{path}: {}", e.into_inner()))
    })
}

fn from_value(value: Value, context: &str) -> Result<Scenario, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Schema(format!("{context}.{path}: {}", e.into_inner()))
    })
}

/// Fills defaults that depend on other fields.
fn complete(s: &mut Scenario) {
    if s.fading == FadingKind::Nakagami {
        s.m1.get_or_insert(1.0);
        s.m2.get_or_insert(1.0);
    }
}

/// Applies the curve overrides, expands every grid and checks that each
/// point maps to a valid configuration.
pub fn resolve(mut base: Scenario) -> Result<Plan, CliError> {
    complete(&mut base);
    let overrides = std::mem::take(&mut base.curves);
    let mut curves = Vec::new();
    if overrides.is_empty() {
        curves.push(build_curve(None, base.clone())?);
    } else {
        let base_value = serde_json::to_value(&base).map_err(|e| CliError::Schema(e.to_string()))?;
        let mut labels = std::collections::BTreeSet::new();
        for (i, over) in overrides.iter().enumerate() {
            let context = format!("curves[{i}]");
            let label = match over.get("label") {
                Some(Value::String(l)) => l.clone(),
                _ => return Err(CliError::Schema(format!("{context}: needs a string label"))),
            };
            if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
                return Err(CliError::Schema(format!(
                    "{context}: label {label:?} must be non-empty without commas, quotes or newlines"
                )));
            }
            if !labels.insert(label.clone()) {
                return Err(CliError::Schema(format!("{context}: duplicate label {label:?}")));
            }
            let mut merged = base_value.clone();
            let target = merged.as_object_mut().expect("scenario serialises to an object");
            for (k, v) in over {
                match k.as_str() {
                    "label" => {}
                    "curves" | "name" | "notes" | "quantity" => {
                        return Err(CliError::Schema(format!("{context}: {k} cannot be overridden")))
                    }
                    _ => {
                        target.insert(k.clone(), v.clone());
                    }
                }
            }
            let mut s = from_value(merged, &context)?;
            complete(&mut s);
            curves.push(build_curve(Some(label), s).map_err(|e| e.within(&context))?);
        }
        base.curves = overrides;
    }
    let axis = curves[0].axis;
    if let Some(c) = curves.iter().find(|c| c.axis != axis) {
        return Err(CliError::Schema(format!(
            "curve {:?} sweeps {} while the first curve sweeps {}",
            c.label.as_deref().unwrap_or(""),
            c.axis.unit(),
            axis.unit()
        )));
    }
    Ok(Plan {
        scenario: base,
        axis,
        curves,
    })
}

fn build_curve(label: Option<String>, s: Scenario) -> Result<Curve, CliError> {
    let schema = |msg: String| CliError::Schema(msg);
    check_scalars(&s)?;
    let mut sweeps: Vec<(&str, Axis, Vec<f64>)> = Vec::new();
    if let Level::Sweep(w) = &s.total_snr_db {
        sweeps.push(("total_snr_db", Axis::TotalSnrDb, w.values("total_snr_db")?));
    }
    if let InrSpec::Sweep(w) = &s.inr_db {
        sweeps.push(("inr_db", Axis::InrDb, w.values("inr_db")?));
    }
    match (&s.l1, &s.l2) {
        (CountSpec::Sweep(a), CountSpec::Sweep(b)) => {
            if a != b {
                return Err(schema("l1, l2: sweeping both needs identical sweeps".into()));
            }
            sweeps.push(("l1, l2", Axis::InterferersPerNode, counts(a, "l1")?));
        }
        (CountSpec::Sweep(a), _) => sweeps.push(("l1", Axis::InterferersRelay, counts(a, "l1")?)),
        (_, CountSpec::Sweep(b)) => sweeps.push(("l2", Axis::InterferersDestination, counts(b, "l2")?)),
        _ => {}
    }
    let gamma_field = match (&s.gamma, &s.gamma_db) {
        (Some(_), Some(_)) => return Err(schema("gamma, gamma_db: give at most one".into())),
        (Some(g), None) => Some(("gamma", Axis::Sinr, g)),
        (None, Some(g)) => Some(("gamma_db", Axis::SinrDb, g)),
        (None, None) => None,
    };
    match (s.quantity, gamma_field) {
        (Quantity::Outage, Some((name, _, _))) => {
            return Err(schema(format!(
                "{name}: outage rows take their threshold from the threshold block"
            )))
        }
        (Quantity::Cdf | Quantity::Pdf, None) => {
            return Err(schema("quantity: cdf and pdf rows need gamma or gamma_db".into()))
        }
        _ => {}
    }
    if let Some((name, axis, Level::Sweep(w))) = gamma_field {
        sweeps.push((name, axis, w.values(name)?));
    }
    if sweeps.len() > 1 {
        let names: Vec<&str> = sweeps.iter().map(|(n, _, _)| *n).collect();
        return Err(schema(format!("only one field may sweep, found {}", names.join(" and "))));
    }
    let (axis, grid) = match sweeps.pop() {
        Some((_, axis, grid)) => (axis, grid),
        None => match gamma_field {
            Some((_, axis, Level::Value(g))) => (axis, vec![*g]),
            _ => match s.total_snr_db {
                Level::Value(v) => (Axis::TotalSnrDb, vec![v]),
                Level::Sweep(_) => unreachable!("sweeps handled above"),
            },
        },
    };

    let mut points = Vec::with_capacity(grid.len());
    for &x in &grid {
        let l1 = match (&s.l1, axis) {
            (CountSpec::Value(n), _) => *n as usize,
            _ => x as usize,
        };
        let l2 = match (&s.l2, axis) {
            (CountSpec::Value(n), _) => *n as usize,
            _ => x as usize,
        };
        let (relay_inr_db, dest_inr_db) = match &s.inr_db {
            InrSpec::Value(v) => (vec![*v; l1], vec![*v; l2]),
            InrSpec::Sweep(_) => (vec![x; l1], vec![x; l2]),
            InrSpec::List(list) => {
                if list.len() != l1 + l2 {
                    return Err(schema(format!(
                        "inr_db: list has {} entries for {} interferers",
                        list.len(),
                        l1 + l2
                    )));
                }
                (list[..l1].to_vec(), list[l1..].to_vec())
            }
        };
        let total_snr_db = match (&s.total_snr_db, axis) {
            (Level::Value(v), _) => *v,
            _ => x,
        };
        let gamma = match (gamma_field, axis) {
            (None, _) => None,
            (Some(_), Axis::Sinr) => Some(x),
            (Some(_), Axis::SinrDb) => Some(db_to_linear(x)),
            (Some((_, Axis::SinrDb, Level::Value(g))), _) => Some(db_to_linear(*g)),
            (Some((_, _, Level::Value(g))), _) => Some(*g),
            (Some(_), _) => unreachable!("a swept gamma is the axis"),
        };
        if let Some(g) = gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(schema(format!("gamma: SINR abscissa must be non-negative, got {g}")));
            }
        }
        if relay_inr_db.iter().chain(&dest_inr_db).any(|v| !v.is_finite()) || !total_snr_db.is_finite() {
            return Err(schema("powers in dB must be finite".into()));
        }
        points.push(Point {
            x,
            total_snr_db,
            relay_inr_db,
            dest_inr_db,
            gamma,
        });
    }
    let curve = Curve {
        label,
        scenario: s,
        axis,
        points,
    };
    check_points(&curve)?;
    Ok(curve)
}

fn counts(w: &Sweep, field: &str) -> Result<Vec<f64>, CliError> {
    let values = w.values(field)?;
    if values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
        return Err(CliError::Schema(format!("{field}: interferer counts must be whole numbers")));
    }
    Ok(values)
}

fn check_scalars(s: &Scenario) -> Result<(), CliError> {
    let schema = |msg: &str| Err(CliError::Schema(msg.to_string()));
    if s.producers.is_empty() {
        return schema("producers: list at least one of analytic, mc, quad");
    }
    let mut seen = s.producers.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != s.producers.len() {
        return schema("producers: duplicate entry");
    }
    if s.fading == FadingKind::Rayleigh && (s.m1.is_some() || s.m2.is_some()) {
        return schema("m1, m2: Nakagami shapes need fading \"nakagami\"");
    }
    if s.producers.contains(&Producer::Mc) && s.mc.samples == 0 {
        return schema("mc.samples: must be positive");
    }
    if let Some(f) = s.op_floor {
        if !(f > 0.0 && f < 1.0) {
            return schema("op_floor: must lie in (0, 1)");
        }
    }
    if s.quantity == Quantity::Pdf && s.model == Model::Sm2 && s.producers.contains(&Producer::Quad) {
        return schema("producers: quadrature of the density covers system model 1 only");
    }
    Ok(())
}

/// Builds every core object once so that configuration errors surface
/// before any work starts.
fn check_points(c: &Curve) -> Result<(), CliError> {
    let invalid = |e: relay_sinr::Error| CliError::Schema(e.to_string());
    c.threshold().map_err(invalid)?;
    c.series().map_err(invalid)?;
    for p in &c.points {
        let config = c.network(p).map_err(invalid)?;
        let interference = c.interference(p).map_err(invalid)?;
        link_params(&config, &interference).map_err(invalid)?;
        if c.scenario.quantity == Quantity::Pdf
            && c.scenario.producers.contains(&Producer::Quad)
            && p.gamma == Some(0.0)
        {
            return Err(CliError::Schema("gamma: quadrature of the density needs gamma > 0".into()));
        }
    }
    Ok(())
}
