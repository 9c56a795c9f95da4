//! Evaluates a plan with its producers and writes `curves.csv` and
//! `manifest.json`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use relay_sinr::analytic::{cdf_sm2, link_params, pdf_sm2, Sm1Params};
use relay_sinr::model::db_to_linear;
use relay_sinr::oracle::{quad_cdf_sm2, quad_pdf_sm1, rng, sample_sinr, GainModel};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::scenario::{Axis, Curve, Plan, Point, Producer, Quantity};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Estimate {
    value: f64,
    stderr: Option<f64>,
}

type PointResult = Result<Estimate, String>;

/// `(curve, point)` indices.
type Slot = (usize, usize);

#[derive(Debug, Serialize)]
struct CurveSummary {
    label: Option<String>,
    producers: Vec<&'static str>,
    points: usize,
    dropped_below_floor: usize,
}

#[derive(Debug, Serialize)]
struct Failure {
    producer: String,
    x: f64,
    error: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: String,
    scenario: Value,
    seed: u64,
    rng: &'static str,
    threads: usize,
    x_unit: &'static str,
    quantity: Quantity,
    curves: Vec<CurveSummary>,
    rows: usize,
    failures: Vec<Failure>,
    wall_time_s: f64,
}

/// What a finished run produced.
#[derive(Debug)]
pub struct Report {
    pub rows: usize,
    pub failures: usize,
}

/// Runs the plan and writes its outputs under `out`. Failed points are
/// written as `nan` rows with `failed` in the error column.
pub fn execute(plan: &Plan, out: &Path, command: &str) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut results: HashMap<(usize, usize, Producer), PointResult> = HashMap::new();

    // reference values first, so the floor can prune the other producers
    let floor = |c: &Curve| c.scenario.op_floor.filter(|_| c.scenario.quantity == Quantity::Outage);
    let reference = |c: &Curve| {
        [Producer::Analytic, Producer::Quad, Producer::Mc]
            .into_iter()
            .find(|p| c.scenario.producers.contains(p))
            .expect("producers are non-empty")
    };
    let mut first = Vec::new();
    for (ci, c) in plan.curves.iter().enumerate() {
        if floor(c).is_some() {
            first.extend((0..c.points.len()).map(|pi| (ci, pi, reference(c))));
        }
    }
    compute(plan, &first, &mut results);

    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(plan.curves.len());
    for (ci, c) in plan.curves.iter().enumerate() {
        let keep: Vec<usize> = (0..c.points.len())
            .filter(|&pi| match floor(c) {
                Some(f) => !matches!(results[&(ci, pi, reference(c))], Ok(e) if e.value < f),
                None => true,
            })
            .collect();
        kept.push(keep);
    }
    let rest: Vec<(usize, usize, Producer)> = plan
        .curves
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            let keep = &kept[ci];
            c.scenario
                .producers
                .iter()
                .flat_map(move |&p| keep.iter().map(move |&pi| (ci, pi, p)))
        })
        .filter(|k| !results.contains_key(k))
        .collect();
    compute(plan, &rest, &mut results);

    let mut csv = format!("# x_unit={}\nx,producer,value,stderr\n", plan.axis.unit());
    let mut rows = 0;
    let mut failures = Vec::new();
    for (ci, c) in plan.curves.iter().enumerate() {
        for &p in &c.scenario.producers {
            let tag = c.producer_tag(p);
            for &pi in &kept[ci] {
                let x = c.points[pi].x;
                match &results[&(ci, pi, p)] {
                    Ok(e) => {
                        let stderr = e.stderr.map(|s| format!("{s:e}")).unwrap_or_default();
                        writeln!(csv, "{x},{tag},{:e},{stderr}", e.value).expect("writing to a string");
                    }
                    Err(msg) => {
                        writeln!(csv, "{x},{tag},nan,failed").expect("writing to a string");
                        failures.push(Failure {
                            producer: tag.clone(),
                            x,
                            error: msg.clone(),
                        });
                    }
                }
                rows += 1;
            }
        }
    }

    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;
    write(&out.join("curves.csv"), &csv)?;
    let report = Report {
        rows,
        failures: failures.len(),
    };
    let scenario = serde_json::to_value(&plan.scenario).map_err(|e| CliError::Io(e.to_string()))?;
    let manifest = Manifest {
        tool: "relay-sinr",
        version: env!("CARGO_PKG_VERSION"),
        core_version: relay_sinr::VERSION,
        command: command.to_string(),
        scenario,
        seed: plan.scenario.mc.seed,
        rng: rng::ALGORITHM,
        threads: rayon::current_num_threads(),
        x_unit: plan.axis.unit(),
        quantity: plan.scenario.quantity,
        curves: plan
            .curves
            .iter()
            .zip(&kept)
            .map(|(c, keep)| CurveSummary {
                label: c.label.clone(),
                producers: c.scenario.producers.iter().map(|p| p.tag()).collect(),
                points: keep.len(),
                dropped_below_floor: c.points.len() - keep.len(),
            })
            .collect(),
        rows,
        failures,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write(&out.join("manifest.json"), &(text + "\n"))?;
    Ok(report)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn compute(plan: &Plan, tasks: &[(usize, usize, Producer)], results: &mut HashMap<(usize, usize, Producer), PointResult>) {
    let direct: Vec<&(usize, usize, Producer)> = tasks.iter().filter(|t| t.2 != Producer::Mc).collect();
    let values: Vec<PointResult> = direct
        .par_iter()
        .map(|&&(ci, pi, p)| {
            let c = &plan.curves[ci];
            let point = &c.points[pi];
            match p {
                Producer::Analytic => analytic(c, point),
                Producer::Quad => quadrature(c, point),
                Producer::Mc => unreachable!("simulated separately"),
            }
            .map(|value| Estimate { value, stderr: None })
            .map_err(|e| e.to_string())
        })
        .collect();
    for (&&key, v) in direct.iter().zip(values) {
        results.insert(key, v);
    }

    let slots: Vec<Slot> = tasks.iter().filter(|t| t.2 == Producer::Mc).map(|t| (t.0, t.1)).collect();
    for (slot, v) in simulate(plan, &slots) {
        results.insert((slot.0, slot.1, Producer::Mc), v);
    }
}

fn analytic(c: &Curve, p: &Point) -> relay_sinr::Result<f64> {
    let params = link_params(&c.network(p)?, &c.interference(p)?)?;
    let ctl = c.series()?;
    let z = c.abscissa(p)?;
    match c.scenario.quantity {
        Quantity::Outage | Quantity::Cdf => cdf_sm2(z, &params, &ctl),
        Quantity::Pdf => pdf_sm2(z, &params, &ctl),
    }
}

fn quadrature(c: &Curve, p: &Point) -> relay_sinr::Result<f64> {
    let params = link_params(&c.network(p)?, &c.interference(p)?)?;
    let z = c.abscissa(p)?;
    match c.scenario.quantity {
        Quantity::Outage | Quantity::Cdf => quad_cdf_sm2(z, &params),
        // system model 1 keeps its interferers in the destination slot
        Quantity::Pdf => quad_pdf_sm1(z, &Sm1Params::new(params.lambda_x, params.lambda_y, params.destination)?),
    }
}

/// Everything a set of draws depends on except the total power.
fn sample_key(c: &Curve, p: &Point) -> String {
    let s = &c.scenario;
    format!(
        "{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}",
        s.model, s.fading, s.m1, s.m2, s.zeta, s.noise, p.relay_inr_db, p.dest_inr_db, s.mc.samples, s.mc.seed
    )
}

/// Monte-Carlo estimates.
///
/// The SINR under the hypothetical gain is homogeneous of degree one in the
/// two hop SNRs, which are proportional to the total power, while the INRs
/// do not depend on it. One set of draws at unit total power `Z₁` therefore
/// serves every total power `P` through `SINR = P Z₁`; points that differ
/// only in total power share their draws.
fn simulate(plan: &Plan, slots: &[Slot]) -> Vec<(Slot, PointResult)> {
    let mut groups: BTreeMap<String, Vec<Slot>> = BTreeMap::new();
    for &(ci, pi) in slots {
        let c = &plan.curves[ci];
        groups.entry(sample_key(c, &c.points[pi])).or_default().push((ci, pi));
    }
    let mut out = Vec::with_capacity(slots.len());
    for members in groups.values() {
        let (ci, pi) = members[0];
        let c = &plan.curves[ci];
        let draws = c
            .network_at(1.0)
            .and_then(|config| {
                let interference = c.interference(&c.points[pi])?;
                sample_sinr(&config, &interference, GainModel::Hypothetical, c.scenario.mc.samples, c.scenario.mc.seed)
            })
            .map(|set| set.sorted());
        for &(ci, pi) in members {
            let v = match &draws {
                Ok(sorted) => estimate(&plan.curves[ci], pi, sorted, plan.axis).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            out.push(((ci, pi), v));
        }
    }
    out
}

fn estimate(c: &Curve, pi: usize, sorted: &[f64], axis: Axis) -> relay_sinr::Result<Estimate> {
    let p = &c.points[pi];
    let power = db_to_linear(p.total_snr_db);
    let n = sorted.len() as f64;
    let at_or_below = |x: f64| sorted.partition_point(|&s| s <= x) as f64;
    let z = c.abscissa(p)?;
    match c.scenario.quantity {
        Quantity::Outage | Quantity::Cdf => {
            let q = at_or_below(z / power) / n;
            Ok(Estimate {
                value: q,
                stderr: Some((q * (1.0 - q) / n).sqrt()),
            })
        }
        Quantity::Pdf => {
            let (lo, hi) = bin(c, pi, axis)?;
            let below = |x: f64| sorted.partition_point(|&s| s < x) as f64;
            let q = (below(hi / power) - below(lo / power)) / n;
            let width = hi - lo;
            Ok(Estimate {
                value: q / width,
                stderr: Some((q * (1.0 - q) / n).sqrt() / width),
            })
        }
    }
}

/// Histogram bin around a density abscissa: halfway to each neighbour on a
/// SINR grid, otherwise 5% either side.
fn bin(c: &Curve, pi: usize, axis: Axis) -> relay_sinr::Result<(f64, f64)> {
    let z = c.abscissa(&c.points[pi])?;
    let on_grid = matches!(axis, Axis::Sinr | Axis::SinrDb) && c.points.len() > 1;
    if !on_grid {
        return Ok(if z > 0.0 { (0.95 * z, 1.05 * z) } else { (0.0, 0.05) });
    }
    let at = |i: usize| c.abscissa(&c.points[i]);
    let last = c.points.len() - 1;
    let lo = if pi == 0 { z - 0.5 * (at(1)? - z) } else { 0.5 * (at(pi - 1)? + z) };
    let hi = if pi == last { z + 0.5 * (z - at(last - 1)?) } else { 0.5 * (z + at(pi + 1)?) };
    Ok((lo.max(0.0), hi))
}

