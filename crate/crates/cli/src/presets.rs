//! Named figure scenarios at desk scale: 1-dB grids,
//! at most 10⁶ simulated draws per set, and outage points below 1e-5
//! dropped because the simulation cannot resolve them.

use serde_json::{json, Value};

use crate::error::CliError;

pub const NAMES: [&str; 8] = ["fig-b", "fig-c", "fig-d", "fig-h", "fig-i", "fig-e", "fig-f", "fig-g"];

const SAMPLES: usize = 1_000_000;
const FLOOR: f64 = 1e-5;
const SERIES_NOTE: &str = "series truncated adaptively (k_max 5000, rel_tol 1e-12); a fixed k = 100 is off by up to 1e-2 where the outage exceeds 1 - 1e-9";
const GRID_NOTE: &str = "grid in 1-dB steps";

fn sweep(start: f64, stop: f64, step: f64) -> Value {
    json!({ "start": start, "stop": stop, "step": step })
}

/// Base fields every preset shares.
fn base(name: &str) -> Value {
    json!({
        "name": name,
        "model": "sm2",
        "fading": "rayleigh",
        "inr_db": 3.0,
        "l1": 4,
        "l2": 4,
        "zeta": 0.5,
        "noise": 1.0,
        "threshold": { "rho": 1.0, "M": 2, "R": 1.0 },
        // k = 100 truncates visibly where the outage exceeds 1 - 1e-9, which
        // the low end of every total SNR sweep reaches
        "series": { "k_max": 5000, "rel_tol": 1e-12, "mode": "adaptive" },
        "mc": { "samples": SAMPLES, "seed": 1 },
        "producers": ["analytic", "mc"],
    })
}

fn merge(mut into: Value, fields: Value) -> Value {
    let target = into.as_object_mut().expect("preset base is an object");
    for (k, v) in fields.as_object().expect("preset fields are an object") {
        target.insert(k.clone(), v.clone());
    }
    into
}

/// The scenario behind a preset name, as JSON in the scenario schema.
pub fn preset(name: &str) -> Result<Value, CliError> {
    let fields = match name {
        "fig-b" => {
            let mut curves: Vec<Value> = [4, 8, 16]
                .iter()
                .map(|l| json!({ "label": format!("sm1-L{l}"), "model": "sm1", "l1": l, "l2": 0 }))
                .collect();
            curves.extend([2, 4, 8].iter().map(|l| json!({ "label": format!("sm2-L{l}+{l}"), "l1": l, "l2": l })));
            json!({
                "total_snr_db": sweep(0.0, 90.0, 1.0),
                "op_floor": FLOOR,
                "curves": curves,
                "notes": [GRID_NOTE, "a total of 4, 8 or 16 interferers: all at the relay in system model 1, split evenly in system model 2"],
            })
        }
        "fig-c" => json!({
            "total_snr_db": sweep(0.0, 90.0, 1.0),
            "op_floor": FLOOR,
            "curves": ([3, 6, 9, 12].iter().map(|i| json!({ "label": format!("inr{i}dB"), "inr_db": *i as f64 })).collect::<Vec<_>>()),
            "notes": [GRID_NOTE],
        }),
        "fig-d" => {
            let mut curves: Vec<Value> = [4, 8, 12, 16]
                .iter()
                .map(|l| json!({ "label": format!("L{l}+{l}"), "l1": l, "l2": l }))
                .collect();
            curves.push(json!({ "label": "L4+100", "l2": 100 }));
            // 10⁶ draws of 10⁴ interferers each are beyond desk scale
            for l2 in [1000, 10000] {
                curves.push(json!({ "label": format!("L4+{l2}"), "l2": l2, "producers": ["analytic"] }));
            }
            json!({
                "total_snr_db": sweep(0.0, 110.0, 1.0),
                "op_floor": FLOOR,
                "curves": curves,
                "notes": [GRID_NOTE, "curves with 1000 or more destination interferers are analytic only"],
            })
        }
        "fig-h" => json!({
            "total_snr_db": 20.0,
            "l1": sweep(1.0, 48.0, 1.0),
            "l2": sweep(1.0, 48.0, 1.0),
            "op_floor": FLOOR,
            "curves": ([20, 30, 40, 50, 60].iter().map(|p| json!({ "label": format!("snr{p}dB"), "total_snr_db": *p as f64 })).collect::<Vec<_>>()),
            "notes": ["interferers per node step by one"],
        }),
        "fig-i" => {
            let mut curves = Vec::new();
            for p in [20, 30, 40] {
                curves.push(json!({ "label": format!("snr{p}dB"), "total_snr_db": p as f64 }));
                curves.push(json!({ "label": format!("snr{p}dB-interference-limited"), "total_snr_db": p as f64, "noise": 1e-12 }));
            }
            json!({
                "total_snr_db": 20.0,
                "inr_db": sweep(-30.0, 30.0, 1.0),
                "op_floor": FLOOR,
                "curves": curves,
                "notes": [
                    GRID_NOTE,
                    "interference-limited curves suppress the noise to 1e-12 of the reference and keep every referenced power",
                ],
            })
        }
        "fig-e" => {
            let mut curves = Vec::new();
            for p in [20, 25] {
                for i in [3, 6, 9] {
                    curves.push(json!({ "label": format!("snr{p}dB-inr{i}dB"), "total_snr_db": p as f64, "inr_db": i as f64 }));
                }
            }
            json!({
                "quantity": "pdf",
                "total_snr_db": 20.0,
                "gamma": sweep(0.1, 20.0, 0.1),
                "curves": curves,
                "notes": [
                    "4 interferers at each node",
                    "the density is sampled on a linear SINR grid with step 0.1; simulated values are histogram densities over the same cells",
                ],
            })
        }
        "fig-f" => {
            let mut curves = Vec::new();
            for p in [20, 30] {
                for i in [3, 6, 9] {
                    curves.push(json!({ "label": format!("snr{p}dB-inr{i}dB"), "total_snr_db": p as f64, "inr_db": i as f64 }));
                }
            }
            json!({
                "quantity": "cdf",
                "total_snr_db": 20.0,
                "gamma_db": sweep(-10.0, 30.0, 1.0),
                "curves": curves,
                "notes": [GRID_NOTE, "4 interferers at each node"],
            })
        }
        "fig-g" => {
            let mut curves = Vec::new();
            for l in [2, 4, 8] {
                for m in [0.5, 1.0, 2.0] {
                    curves.push(json!({ "label": format!("L{l}+{l}-m{m}"), "l1": l, "l2": l, "m1": m, "m2": m }));
                }
            }
            json!({
                "fading": "nakagami",
                "total_snr_db": sweep(0.0, 90.0, 1.0),
                "op_floor": FLOOR,
                "curves": curves,
                "notes": [GRID_NOTE, "shapes m in {0.5, 1, 2} crossed with 2, 4 and 8 interferers per node"],
            })
        }
        _ => {
            return Err(CliError::UnknownPreset {
                name: name.to_string(),
                valid: NAMES.to_vec(),
            })
        }
    };
    let mut scenario = merge(base(name), fields);
    if let Some(notes) = scenario.get_mut("notes").and_then(Value::as_array_mut) {
        notes.push(json!(SERIES_NOTE));
    }
    Ok(scenario)
}

/// Applies `--mc-samples` and `--seed`. Zero samples drops the simulation.
pub fn override_mc(scenario: &mut Value, samples: Option<usize>, seed: Option<u64>) {
    let Some(obj) = scenario.as_object_mut() else { return };
    if let Some(mc) = obj.get_mut("mc").and_then(Value::as_object_mut) {
        if let Some(n) = samples.filter(|n| *n > 0) {
            mc.insert("samples".into(), json!(n));
        }
        if let Some(s) = seed {
            mc.insert("seed".into(), json!(s));
        }
    }
    if samples == Some(0) {
        let drop_mc = |v: &mut Value| {
            if let Some(list) = v.get_mut("producers").and_then(Value::as_array_mut) {
                list.retain(|p| p != "mc");
            }
        };
        drop_mc(scenario);
        if let Some(curves) = scenario.get_mut("curves").and_then(Value::as_array_mut) {
            curves.iter_mut().for_each(drop_mc);
        }
    }
}
