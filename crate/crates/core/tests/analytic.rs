mod common;

use common::{log_grid, within_wilson};
use proptest::prelude::*;
use relay_sinr::analytic::*;
use relay_sinr::model::*;
use relay_sinr::oracle::*;
use relay_sinr::quad::tanh_sinh;

const MC_N: usize = 10_000_000;

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

/// Runs the series to convergence; the default hundred terms leave a
/// remainder near `ρ^100` that is visible far in the upper tail. Even then,
/// cancellation between terms limits the absolute accuracy of `F` to about
/// 1e-11 where `1 - F` is that small, hence the slack in the properties.
fn exact() -> SeriesControl {
    SeriesControl::adaptive(20_000, 1e-13).unwrap()
}

fn sorted_sinr(lambda1: f64, lambda2: f64, interference: Interference, model: SystemModel, seed: u64) -> Vec<f64> {
    let hops = HopParams::new(lambda1, lambda2).unwrap();
    sample_sinr_with_hops(&hops, model, &interference, GainModel::Hypothetical, MC_N, seed)
        .unwrap()
        .sorted()
}

/// Past this point the survival function is below `e^{-25}`: with
/// `U, V >= 1` it never exceeds `exp(-z (1/λx + 1/λy))`.
fn beyond_support(lambda_x: f64, lambda_y: f64) -> f64 {
    25.0 / (1.0 / lambda_x + 1.0 / lambda_y)
}

fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

// -- SM1 -----------------------------------------------------------------

#[test]
fn sm1_vanishes_at_the_origin() {
    let p = Sm1Params::rayleigh(100.0, 100.0, &[2.0, 3.0]).unwrap();
    assert_eq!(cdf_sm1(0.0, &p, &ctl()).unwrap(), 0.0);
}

#[test]
fn sm1_single_interferer_matches_quadrature() {
    let p = Sm1Params::rayleigh(100.0, 100.0, &[2.0]).unwrap();
    let a = cdf_sm1(3.0, &p, &ctl()).unwrap();
    let q = quad_cdf_sm1(3.0, &p).unwrap();
    assert!((a - q).abs() < 1e-8, "{a} {q}");
}

#[test]
fn sm1_four_interferers_match_simulation() {
    let inrs = vec![1.5, 2.0, 2.0, 3.0];
    let p = Sm1Params::rayleigh(100.0, 100.0, &inrs).unwrap();
    let a = cdf_sm1(3.0, &p, &ctl()).unwrap();
    let pop = InterfererPopulation::rayleigh(inrs).unwrap();
    let sorted = sorted_sinr(100.0, 100.0, Interference::relay_only(pop), SystemModel::Sm1, 1);
    assert!(within_wilson(&sorted, 3.0, a, Z99), "{a}");
}

#[test]
fn sm1_density_is_the_derivative() {
    let p = Sm1Params::rayleigh(20.0, 50.0, &[1.0, 4.0, 4.0]).unwrap();
    for w in [0.5, 3.0, 10.0] {
        let d = central_difference(|x| cdf_sm1(x, &p, &ctl()).unwrap(), w);
        let f = pdf_sm1(w, &p, &ctl()).unwrap();
        assert!((d - f).abs() <= 1e-4 * f, "w={w}: {d} vs {f}");
    }
}

#[test]
fn sm1_density_normalises() {
    let p = Sm1Params::rayleigh(20.0, 50.0, &[1.0, 4.0, 4.0]).unwrap();
    let r = tanh_sinh(|w| pdf_sm1(w, &p, &exact()).unwrap(), 0.0, beyond_support(20.0, 50.0), 1e-10).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
}

#[test]
fn sm1_density_matches_quadrature() {
    let p = Sm1Params::rayleigh(10.0, 10.0, &[2.0]).unwrap();
    let a = pdf_sm1(1.0, &p, &ctl()).unwrap();
    let q = quad_pdf_sm1(1.0, &p).unwrap();
    assert!((a - q).abs() < 1e-7, "{a} {q}");
}

// -- SM2 -----------------------------------------------------------------

#[test]
fn sm2_vanishes_at_the_origin() {
    let p = Sm2Params::rayleigh(100.0, 100.0, &[2.0], &[3.0]).unwrap();
    assert_eq!(cdf_sm2(0.0, &p, &ctl()).unwrap(), 0.0);
}

#[test]
fn sm2_with_negligible_destination_interference_is_sm1() {
    let relay = [1.0, 2.5, 6.0];
    let s2 = Sm2Params::rayleigh(30.0, 80.0, &relay, &[1e-12]).unwrap();
    // V -> 1 leaves Z = XY/(XU + Y), which is W with the hops exchanged
    let s1 = Sm1Params::rayleigh(80.0, 30.0, &relay).unwrap();
    for z in [0.3, 2.0, 8.0] {
        let a = cdf_sm2(z, &s2, &ctl()).unwrap();
        let b = cdf_sm1(z, &s1, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }
}

#[test]
fn sm2_iid_matches_simulation() {
    let p = Sm2Params::rayleigh(100.0, 100.0, &[2.0; 4], &[2.0; 4]).unwrap();
    let a = cdf_sm2(3.0, &p, &ctl()).unwrap();
    let pop = InterfererPopulation::iid(4, 2.0, Fading::Rayleigh).unwrap();
    let i = Interference {
        relay: pop.clone(),
        destination: pop,
    };
    let sorted = sorted_sinr(100.0, 100.0, i, SystemModel::Sm2, 2);
    assert!(within_wilson(&sorted, 3.0, a, Z99), "{a}");
}

#[test]
fn sm2_density_is_the_derivative_and_normalises() {
    let p = Sm2Params::rayleigh(40.0, 25.0, &[0.8, 3.0], &[2.0, 2.0, 5.0]).unwrap();
    for z in [0.5, 3.0, 10.0] {
        let d = central_difference(|x| cdf_sm2(x, &p, &ctl()).unwrap(), z);
        let f = pdf_sm2(z, &p, &ctl()).unwrap();
        assert!((d - f).abs() <= 1e-4 * f, "z={z}: {d} vs {f}");
    }
    let r = tanh_sinh(|z| pdf_sm2(z, &p, &exact()).unwrap(), 0.0, beyond_support(40.0, 25.0), 1e-10).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
}

#[test]
fn sm2_matches_quadrature_with_two_plus_two_interferers() {
    let p = Sm2Params::rayleigh(60.0, 35.0, &[1.0, 3.0], &[0.7, 2.2]).unwrap();
    for z in log_grid(0.05, 20.0, 10) {
        let a = cdf_sm2(z, &p, &ctl()).unwrap();
        let q = quad_cdf_sm2(z, &p).unwrap();
        assert!((a - q).abs() < 1e-6, "z={z}: {a} {q}");
    }
}

fn equal_share_sm2(total_db: f64, inr_db: f64, l: usize) -> Sm2Params {
    let cfg = NetworkConfig::with_equal_share(db_to_linear(total_db), 1.0, SystemModel::Sm2).unwrap();
    let hops = derive_hop_params(&cfg).unwrap();
    let inrs = vec![db_to_linear(inr_db); l];
    Sm2Params::rayleigh(hops.lambda2, hops.lambda1, &inrs, &inrs).unwrap()
}

#[test]
fn stronger_interferers_push_mass_to_low_sinr() {
    for total in [20.0, 25.0] {
        let mild = equal_share_sm2(total, 3.0, 4);
        let harsh = equal_share_sm2(total, 9.0, 4);
        for z in log_grid(0.01, 100.0, 40) {
            let a = cdf_sm2(z, &mild, &exact()).unwrap();
            let b = cdf_sm2(z, &harsh, &exact()).unwrap();
            assert!(b >= a, "λ_tot={total} dB, z={z}: {b} < {a}");
        }
    }
}

// -- i.i.d. specialisations ------------------------------------------------

#[test]
fn equal_power_iid_matches_the_general_series() {
    for (lambda, inr, l) in [(100.0, 2.0, 4), (15.0, 0.5, 1), (1000.0, 8.0, 7)] {
        let p = Sm2Params::rayleigh(lambda, lambda, &vec![inr; l], &vec![inr; l]).unwrap();
        for g in [0.0, 0.1, 1.0, 3.0, 30.0] {
            let a = cdf_sm2_iid_equal(g, lambda, inr, l as u32, &ctl()).unwrap();
            let b = cdf_sm2(g, &p, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }
}

#[test]
fn equal_power_iid_matches_simulation() {
    let a = cdf_sm2_iid_equal(3.0, 100.0, 2.0, 4, &ctl()).unwrap();
    let pop = InterfererPopulation::iid(4, 2.0, Fading::Rayleigh).unwrap();
    let i = Interference {
        relay: pop.clone(),
        destination: pop,
    };
    let sorted = sorted_sinr(100.0, 100.0, i, SystemModel::Sm2, 3);
    assert!(within_wilson(&sorted, 3.0, a, Z99), "{a}");
}

fn nakagami(m1: f64, m2: f64, l1: u32, l2: u32) -> NakagamiParams {
    NakagamiParams {
        lambda1: 120.0,
        lambda2: 45.0,
        inr1: 2.0,
        inr2: 3.5,
        m1,
        m2,
        l1,
        l2,
    }
}

#[test]
fn nakagami_one_is_rayleigh() {
    let p = nakagami(1.0, 1.0, 3, 2);
    // the relay interferers load the first hop, which is the λy side of Z
    let s = Sm2Params::rayleigh(p.lambda2, p.lambda1, &[p.inr1; 3], &[p.inr2; 2]).unwrap();
    for g in [0.0, 0.5, 3.0, 12.0] {
        let a = cdf_nakagami(g, &p, &ctl()).unwrap();
        let b = cdf_sm2(g, &s, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn integer_nakagami_is_a_sum_of_exponentials() {
    let p = nakagami(2.0, 3.0, 2, 1);
    let relay = [p.inr1 / 2.0; 4];
    let dest = [p.inr2 / 3.0; 3];
    let s = Sm2Params::rayleigh(p.lambda2, p.lambda1, &relay, &dest).unwrap();
    for g in [0.0, 0.5, 3.0, 12.0] {
        let a = cdf_nakagami(g, &p, &ctl()).unwrap();
        let b = cdf_sm2(g, &s, &ctl()).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn fractional_nakagami_matches_simulation() {
    let p = nakagami(0.7, 2.5, 3, 2);
    let a = cdf_nakagami(3.0, &p, &ctl()).unwrap();
    let i = Interference {
        relay: InterfererPopulation::iid(3, p.inr1, Fading::Nakagami { m: 0.7 }).unwrap(),
        destination: InterfererPopulation::iid(2, p.inr2, Fading::Nakagami { m: 2.5 }).unwrap(),
    };
    let sorted = sorted_sinr(p.lambda1, p.lambda2, i, SystemModel::Sm2, 4);
    assert!(within_wilson(&sorted, 3.0, a, Z99), "{a}");
}

// -- no interference -------------------------------------------------------

#[test]
fn interference_free_closed_form() {
    assert_eq!(cdf_no_interference(0.0, 100.0, 100.0).unwrap(), 0.0);
    let grid = log_grid(1e-3, 1e3, 100);
    let values: Vec<f64> = grid.iter().map(|&w| cdf_no_interference(w, 100.0, 100.0).unwrap()).collect();
    assert!(values.windows(2).all(|v| v[1] >= v[0]));
    let a = cdf_no_interference(3.0, 100.0, 100.0).unwrap();
    let sorted = sorted_sinr(100.0, 100.0, Interference::none(), SystemModel::Sm1, 5);
    assert!(within_wilson(&sorted, 3.0, a, Z99), "{a}");
}

// -- outage ------------------------------------------------------------------

fn sm2_outage(total_db: f64, l1: usize, l2: usize) -> f64 {
    let cfg = NetworkConfig::with_equal_share(db_to_linear(total_db), 1.0, SystemModel::Sm2).unwrap();
    let inr = db_to_linear(3.0);
    let i = Interference {
        relay: InterfererPopulation::iid(l1, inr, Fading::Rayleigh).unwrap(),
        destination: InterfererPopulation::iid(l2, inr, Fading::Rayleigh).unwrap(),
    };
    outage_probability(&cfg, &i, &ThresholdSpec::default(), &ctl()).unwrap()
}

#[test]
fn four_plus_four_at_fifty_db_is_near_one_in_a_thousand() {
    let op = sm2_outage(50.0, 4, 4);
    assert!((3e-4..3e-3).contains(&op), "{op}");
}

#[test]
fn ten_thousand_destination_interferers_need_about_eighty_db() {
    // the crossing of 1e-3 sits at 80.8 dB for this configuration
    assert!(sm2_outage(80.0, 4, 10_000) > 1e-3);
    assert!(sm2_outage(81.5, 4, 10_000) < 1e-3);
}

#[test]
fn overwhelming_interference_saturates_every_quantity() {
    // the series envelope is still rising at k = 5000 here, so only the
    // Laplace-transform tail bound can settle these points
    let p = Sm2Params::rayleigh(0.5, 0.5, &[2.0; 4], &[2.0; 10_000]).unwrap();
    let ctl = SeriesControl::adaptive(5000, 1e-12).unwrap();
    assert_eq!(cdf_sm2(3.0, &p, &ctl).unwrap(), 1.0);
    assert_eq!(sf_sm2(3.0, &p, &ctl).unwrap(), 0.0);
    assert_eq!(pdf_sm2(3.0, &p, &ctl).unwrap(), 0.0);
}

#[test]
fn vanishing_threshold_means_no_outage() {
    let cfg = NetworkConfig::with_equal_share(1e3, 1.0, SystemModel::Sm2).unwrap();
    let pop = InterfererPopulation::iid(4, 2.0, Fading::Rayleigh).unwrap();
    let i = Interference {
        relay: pop.clone(),
        destination: pop,
    };
    let tiny = ThresholdSpec::new(1.0, 2, 1e-12).unwrap();
    let op = outage_probability(&cfg, &i, &tiny, &ctl()).unwrap();
    assert!(op < 1e-9, "{op}");
}

// -- properties ------------------------------------------------------------

fn inrs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5..10.0f64, 1..=max_len)
}

fn snr() -> impl Strategy<Value = f64> {
    (0.0..4.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cdf_is_a_distribution(lx in snr(), ly in snr(), u in inrs(4), v in inrs(4)) {
        let p = Sm2Params::rayleigh(lx, ly, &u, &v).unwrap();
        let scale = (lx * ly).sqrt();
        let mut prev = 0.0;
        for z in log_grid(1e-3 * scale, 10.0 * scale, 15) {
            let f = cdf_sm2(z, &p, &exact()).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev - 1e-10, "z={} {} < {}", z, f, prev);
            prev = f;
        }
    }

    #[test]
    fn moving_interference_across_nodes_exchanges_the_hops(lx in snr(), ly in snr(), u in inrs(6), w in 0.01..5.0f64) {
        let w = w * (lx * ly).sqrt() / (lx + ly).sqrt();
        let s1 = Sm1Params::rayleigh(lx, ly, &u).unwrap();
        let at_dest = Sm2Params::rayleigh(lx, ly, &[], &u).unwrap();
        let at_relay = Sm2Params::rayleigh(ly, lx, &u, &[]).unwrap();
        let a = cdf_sm1(w, &s1, &ctl()).unwrap();
        let b = cdf_sm2(w, &at_dest, &ctl()).unwrap();
        let c = cdf_sm2(w, &at_relay, &ctl()).unwrap();
        prop_assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10, "{} {} {}", a, b, c);
    }

    #[test]
    fn stronger_interferer_never_helps(lx in snr(), ly in snr(), u in inrs(4), v in inrs(4), k in 0usize..8, boost in 1.05..3.0f64) {
        let p = Sm2Params::rayleigh(lx, ly, &u, &v).unwrap();
        let (mut u2, mut v2) = (u.clone(), v.clone());
        if k % 2 == 0 { let i = k / 2 % u2.len(); u2[i] *= boost } else { let i = k / 2 % v2.len(); v2[i] *= boost }
        let q = Sm2Params::rayleigh(lx, ly, &u2, &v2).unwrap();
        let scale = (lx * ly).sqrt();
        for z in log_grid(1e-2 * scale, 5.0 * scale, 8) {
            let a = cdf_sm2(z, &p, &exact()).unwrap();
            let b = cdf_sm2(z, &q, &exact()).unwrap();
            prop_assert!(b >= a - 1e-10, "z={} {} < {}", z, b, a);
        }
    }
}

#[test]
fn hypothetical_gain_bounds_the_csi_gain() {
    let hops = HopParams::new(50.0, 80.0).unwrap();
    let i = Interference {
        relay: InterfererPopulation::rayleigh(vec![1.0, 2.0]).unwrap(),
        destination: InterfererPopulation::rayleigh(vec![0.5, 3.0, 3.0]).unwrap(),
    };
    let csi = sample_sinr_with_hops(&hops, SystemModel::Sm2, &i, GainModel::CsiAssisted, 1_000_000, 6).unwrap();
    let p = Sm2Params::rayleigh(80.0, 50.0, &[1.0, 2.0], &[0.5, 3.0, 3.0]).unwrap();
    let grid = log_grid(0.01, 30.0, 25);
    let emp = empirical_cdf(&csi, &grid).unwrap();
    for (k, &z) in grid.iter().enumerate() {
        let a = cdf_sm2(z, &p, &ctl()).unwrap();
        assert!(a <= emp.values[k] + 3.0 * emp.stderr[k], "z={z}: {a} vs {}", emp.values[k]);
    }
}
