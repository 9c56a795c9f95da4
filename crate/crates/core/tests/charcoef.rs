mod common;

use common::{charcoef_oracle, ks_distance, rng};
use proptest::prelude::*;
use rand::Rng;
use relay_sinr::charcoef::{characteristic_coefficients, group_spectrum, InterferenceSpectrum, ShiftedSum};
use relay_sinr::oracle::sample_shifted_sum;

fn max_rel_gap(spectrum: &InterferenceSpectrum) -> f64 {
    let table = characteristic_coefficients(spectrum).unwrap();
    let oracle = charcoef_oracle(spectrum, 11);
    let scale = table.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for (i, row) in oracle.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            worst = worst.max((table.get(i, j + 1) - x).abs() / scale);
        }
    }
    worst
}

#[test]
fn oracle_agrees_on_two_distinct_means() {
    let s = InterferenceSpectrum::new(vec![2.0, 1.0], vec![1, 1]).unwrap();
    let o = charcoef_oracle(&s, 1);
    assert!((o[0][0] - 2.0).abs() < 1e-10);
    assert!((o[1][0] + 1.0).abs() < 1e-10);
    assert!(max_rel_gap(&s) < 1e-10);
}

#[test]
fn oracle_agrees_with_a_repeated_mean() {
    let s = group_spectrum(&[5.0, 5.0, 2.0], 1e-9).unwrap();
    assert!(max_rel_gap(&s) < 1e-9);
}

#[test]
fn oracle_agrees_on_eight_random_means() {
    let mut r = rng(8);
    let means: Vec<f64> = (0..8).map(|_| r.random_range(0.5..10.0)).collect();
    let s = group_spectrum(&means, 1e-9).unwrap();
    assert!(max_rel_gap(&s) < 1e-8, "{}", max_rel_gap(&s));
}

#[test]
fn density_matches_simulated_sum() {
    let means = [0.7, 2.5, 2.5, 6.0, 9.1];
    let law = ShiftedSum::from_means(&means).unwrap();
    let mut draws = sample_shifted_sum(&means, 1_000_000, 2024).unwrap();
    draws.sort_unstable_by(f64::total_cmp);
    let d = ks_distance(&draws, |u| law.cdf(u).unwrap());
    assert!(d < 0.002, "KS distance {d}");
}

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    // a small pool of values makes repeated means common
    let pool = prop::sample::select(vec![0.5, 1.0, 1.7, 2.0, 3.3, 5.0, 7.5, 10.0]);
    prop::collection::vec(prop_oneof![pool, 0.5..10.0f64], 1..=12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coefficients_match_the_linear_system(means in spectrum_strategy()) {
        let s = group_spectrum(&means, 1e-9).unwrap();
        prop_assume!(characteristic_coefficients(&s).is_ok());
        let gap = max_rel_gap(&s);
        prop_assert!(gap < 1e-8, "gap {gap} for {means:?}");
    }
}
