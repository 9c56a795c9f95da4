mod common;

use common::meijer_vs_contour;
use proptest::prelude::*;
use relay_sinr::specfun::{digamma, meijer_g_frac_norm, meijer_g_ln_norm, psi_k};

#[test]
fn both_families_match_the_contour_integral() {
    let worst = meijer_vs_contour(50, 50);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn digamma_at_ten_and_a_half() {
    // ψ(10.5) = ψ(1/2) + Σ_{k=0}^{9} 1/(k + 1/2)
    let psi_half = -0.577_215_664_901_532_9 - 2.0 * std::f64::consts::LN_2;
    let exact = psi_half + (0..10).map(|k| 1.0 / (k as f64 + 0.5)).sum::<f64>();
    assert!((digamma(10.5).unwrap() - exact).abs() < 1e-13 * exact);
}

#[test]
fn psi_k_is_increasing() {
    for k in 0..200 {
        assert!(psi_k(k + 1) > psi_k(k));
    }
}

proptest! {
    #[test]
    fn ln_family_increases_in_both_arguments(a in 1.0..30.0f64, y in 1e-3..1e3f64) {
        let g = meijer_g_ln_norm(a, y).unwrap();
        prop_assert!(meijer_g_ln_norm(a, y * 1.01).unwrap() > g);
        prop_assert!(meijer_g_ln_norm(a + 0.5, y).unwrap() > g);
    }

    #[test]
    fn frac_family_is_y_times_the_ln_derivative(a in 1.0..30.0f64, y in 1e-2..1e2f64) {
        let h = 1e-4 * y;
        let d = (meijer_g_ln_norm(a, y + h).unwrap() - meijer_g_ln_norm(a, y - h).unwrap()) / (2.0 * h);
        let f = meijer_g_frac_norm(a, y).unwrap();
        prop_assert!((y * d - f).abs() <= 1e-6 * f, "{} vs {}", y * d, f);
    }

    #[test]
    fn frac_family_is_a_probability(a in 0.1..200.0f64, y in 0.0..1e6f64) {
        let f = meijer_g_frac_norm(a, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }
}
