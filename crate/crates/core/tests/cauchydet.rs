use proptest::prelude::*;
use taulab::cauchydet::{
    cauchy_log_det_lu, cauchy_log_det_product, fourier_coefficient, growth_check, haar_mc, heine_integral, progression,
    szego_limit, toeplitz_log_det,
};
use taulab::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_formula_matches_lu(re in 0.3f64..3.0, im in -2.0f64..2.0, k in 0.3f64..3.0, n in 1usize..=32) {
        let l = progression(C64::new(re, im), k, n);
        let a = cauchy_log_det_product(&l).unwrap();
        let b = cauchy_log_det_lu(&l).unwrap();
        prop_assert!(((a - b).exp() - 1.0).abs() < 1e-11, "{a} vs {b}");
    }

    #[test]
    fn toeplitz_equals_cauchy_and_ignores_im_beta(re in 0.3f64..3.0, im in -2.0f64..2.0, k in 0.3f64..3.0, n in 1usize..=16) {
        let t = toeplitz_log_det(n, |m| fourier_coefficient(re, k, m)).unwrap();
        let shifted = cauchy_log_det_product(&progression(C64::new(re, im), k, n)).unwrap();
        let real = cauchy_log_det_product(&progression(C64::new(re, 0.0), k, n)).unwrap();
        prop_assert!(t.is_finite());
        prop_assert!(((t - shifted).exp() - 1.0).abs() < 1e-10);
        prop_assert!(((shifted - real).exp() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn heine_integral_matches_toeplitz() {
    for n in 1..=3 {
        let t = toeplitz_log_det(n, |m| fourier_coefficient(0.7, 1.5, m)).unwrap().exp();
        let h = heine_integral(0.7, 1.5, n, 40).unwrap();
        assert!((h - t).abs() / t < 1e-10, "N = {n}: {h} vs {t}");
    }
    assert!(heine_integral(1.0, 1.0, 4, 8).is_err());
}

#[test]
fn growth_table_ends_near_cosech_limit() {
    let r = growth_check(1.0, 1.0, &[4, 8, 16, 32, 64]).unwrap();
    assert!((r.limit - 0.8509).abs() < 1e-4);
    assert_eq!(r.limit, szego_limit(1.0, 1.0));
    assert!(r.monotone);
    assert!(r.slope <= -1.0 / 3.0, "slope {}", r.slope);
    assert!(r.rows.iter().all(|row| row.root > r.limit));
    assert!(r.rows.last().unwrap().gap < 0.01);
}

#[test]
fn monte_carlo_is_seeded_and_consistent() {
    let a = haar_mc(1.0, 1.0, 2, 4000, 9).unwrap();
    let b = haar_mc(1.0, 1.0, 2, 4000, 9).unwrap();
    assert_eq!(a, b);
    let exact = toeplitz_log_det(2, |m| fourier_coefficient(1.0, 1.0, m)).unwrap().exp();
    assert!((a.mean - exact).abs() < 4.0 * a.std_error);
}
