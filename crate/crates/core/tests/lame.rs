use proptest::prelude::*;
use taulab::elliptic::{ellip_k, sncndn, Weierstrass};
use taulab::lame::*;
use taulab::numkit::GridPolicy;
use taulab::C64;

fn symbol() -> LameSymbol {
    LameSymbol::new(0.5, C64::new(-1.0, 0.0), 0.0, 16).unwrap()
}

fn t_grid() -> Vec<f64> {
    (0..10).map(|i| 0.1 + 0.3 * i as f64).collect()
}

#[test]
fn self_dual_modulus() {
    let k = ellip_k(0.5).unwrap();
    assert!((k - 1.854_074_68).abs() < 1e-8);
    let w = Weierstrass::new(0.5).unwrap();
    assert!((w.kk - w.kkp).abs() < 1e-14 * w.kk);
    assert!((sncndn(C64::new(0.5, 0.0), 1e-300).0.re - 0.479_425_5).abs() < 1e-7);
}

#[test]
fn wp_differential_equation() {
    for k2 in [0.2, 0.5, 0.85] {
        let w = Weierstrass::new(k2).unwrap();
        for i in 1..12 {
            let z = C64::new(0.31 * i as f64, 0.17 * (i as f64) - 0.9);
            let p = w.wp(z).unwrap();
            let dp = w.wp_prime(z).unwrap();
            let res = dp * dp - (p * p * p * 4.0 - p * w.g2 - w.g3);
            assert!(res.norm() < 1e-9 * (1.0 + p.norm().powi(3)), "k2={k2} z={z} res={res}");
        }
        for e in w.e {
            assert!((4.0 * e * e * e - w.g2 * e - w.g3).abs() < 1e-12);
        }
    }
}

#[test]
fn zeta_derivative_is_minus_wp() {
    let w = Weierstrass::new(0.3).unwrap();
    let h = 1e-3;
    let f = |z: C64| w.zeta(z).unwrap();
    for z in [C64::new(0.5, 0.3), C64::new(2.5, -1.1), C64::new(-4.0, 3.3)] {
        let d = (f(z - 2.0 * h) - f(z + 2.0 * h) + (f(z + h) - f(z - h)) * 8.0) / (12.0 * h);
        assert!((d + w.wp(z).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn sigma_and_zeta_are_odd() {
    let w = Weierstrass::new(0.6).unwrap();
    for z in [C64::new(0.4, 0.2), C64::new(3.0, 2.5), C64::new(-5.5, 0.7)] {
        assert!((w.sigma(-z) + w.sigma(z)).norm() < 1e-12 * w.sigma(z).norm().max(1.0));
        assert!((w.zeta(-z).unwrap() + w.zeta(z).unwrap()).norm() < 1e-12);
    }
    let z = C64::new(1e-6, 1e-6);
    assert!((w.sigma(z) / z - 1.0).norm() < 1e-12);
    assert!(w.zeta(C64::new(0.0, 0.0)).is_err());
}

#[test]
fn tau_matches_oracle() {
    let s = symbol();
    let (curve, m) = tau_curve(&s, &t_grid()).unwrap();
    assert!(m >= 16);
    for (t, tau_e) in curve.ts.iter().zip(&curve.taus) {
        let o = tau_oracle(&s, *t, &GridPolicy::default()).unwrap();
        assert!((tau_e - o).norm() < 1e-7, "t={t}: {tau_e} vs {o}");
    }
}

#[test]
fn truncation_plateau() {
    let s = symbol();
    for t in [0.0, 0.5] {
        let a = tau(&s.with_truncation(32), t).unwrap();
        let b = tau(&s.with_truncation(64), t).unwrap();
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn log_derivative_matches_sigma() {
    let s = symbol();
    let ts: Vec<f64> = (0..41).map(|i| 0.2 + 0.005 * i as f64).collect();
    let (curve, _) = tau_curve(&s, &ts).unwrap();
    for i in [10, 20, 30] {
        let d = curve.log_derivative(curve.ts[i]).unwrap();
        assert!((d - curve.sigmas[i]).norm() < 1e-5 * curve.sigmas[i].norm().max(1.0));
    }
}

#[test]
fn tau_tends_to_one() {
    let s = symbol();
    assert!((tau(&s, 25.0).unwrap() - 1.0).norm() < 1e-10);
}

#[test]
fn riesz_condition_is_uniform() {
    let s = symbol();
    let limit = riesz_condition_limit(&s);
    let conds: Vec<f64> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&m| riesz_bounds(&s, m).unwrap().cond())
        .collect();
    assert!(conds.windows(2).all(|w| w[1] >= w[0]));
    assert!(conds.iter().all(|&c| c < limit), "{conds:?} vs {limit}");
    let steps: Vec<f64> = conds.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn coefficients_decay() {
    let e = symbol().with_truncation(32).expansion().unwrap();
    let xi = e.scalar_xis();
    for m in 1..=32usize {
        // index of +m and -m around the centre 32
        let bound = 1.0 / m as f64;
        assert!(xi[32 + m].norm() <= bound && xi[32 - m].norm() <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn identities_for_random_parameters(k2 in 0.1f64..0.9, ar in -1.0f64..1.0, ai in -1.0f64..1.0) {
        let w = Weierstrass::new(k2).unwrap();
        let mut alpha = C64::new(ar * w.kk, ai * w.kkp);
        prop_assume!(alpha.norm() > 0.1);
        // beta is odd in alpha
        let b = beta_exponent(&w, alpha).unwrap();
        prop_assume!(b.re.abs() > 1e-6);
        if b.re < 0.0 {
            alpha = -alpha;
        }
        let s = LameSymbol::with_params(w.clone(), alpha, 0.0, 8).unwrap();
        let pa = w.wp(alpha).unwrap();
        for x in [C64::new(0.37, 0.21), C64::new(-0.8, 0.55)] {
            let lhs = s.psi(x).unwrap() * s.psi(-x).unwrap();
            let rhs = pa - w.wp(x).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
            let q = s.psi(x + 2.0 * w.kk).unwrap();
            let r = s.psi(x).unwrap() * s.monodromy();
            prop_assert!((q - r).norm() < 1e-9 * r.norm().max(1.0));
        }
    }
}
