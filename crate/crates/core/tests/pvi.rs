use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use taulab::pvi::*;
use taulab::C64;

fn all_params() -> Vec<PviParams> {
    let mut v = vec![PviParams::reference()];
    v.extend(random_params(11, 5));
    v
}

#[test]
fn recurrence_residuals() {
    for p in all_params() {
        let s = LaurentSeries::new(&p.system(), 20).unwrap();
        for n in 1..=20 {
            assert!(s.recurrence_residual(n) < 1e-12);
        }
    }
}

#[test]
fn coefficient_growth_plateaus() {
    for p in all_params() {
        let s = LaurentSeries::new(&p.system(), 200).unwrap();
        let roots: Vec<f64> = s
            .norms()
            .iter()
            .enumerate()
            .skip(100)
            .map(|(n, v)| v.powf(1.0 / n as f64))
            .collect();
        let lo = roots.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = roots.iter().cloned().fold(0.0, f64::max);
        assert!(hi < 1.1 * s.radius() && hi - lo < 0.05, "{lo} {hi}");
    }
}

#[test]
fn ode_residual_at_large_x() {
    for p in all_params() {
        let s = LaurentSeries::new(&p.system(), 40).unwrap();
        let x = 5.0 * p.t.abs() + 10.0;
        let phi0 = V2::new(C64::new(0.6, 0.0), C64::new(-0.8, 0.0));
        let r = s.ode_residual(x, &phi0, 40).unwrap();
        assert!(r < 1e-8, "{r}");
        // truncation-dominated point for the geometric decrease in M
        let xm = 2.0 * s.radius() + 1.0;
        let r20 = s.ode_residual(xm, &phi0, 20).unwrap();
        let r10 = s.ode_residual(xm, &phi0, 10).unwrap();
        assert!(r20 / r10 < 1e-3, "{r10} -> {r20}");
        assert!(s.phi(C64::new(x, 0.0), &phi0).is_ok());
        assert!(s.phi(C64::new(0.9, 0.0), &phi0).is_err());
    }
}

#[test]
fn growth_envelope() {
    for p in all_params() {
        let s = LaurentSeries::new(&p.system(), 40).unwrap();
        let a = eigenvalues2(&s.w_inf)[0].re;
        let phi0 = V2::new(C64::new(0.6, 0.0), C64::new(-0.8, 0.0));
        let n = |x: f64| s.phi(C64::new(x, 0.0), &phi0).unwrap().norm().ln();
        let (x1, x2) = (1e4, 1e6);
        let slope = (n(x2) - n(x1)) / (x2.ln() - x1.ln());
        assert!((slope - a).abs() < 0.05, "slope {slope} vs {a}");
    }
}

#[test]
fn schlesinger_identity() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for p in all_params() {
        let sys = p.system();
        let ls: Vec<C64> = (0..20)
            .map(|_| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        assert!(schlesinger_residual(&sys, &ls) < 1e-12);
        let f = |l: f64| {
            let m = schlesinger_lhs(&sys, C64::new(l, 0.0));
            m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().ln()
        };
        let slope = (f(1e6) - f(1e3)) / (1e6f64.ln() - 1e3f64.ln());
        assert!((slope + 2.0).abs() < 0.05, "{slope}");
    }
}

#[test]
fn jw_factorization_random() {
    let sig = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    for p in all_params() {
        for (i, w) in p.system().w.iter().enumerate() {
            let m = jw(w).unwrap();
            let v = jw_factor(&m).unwrap();
            assert!((v.transpose() * sig * v - m).norm() < 1e-12);
            assert!((m.determinant() + p.theta[i].powi(2) / 4.0).abs() < 1e-12);
        }
    }
}

#[test]
fn factorized_kernel() {
    let grid = PviKernel::factor_grid().unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for p in all_params() {
        let kern = PviKernel::new(&p.system(), p.t + 1.0).unwrap();
        let mut pairs = vec![(p.t + 1.0, p.t + 2.0)];
        if p != PviParams::reference() {
            pairs = (0..10)
                .map(|_| (p.t + rng.gen_range(1.0..4.0), p.t + rng.gen_range(1.0..4.0)))
                .collect();
        }
        for (l, m) in pairs {
            let a = kern.k(l, m).unwrap();
            let b = kern.k_factorized(l, m, &grid).unwrap();
            assert!((a - b).abs() < 1e-6 * a.abs().max(1e-3), "({l}, {m}): {a} vs {b}");
        }
    }
}

#[test]
fn confluent_diagonal_is_the_limit() {
    let p = PviParams::reference();
    let kern = PviKernel::new(&p.system(), p.t + 1.0).unwrap();
    let l = 2.0;
    let d = kern.k(l, l).unwrap();
    let near = kern.k(l, l + 1e-6).unwrap();
    assert!((d - near).abs() < 1e-5 * d.abs().max(1.0));
    let grid = PviKernel::factor_grid().unwrap();
    assert!((d - kern.k_factorized(l, l, &grid).unwrap()).abs() < 1e-6);
}

#[test]
fn bounded_solution_hypothesis() {
    for p in all_params() {
        let kern = PviKernel::new(&p.system(), p.t + 1.0).unwrap();
        let parts = kern.l2_partials(p.t + 1.0, 40).unwrap();
        let n = parts.len();
        assert!((parts[n - 1] - parts[n - 2]) < 1e-6 * parts[n - 1]);
    }
}

#[test]
fn kernel_time_derivative() {
    for p in all_params() {
        let kern = PviKernel::new(&p.system(), p.t + 1.0).unwrap();
        for (l, m) in [(p.t + 1.2, p.t + 2.5), (p.t + 3.0, p.t + 1.5)] {
            let closed = kern.dk_dt(l, m).unwrap();
            let flow = kern.dk_dt_flow(l, m).unwrap();
            let diff = kern.dk_dt_difference(l, m, 1e-4).unwrap();
            assert!((closed - flow).abs() < 1e-12 * closed.abs().max(1.0));
            assert!(
                (closed - diff).abs() < 1e-6 * closed.abs().max(1e-3),
                "{closed} vs {diff}"
            );
        }
        let grid: Vec<f64> = (0..10).map(|i| p.t + 1.0 + 0.3 * i as f64).collect();
        let mus: Vec<f64> = grid.iter().map(|x| x + 0.15).collect();
        let s = kern.dk_dt_singular_values(&grid, &mus).unwrap();
        assert!(s[0] / s[2] > 1e8, "{s:?}");
    }
}

#[test]
fn tau_grid_doubling() {
    let p = PviParams::reference();
    let kern = PviKernel::new(&p.system(), p.t + 1.0).unwrap();
    for x in [p.t + 1.0, p.t + 3.0] {
        let a = kern.tau(x, &PviKernel::tail_grid(x, 12).unwrap()).unwrap();
        let b = kern.tau(x, &PviKernel::tail_grid(x, 24).unwrap()).unwrap();
        assert!((a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-6 * a.1.abs().max(1.0));
    }
}
