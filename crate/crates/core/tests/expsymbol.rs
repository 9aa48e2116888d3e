use proptest::prelude::*;
use taulab::acceptance::random_symbols;
use taulab::cauchydet::cauchy_det;
use taulab::expsymbol::{hankel_oracle_squared, tau_det, tau_squared_series, ExpSymbol, SeriesCaps};
use taulab::numkit::linalg::hermitian_eigenvalues;
use taulab::numkit::{composite_gauss_legendre, hankel_matrix, GridPolicy};
use taulab::C64;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn distinct(ls: &[f64], gap: f64) -> bool {
    ls.iter()
        .enumerate()
        .all(|(i, a)| ls[..i].iter().all(|b| (a - b).abs() > gap))
}

fn real_symbol() -> impl Strategy<Value = ExpSymbol> {
    prop::collection::vec((0.5f64..4.0, -1.0f64..1.0), 1..=6)
        .prop_filter("distinct exponents", |v| {
            distinct(&v.iter().map(|p| p.0).collect::<Vec<_>>(), 0.05)
        })
        .prop_map(|v| {
            ExpSymbol::scalar(v.iter().map(|p| c(p.0)).collect(), v.iter().map(|p| c(p.1)).collect()).unwrap()
        })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn self_adjoint_product_equals_gramian_tau(sym in real_symbol(), t in 0.0f64..2.0) {
        let r = sym.to_realization().unwrap();
        let rx = r.rx_matrix(t).unwrap();
        let n = sym.len();
        let id = taulab::CMat::identity(n, n);
        let minus = taulab::numkit::linalg::det(&(&id - &rx), "test").unwrap();
        let plus = taulab::numkit::linalg::det(&(&id + &rx), "test").unwrap();
        let gram = r.tau_from_gramians(t).unwrap();
        prop_assert!(rel(minus * plus, gram) < 1e-10, "{} vs {}", minus * plus, gram);
    }

    #[test]
    fn shift_acts_diagonally(sym in real_symbol(), x in 0.0f64..1.5, y in 0.0f64..1.5) {
        let r = sym.to_realization().unwrap();
        let a = r.rx_matrix(x + y).unwrap();
        let b = r.rx_matrix(y).unwrap();
        let l = sym.lambdas();
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for j in 0..l.len() {
            for k in 0..l.len() {
                let expect = (-(l[j] + l[k]) * x).exp() * b[(j, k)];
                prop_assert!((a[(j, k)] - expect).norm() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn cauchy_determinant_is_positive(
        v in prop::collection::vec((0.05f64..5.0, -5.0f64..5.0), 1..=8)
    ) {
        let ls: Vec<C64> = v.iter().map(|p| C64::new(p.0, p.1)).collect();
        let sep = ls.iter().enumerate().all(|(i, a)| ls[..i].iter().all(|b| (a - b).norm() > 1e-3));
        prop_assume!(sep);
        let d = cauchy_det(&ls).unwrap();
        prop_assert!(d > 0.0, "D_N = {d}");
    }

    #[test]
    fn hermitian_hankel_has_real_spectrum(sym in real_symbol(), t in 0.0f64..1.0) {
        let grid = composite_gauss_legendre(8, 16, 0.0, 20.0).unwrap();
        let sh = sym.shifted(t);
        let k = hankel_matrix(|s| sh.eval_scalar(s), &grid).unwrap();
        let herm = (&k.matrix - k.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(herm < 1e-12);
        let ev = nalgebra::linalg::Schur::new(k.matrix.clone()).eigenvalues().unwrap();
        prop_assert!(ev.iter().all(|z| z.im.abs() < 1e-10));
        prop_assert_eq!(hermitian_eigenvalues(&k.matrix).len(), grid.len());
    }

    #[test]
    fn plus_minus_product_is_det_of_square(sym in real_symbol(), z in 0.2f64..1.0) {
        let grid = composite_gauss_legendre(8, 16, 0.0, 20.0).unwrap();
        let k = hankel_matrix(|s| sym.eval_scalar(s), &grid).unwrap();
        let lhs = k.det(c(-z)).unwrap() * k.det(c(z)).unwrap();
        let rhs = k.squared().det(c(-z * z)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }
}

#[test]
fn full_series_matches_fredholm_oracle() {
    let policy = GridPolicy::default();
    for sym in random_symbols(11, 12, 6) {
        for t in [0.0, 0.5, 1.0] {
            let s = tau_squared_series(&sym, t, SeriesCaps::order(sym.len())).unwrap();
            let o = hankel_oracle_squared(&sym, t, &policy).unwrap();
            assert!((s - o).norm() < 1e-8, "N = {}, t = {t}: {s} vs {o}", sym.len());
        }
    }
}

#[test]
fn truncated_series_increments_shrink() {
    for sym in random_symbols(5, 20, 6) {
        let v: Vec<C64> = (0..=sym.len())
            .map(|l| tau_squared_series(&sym, 0.0, SeriesCaps::order(l)).unwrap())
            .collect();
        let inc: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        assert!(inc.windows(2).all(|w| w[1] <= w[0]), "N = {}: {inc:?}", sym.len());
    }
}

#[test]
fn grid_doubling_plateau_for_hankel_oracle() {
    for sym in random_symbols(3, 6, 6) {
        let p = GridPolicy::default();
        let a = taulab::expsymbol::hankel_oracle(&sym, 0.0, c(-1.0), &p).unwrap();
        let b = taulab::expsymbol::hankel_oracle(&sym, 0.0, c(-1.0), &p.doubled()).unwrap();
        assert!((a - b).norm() < 1e-10);
        let d = tau_det(&sym, 0.0).unwrap();
        assert!((a - d).norm() < 1e-8);
    }
}
