use taulab::expsymbol::{tau_det, tau_squared_series, SeriesCaps};
use taulab::hardedge::*;
use taulab::numkit::GridPolicy;

fn grid() -> Vec<f64> {
    (0..=10).map(|i| 0.5 + 0.25 * i as f64).collect()
}

#[test]
fn three_routes_agree() {
    let p = BesselParams::new(0.0, 30).unwrap();
    for x in grid() {
        let series = tau_partition_series(x, 10, SignMode::Derived).unwrap();
        let hill = tau_hill(&p, x, 30).unwrap();
        let oracle = tau_oracle(0.0, x, &GridPolicy::default()).unwrap();
        assert!((series - hill).abs() < 1e-7, "x={x}: series {series} hill {hill}");
        assert!((series - oracle).abs() < 1e-7, "x={x}: series {series} oracle {oracle}");
        assert!((hill - oracle).abs() < 1e-7, "x={x}: hill {hill} oracle {oracle}");
    }
}

#[test]
fn hill_equals_product_of_truncated_determinants() {
    let p = BesselParams::new(0.0, 30).unwrap();
    let s = bessel_symbol(&p).unwrap();
    for x in [1.0, 2.0] {
        let a = tau_det(&s, x).unwrap().re;
        let sym_neg =
            taulab::expsymbol::ExpSymbol::scalar(s.lambdas().to_vec(), s.scalar_xis().iter().map(|v| -v).collect())
                .unwrap();
        let b = tau_det(&sym_neg, x).unwrap().re;
        assert!((a * b - tau_hill(&p, x, 30).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn subset_series_reproduces_partition_series() {
    let p = BesselParams::new(0.0, 12).unwrap();
    let s = bessel_symbol(&p).unwrap();
    let caps = SeriesCaps {
        max_order: 4,
        max_weight: Some(10),
    };
    for x in [0.5, 1.5] {
        let a = tau_squared_series(&s, x, caps).unwrap().re;
        let b = tau_partition_series(x, 10, SignMode::Derived).unwrap();
        assert!((a - b).abs() < 1e-12, "x={x}: {a} vs {b}");
    }
}

#[test]
fn tau_increases_towards_one() {
    let xs = grid();
    let v: Vec<f64> = xs
        .iter()
        .map(|&x| tau_partition_series(x, 10, SignMode::Derived).unwrap())
        .collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!((1.0 - tau_partition_series(12.0, 10, SignMode::Derived).unwrap()) < 1e-10);
}

#[test]
fn alternative_conventions_deviate() {
    let p = BesselParams::new(0.0, 30).unwrap();
    let x = 1.0;
    let oracle = tau_oracle(0.0, x, &GridPolicy::default()).unwrap();
    let part_count_sign = tau_partition_series(x, 10, SignMode::PartCount).unwrap();
    let unweighted = tau_hill_unweighted(&p, x, 30).unwrap();
    assert!((part_count_sign - oracle).abs() > 1e-3);
    assert!((unweighted - oracle).abs() > 1e-3);
}

#[test]
fn grid_doubling_is_stable() {
    let base = GridPolicy::default();
    for x in [0.5, 2.0] {
        let a = tau_oracle(0.0, x, &base).unwrap();
        let b = tau_oracle(0.0, x, &base.doubled()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}
