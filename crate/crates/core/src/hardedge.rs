//! Bessel hard-edge symbol `phi(x) = e^{-x/2} J_nu(2 e^{-x/2})` and three
//! routes to its tau function: partition series, Hill-type determinant and
//! Nyström quadrature.

use crate::error::{invalid, Result};
use crate::expsymbol::{ExpSymbol, Partition};
use crate::numkit::linalg::{self, c, CMat, C64};
use crate::numkit::special::{factorial, rgamma, trigamma};
use crate::numkit::{half_line_grid, hankel_matrix, special, GridPolicy, Truncation};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselParams {
    pub nu: f64,
    /// Number of exponential terms kept from the Bessel series.
    pub terms: usize,
}

impl BesselParams {
    pub fn new(nu: f64, terms: usize) -> Result<Self> {
        if !(nu > -1.0) || !nu.is_finite() {
            return invalid(format!("nu must exceed -1, got {nu}"));
        }
        if terms == 0 {
            return invalid("at least one Bessel term is required");
        }
        Ok(BesselParams { nu, terms })
    }

    /// `lambda_n = (2n + nu + 1) / 2`.
    pub fn lambda(&self, n: usize) -> f64 {
        (2 * n) as f64 / 2.0 + (self.nu + 1.0) / 2.0
    }

    /// `xi_n = (-1)^n / (n! Gamma(nu + n + 1))`.
    pub fn xi(&self, n: usize) -> f64 {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * rgamma(self.nu + n as f64 + 1.0) / factorial(n)
    }
}

/// `J_nu(z)` from the ascending series, `z >= 0`.
pub fn bessel_j(nu: f64, z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powf(nu) * rgamma(nu + 1.0);
    let mut sum = term;
    for n in 1..500 {
        term *= -h * h / (n as f64 * (nu + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^{-x/2} J_nu(2 e^{-x/2})`.
pub fn bessel_phi(nu: f64, x: f64) -> f64 {
    (-0.5 * x).exp() * bessel_j(nu, 2.0 * (-0.5 * x).exp())
}

/// Truncated exponential expansion of the hard-edge symbol.
pub fn bessel_symbol(p: &BesselParams) -> Result<ExpSymbol> {
    ExpSymbol::scalar(
        (0..p.terms).map(|n| c(p.lambda(n))).collect(),
        (0..p.terms).map(|n| c(p.xi(n))).collect(),
    )
}

/// Transfer function `sum_n xi_n / (s + lambda_n)`, poles at `-lambda_n`.
pub fn transfer(p: &BesselParams, s: C64) -> C64 {
    (0..p.terms).fold(c(0.0), |acc, n| acc + p.xi(n) / (s + p.lambda(n)))
}

pub fn transfer_poles(p: &BesselParams) -> Vec<f64> {
    (0..p.terms).map(|n| -p.lambda(n)).collect()
}

/// Sign convention for the partition series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignMode {
    /// `(-1)^{|lambda|}`, from expanding `det(I - Gamma^2)` over Frobenius pairs.
    Derived,
    /// `(-1)^{l(lambda)}`, the number of parts.
    PartCount,
}

/// `sum_{|lambda| <= weight_cap} sign dim(lambda)^2 / |lambda|!^2 e^{-2 |lambda| x}` (`nu = 0`).
pub fn tau_partition_series(x: f64, weight_cap: usize, mode: SignMode) -> Result<f64> {
    let mut total = 0.0;
    for n in 0..=weight_cap {
        let mut level = 0.0;
        for lam in Partition::all_of_weight(n) {
            let r = lam.frobenius_ratio();
            let sign = match mode {
                SignMode::Derived => n % 2,
                SignMode::PartCount => lam.length() % 2,
            };
            level += if sign == 0 { r * r } else { -r * r };
        }
        total += level * (-2.0 * n as f64 * x).exp();
    }
    Ok(total)
}

/// Exact check `sum_{|lambda| = n} dim(lambda)^2 = n!`.
pub fn dimension_square_sum(n: usize) -> num_bigint::BigUint {
    Partition::all_of_weight(n)
        .iter()
        .map(|l| {
            let d = l.dimension();
            &d * &d
        })
        .sum()
}

fn shifted_xi(p: &BesselParams, x: f64, j: usize) -> f64 {
    p.xi(j) * (-2.0 * x * p.lambda(j)).exp()
}

/// Matrix of `Gamma_{phi_(x)}^2` compressed to the first `n` exponentials:
/// entries `xi~_j sum_k xi~_k / ((j + k + nu + 1)(k + m + nu + 1))`, where
/// `xi~_j = xi_j e^{-2 x lambda_j}` and the inner sum runs to convergence.
pub fn hill_matrix(p: &BesselParams, x: f64, n: usize) -> CMat {
    let cc = p.nu + 1.0;
    let mut inner: Vec<f64> = Vec::new();
    for k in 0.. {
        let v = shifted_xi(p, x, k);
        inner.push(v);
        if k > n && v.abs() < 1e-300 || k > 400 {
            break;
        }
    }
    CMat::from_fn(n, n, |j, m| {
        let s: f64 = inner
            .iter()
            .enumerate()
            .map(|(k, &xk)| xk / ((j + k) as f64 + cc) / ((k + m) as f64 + cc))
            .sum();
        c(shifted_xi(p, x, j) * s)
    })
}

/// Hill-type matrix with unweighted inner sums,
/// `(-1)^{j+m} e^{-2x(j+m+nu+1)} S_jm / (j! m! Gamma(nu+j+1) Gamma(nu+m+1))`,
/// `S_jm = (psi(j+nu+1) - psi(m+nu+1)) / (j - m)`, `S_jj = psi'(j+nu+1)`.
///
/// This represents `R_x^T R_x` rather than `R_x^2`; it is kept to quantify
/// the difference.
pub fn hill_matrix_unweighted(p: &BesselParams, x: f64, n: usize) -> Result<CMat> {
    let cc = p.nu + 1.0;
    let psi: Vec<f64> = (0..n).map(|j| special::digamma(j as f64 + cc)).collect::<Result<_>>()?;
    let tri: Vec<f64> = (0..n).map(|j| trigamma(j as f64 + cc)).collect::<Result<_>>()?;
    Ok(CMat::from_fn(n, n, |j, m| {
        let s = if j == m {
            tri[j]
        } else {
            (psi[j] - psi[m]) / (j as f64 - m as f64)
        };
        c(shifted_xi(p, x, j) * shifted_xi(p, x, m) * s)
    }))
}

/// `det(I - hill_matrix)`.
pub fn tau_hill(p: &BesselParams, x: f64, n: usize) -> Result<f64> {
    let h = hill_matrix(p, x, n);
    Ok(linalg::det(&(CMat::identity(n, n) - h), "I - Hill")?.re)
}

/// `det(I - hill_matrix_unweighted)`.
pub fn tau_hill_unweighted(p: &BesselParams, x: f64, n: usize) -> Result<f64> {
    let h = hill_matrix_unweighted(p, x, n)?;
    Ok(linalg::det(&(CMat::identity(n, n) - h), "I - Hill")?.re)
}

/// `det(I - Gamma) det(I + Gamma)` for the Hankel kernel `phi(s + u + 2x)`
/// with `phi` evaluated from the Bessel function itself.
pub fn tau_oracle(nu: f64, x: f64, policy: &GridPolicy) -> Result<f64> {
    let rate = (nu + 1.0) / 2.0;
    let amp = (-2.0 * rate * x).exp() * rgamma(nu + 1.0).abs();
    let grid = half_line_grid(&Truncation::new(rate, amp), policy)?;
    let k = hankel_matrix(|s| c(bessel_phi(nu, s + 2.0 * x)), &grid)?;
    Ok((k.det(c(-1.0))? * k.det(c(1.0))?).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn bessel_values() {
        assert_relative_eq!(bessel_j(0.0, 2.0), 0.223_890_779_141_235_67, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(0.5, 1.0), (2.0 / PI).sqrt() * 1f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn bessel_matches_integral_representation() {
        let g = crate::numkit::composite_gauss_legendre(4, 32, 0.0, PI).unwrap();
        for &z in &[0.3, 1.0, 2.0, 5.0] {
            let integral = g.integrate(|th| (z * th.sin()).cos()) / PI;
            assert_relative_eq!(bessel_j(0.0, z), integral, epsilon = 1e-14);
        }
    }

    #[test]
    fn symbol_at_origin_is_j0_of_two() {
        let s = bessel_symbol(&BesselParams::new(0.0, 30).unwrap()).unwrap();
        assert_relative_eq!(s.eval_scalar(0.0).re, bessel_j(0.0, 2.0), epsilon = 1e-15);
    }

    #[test]
    fn transfer_poles_are_half_integers() {
        let p = BesselParams::new(0.0, 4).unwrap();
        assert_eq!(transfer_poles(&p), vec![-0.5, -1.5, -2.5, -3.5]);
        let near = transfer(&p, C64::new(-0.5 + 1e-9, 0.0));
        assert!(near.norm() > 1e8);
    }

    #[test]
    fn low_weight_series() {
        let x = 0.8;
        let v = tau_partition_series(x, 2, SignMode::Derived).unwrap();
        let expected = 1.0 - (-2.0 * x).exp() + 0.5 * (-4.0 * x).exp();
        assert_relative_eq!(v, expected, epsilon = 1e-15);
    }

    #[test]
    fn dimension_squares() {
        for n in 0..9 {
            let f: num_bigint::BigUint = (1..=n as u32).map(num_bigint::BigUint::from).product();
            assert_eq!(dimension_square_sum(n), f);
        }
    }

    #[test]
    fn unweighted_hill_corner() {
        let p = BesselParams::new(0.0, 30).unwrap();
        let h = hill_matrix_unweighted(&p, 0.0, 3).unwrap();
        assert_relative_eq!(h[(0, 0)].re, PI * PI / 6.0, epsilon = 1e-14);
    }
}
