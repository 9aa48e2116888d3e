//! Cauchy determinants, the Toeplitz determinants they equal on arithmetic
//! progressions, Haar Monte Carlo over U(N) and Szegő-type growth.

use crate::error::{invalid, Error, Result};
use crate::numkit::linalg::{c, CMat, Lu, C64};
use crate::numkit::{gauss_legendre, QuadGrid};
use crate::par;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::f64::consts::PI;

/// `[1 / (lambda_j + conj(lambda_k))]`.
pub fn cauchy_matrix(lambdas: &[C64]) -> CMat {
    let n = lambdas.len();
    CMat::from_fn(n, n, |j, k| c(1.0) / (lambdas[j] + lambdas[k].conj()))
}

fn check_exponents(lambdas: &[C64]) -> Result<()> {
    for (j, l) in lambdas.iter().enumerate() {
        if !(l.re > 0.0) {
            return invalid(format!("exponent {l} must have positive real part"));
        }
        for m in &lambdas[..j] {
            if (l - m).norm() <= 1e-13 * l.norm().max(1.0) {
                return Err(Error::DuplicateExponent(format!("{l}")));
            }
        }
    }
    Ok(())
}

/// `log det[1/(lambda_j + conj lambda_k)]` from the product formula.
pub fn cauchy_log_det_product(lambdas: &[C64]) -> Result<f64> {
    check_exponents(lambdas)?;
    let n = lambdas.len();
    let mut total = 0.0;
    for j in 0..n {
        total -= (2.0 * lambdas[j].re).ln();
        for k in (j + 1)..n {
            total += 2.0
                * ((lambdas[j] - lambdas[k]) / (lambdas[j] + lambdas[k].conj()))
                    .norm()
                    .ln();
        }
    }
    Ok(total)
}

/// `log det[1/(lambda_j + conj lambda_k)]` by LU.
pub fn cauchy_log_det_lu(lambdas: &[C64]) -> Result<f64> {
    check_exponents(lambdas)?;
    if lambdas.is_empty() {
        return Ok(0.0);
    }
    Ok(Lu::new(&cauchy_matrix(lambdas), "Cauchy matrix")?.log_det().re)
}

/// Cauchy determinant from the product formula.
pub fn cauchy_det(lambdas: &[C64]) -> Result<f64> {
    Ok(cauchy_log_det_product(lambdas)?.exp())
}

/// `lambda_j = (2 pi i j + beta) / (2K)` for `j = 0..n`.
pub fn progression(beta: C64, k: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| (C64::new(0.0, 2.0 * PI * j as f64) + beta) / (2.0 * k))
        .collect()
}

/// Circle symbol `f(u) = 2K exp(-2 Re(beta) u) / (1 - exp(-2 Re beta))`, `u in (0, 1)`.
pub fn circle_symbol(beta_re: f64, k: f64, u: f64) -> f64 {
    2.0 * k * (-2.0 * beta_re * u).exp() / (1.0 - (-2.0 * beta_re).exp())
}

/// Fourier coefficient `a_m = 2K / (2 Re beta + 2 pi i m)`.
pub fn fourier_coefficient(beta_re: f64, k: f64, m: i64) -> C64 {
    c(2.0 * k) / C64::new(2.0 * beta_re, 2.0 * PI * m as f64)
}

/// `a_m` by Gauss–Legendre quadrature of `f(u) exp(-2 pi i m u)`.
pub fn fourier_coefficient_quadrature(beta_re: f64, k: f64, m: i64, grid: &QuadGrid) -> C64 {
    let re = grid.integrate(|u| circle_symbol(beta_re, k, u) * (2.0 * PI * m as f64 * u).cos());
    let im = grid.integrate(|u| -circle_symbol(beta_re, k, u) * (2.0 * PI * m as f64 * u).sin());
    C64::new(re, im)
}

/// `log D_N(f)` for the Toeplitz matrix `[a_{j-k}]`.
pub fn toeplitz_log_det<F: Fn(i64) -> C64>(n: usize, coeff: F) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let a: Vec<C64> = (-(n as i64) + 1..n as i64).map(&coeff).collect();
    let m = CMat::from_fn(n, n, |j, k| a[(j as i64 - k as i64 + n as i64 - 1) as usize]);
    Ok(Lu::new(&m, "Toeplitz matrix")?.log_det().re)
}

/// `D_N` by tensor Gauss–Legendre quadrature of Heine's integral
/// `(1/N!) int prod |e^{2 pi i u_j} - e^{2 pi i u_k}|^2 prod f(u_j) du`.
pub fn heine_integral(beta_re: f64, k: f64, n: usize, nodes: usize) -> Result<f64> {
    if n > 3 {
        return invalid("tensor quadrature of the Heine integral is limited to N <= 3");
    }
    let g = gauss_legendre(nodes, 0.0, 1.0)?;
    let total = g.len().pow(n as u32);
    let terms = par::map_range(total, |idx| {
        let mut rem = idx;
        let mut us = Vec::with_capacity(n);
        let mut w = 1.0;
        for _ in 0..n {
            let i = rem % g.len();
            rem /= g.len();
            us.push(g.nodes[i]);
            w *= g.weights[i] * circle_symbol(beta_re, k, g.nodes[i]);
        }
        let mut vdm = 1.0;
        for a in 0..n {
            for b in (a + 1)..n {
                let d = C64::from_polar(1.0, 2.0 * PI * us[a]) - C64::from_polar(1.0, 2.0 * PI * us[b]);
                vdm *= d.norm_sqr();
            }
        }
        w * vdm
    });
    let sum: f64 = terms.iter().sum();
    Ok(sum / crate::numkit::special::factorial(n))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Haar-distributed unitary from the `stream`-th ChaCha stream of `seed`.
pub fn haar_unitary(n: usize, seed: u64, stream: u64) -> CMat {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut z = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im) / 2f64.sqrt()
    });
    // modified Gram-Schmidt leaves diag(R) real positive, which is the
    // normalization under which Q is Haar distributed
    for j in 0..n {
        for i in 0..j {
            let proj = (0..n).fold(c(0.0), |acc, r| acc + z[(r, i)].conj() * z[(r, j)]);
            for r in 0..n {
                let v = z[(r, i)];
                z[(r, j)] -= proj * v;
            }
        }
        let nrm = (0..n).map(|r| z[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            z[(r, j)] /= nrm;
        }
    }
    z
}

/// Eigenangles of a unitary matrix in `[0, 2 pi)`.
pub fn eigenangles(u: &CMat) -> Result<Vec<f64>> {
    let ev = u
        .clone()
        .eigenvalues()
        .ok_or_else(|| Error::Factorization("Schur decomposition did not converge".into()))?;
    Ok(ev
        .iter()
        .map(|z| {
            let a = z.arg();
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        })
        .collect())
}

/// Haar Monte Carlo estimate of `D_N`:
/// `(2K / (1 - e^{-2 Re beta}))^N E[exp(-(Re beta / pi) sum theta_j)]`.
pub fn haar_mc(beta_re: f64, k: f64, n: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 || samples < 2 {
        return invalid("Haar Monte Carlo needs N >= 1 and at least two samples");
    }
    let values: Vec<Result<f64>> = par::map_range(samples, |s| {
        let u = haar_unitary(n, seed, s as u64);
        let th = eigenangles(&u)?;
        Ok((-(beta_re / PI) * th.iter().sum::<f64>()).exp())
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let scale = (2.0 * k / (1.0 - (-2.0 * beta_re).exp())).powi(n as i32);
    Ok(McEstimate {
        mean: scale * mean,
        std_error: scale * (var / samples as f64).sqrt(),
        samples,
    })
}

/// Szegő limit `exp(int log f) = K / sinh(Re beta)`.
pub fn szego_limit(beta_re: f64, k: f64) -> f64 {
    k / beta_re.sinh()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub log_d: f64,
    pub root: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub limit: f64,
    pub rows: Vec<GrowthRow>,
    /// `max gap_N N^{1/3}`
    pub fitted_c: f64,
    /// Least-squares slope of `log gap` against `log N`.
    pub slope: f64,
    pub monotone: bool,
}

/// `D_N^{1/N}` against the Szegő limit on an arithmetic progression.
pub fn growth_check(beta_re: f64, k: f64, ns: &[usize]) -> Result<GrowthReport> {
    if !(beta_re > 0.0) || !(k > 0.0) {
        return invalid("growth check needs Re beta > 0 and K > 0");
    }
    let limit = szego_limit(beta_re, k);
    let rows = par::map_slice(ns, |&n| -> Result<GrowthRow> {
        let log_d = toeplitz_log_det(n, |m| fourier_coefficient(beta_re, k, m))?;
        let root = (log_d / n as f64).exp();
        Ok(GrowthRow {
            n,
            log_d,
            root,
            gap: (root - limit).abs(),
        })
    });
    let rows: Vec<GrowthRow> = rows.into_iter().collect::<Result<_>>()?;
    let fitted_c = rows.iter().map(|r| r.gap * (r.n as f64).cbrt()).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gap > 0.0)
        .map(|r| ((r.n as f64).ln(), r.gap.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2))
    });
    let slope = if den > 0.0 { num / den } else { f64::NAN };
    let monotone = rows.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(GrowthReport {
        limit,
        rows,
        fitted_c,
        slope,
        monotone,
    })
}

/// `sum_k 1/|lambda_j + lambda_k|^2` over the bilateral progression
/// `lambda_k = (2 pi i k + beta)/(2K)`, `|k| <= m`, plus an integral tail estimate.
pub fn lattice_sum(beta: C64, k: f64, j: i64, m: i64) -> f64 {
    let (a, b) = (beta.re, beta.im);
    let term = |s: f64| k * k / (a * a + (b + PI * s).powi(2));
    let direct: f64 = (-m..=m).map(|q| term((j + q) as f64)).sum();
    // int_{s0}^{inf} K^2 / (a^2 + (b + pi s)^2) ds
    let upper = |s0: f64| k * k / (PI * a) * (PI / 2.0 - ((b + PI * s0) / a).atan());
    let lower = |s0: f64| k * k / (PI * a) * (PI / 2.0 + ((b + PI * s0) / a).atan());
    direct + upper((j + m) as f64 + 0.5) + lower((j - m) as f64 - 0.5)
}

/// `K^2 Re coth(beta) / Re beta`.
pub fn lattice_sum_closed(beta: C64, k: f64) -> f64 {
    let coth = beta.cosh() / beta.sinh();
    k * k * coth.re / beta.re
}

/// Smallest and largest eigenvalue of the Cauchy Gram matrix and its determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramBounds {
    pub det: f64,
    pub min_eig: f64,
    pub max_eig: f64,
}

impl GramBounds {
    pub fn cond(&self) -> f64 {
        self.max_eig / self.min_eig
    }
}

pub fn gram_bounds(lambdas: &[C64]) -> Result<GramBounds> {
    check_exponents(lambdas)?;
    if lambdas.is_empty() {
        return invalid("Gram bounds need at least one exponent");
    }
    let ev = crate::numkit::linalg::hermitian_eigenvalues(&cauchy_matrix(lambdas));
    Ok(GramBounds {
        det: cauchy_det(lambdas)?,
        min_eig: ev[0],
        max_eig: ev[ev.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_cauchy() {
        let l = [c(1.0), c(2.0)];
        // 1/2 * 1/4 - 1/9
        assert_relative_eq!(cauchy_det(&l).unwrap(), 1.0 / 72.0, max_relative = 1e-14);
        assert_relative_eq!(cauchy_log_det_lu(&l).unwrap().exp(), 1.0 / 72.0, max_relative = 1e-14);
    }

    #[test]
    fn single_exponent() {
        assert_relative_eq!(
            cauchy_det(&[C64::new(0.7, 3.0)]).unwrap(),
            1.0 / 1.4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn lu_matches_product_on_progression() {
        for n in [1, 4, 16, 32] {
            let l = progression(C64::new(1.0, 0.4), 1.3, n);
            let a = cauchy_log_det_lu(&l).unwrap();
            let b = cauchy_log_det_product(&l).unwrap();
            assert!(((a - b).exp() - 1.0).abs() < 1e-11, "N = {n}");
        }
    }

    #[test]
    fn duplicate_exponent_is_rejected() {
        assert!(matches!(
            cauchy_det(&[c(1.0), c(1.0)]),
            Err(Error::DuplicateExponent(_))
        ));
    }

    #[test]
    fn quadrature_fourier_coefficients() {
        let g = crate::numkit::composite_gauss_legendre(4, 32, 0.0, 1.0).unwrap();
        for m in -3..=3 {
            let a = fourier_coefficient_quadrature(0.8, 1.1, m, &g);
            assert!((a - fourier_coefficient(0.8, 1.1, m)).norm() < 1e-14);
        }
    }

    #[test]
    fn haar_stream_reproducible() {
        let a = haar_unitary(3, 7, 11);
        let b = haar_unitary(3, 7, 11);
        assert_eq!(a, b);
        let id = a.adjoint() * &a;
        assert!((id - CMat::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn szego_limit_value() {
        assert_relative_eq!(szego_limit(1.0, 1.0), 0.850_918_128_239_321_6, epsilon = 1e-15);
    }

    #[test]
    fn lattice_sum_closed_form() {
        for beta in [C64::new(1.0, 0.0), C64::new(0.6, 0.9)] {
            for j in [0, 3, -5] {
                let s = lattice_sum(beta, 1.7, j, 10_000);
                assert_relative_eq!(s, lattice_sum_closed(beta, 1.7), max_relative = 1e-9);
            }
        }
    }
}
