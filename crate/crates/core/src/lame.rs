//! Lamé (`l = 1`) symbol `Psi(x; alpha) = -sigma(x - alpha) e^{zeta(alpha) x} / (sigma(alpha) sigma(x))`
//! sampled on the line `Im x = K'`, its bilateral exponential expansion and tau.

use crate::cauchydet::{gram_bounds, lattice_sum, lattice_sum_closed, GramBounds};
use crate::elliptic::Weierstrass;
use crate::error::{invalid, Error, Result};
use crate::expsymbol::{self, ExpSymbol};
use crate::numkit::linalg::{c, C64};
use crate::numkit::{
    composite_gauss_legendre, half_line_grid, hankel_matrix, GridPolicy, QuadGrid, TauCurve, Truncation,
};
use crate::par;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_TRUNCATION: usize = 16;
const MAX_TRUNCATION: usize = 512;

#[derive(Debug, Clone)]
pub struct LameSymbol {
    pub params: Weierstrass,
    pub alpha: C64,
    /// Real shift `t`; the symbol is `phi(x) = Psi(x + iK' + 2t)`.
    pub shift: f64,
    pub beta: C64,
    /// Bilateral truncation `M`, terms `|m| <= M`.
    pub truncation: usize,
    zeta_alpha: C64,
    ln_sigma_alpha: C64,
}

impl LameSymbol {
    pub fn new(k2: f64, alpha: C64, shift: f64, truncation: usize) -> Result<Self> {
        Self::with_params(Weierstrass::new(k2)?, alpha, shift, truncation)
    }

    pub fn with_params(params: Weierstrass, alpha: C64, shift: f64, truncation: usize) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() || !shift.is_finite() {
            return invalid("alpha and shift must be finite");
        }
        if truncation == 0 {
            return invalid("truncation M must be positive");
        }
        let zeta_alpha = params.zeta(alpha)?;
        let ln_sigma_alpha = params.ln_sigma(alpha)?;
        let beta = beta_exponent(&params, alpha)?;
        if !(beta.re > 0.0) {
            return Err(Error::NonDecaying(format!(
                "Re beta = {} <= 0 for alpha = {alpha}",
                beta.re
            )));
        }
        let s = LameSymbol {
            params,
            alpha,
            shift,
            beta,
            truncation,
            zeta_alpha,
            ln_sigma_alpha,
        };
        for i in 0..=64 {
            let x = 2.0 * s.params.kk * i as f64 / 64.0;
            let v = s.phi(x)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Pole(format!("Psi not finite at x = {x} on the shifted segment")));
            }
        }
        Ok(s)
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        LameSymbol {
            truncation,
            ..self.clone()
        }
    }

    pub fn kk(&self) -> f64 {
        self.params.kk
    }

    /// `Psi(x; alpha)` for complex `x` off the lattice.
    pub fn psi(&self, x: C64) -> Result<C64> {
        let w = &self.params;
        let l = C64::new(0.0, PI) + w.ln_sigma(x - self.alpha)? - self.ln_sigma_alpha - w.ln_sigma(x)?
            + self.zeta_alpha * x;
        Ok(l.exp())
    }

    /// `phi(x) = Psi(x + iK' + 2t)`.
    pub fn phi(&self, x: f64) -> Result<C64> {
        self.psi(C64::new(x + 2.0 * self.shift, self.params.kkp))
    }

    /// Multiplier of `Psi(x + 2K) = Psi(x) e^{2K zeta(alpha) - alpha eta}`, `eta = 2 zeta(K)`.
    pub fn monodromy(&self) -> C64 {
        (self.zeta_alpha * (2.0 * self.kk()) - self.alpha * (2.0 * self.params.eta1)).exp()
    }

    /// Exponent `lambda_m = (2 pi i m + beta) / (2K)`.
    pub fn lambda(&self, m: i64) -> C64 {
        (C64::new(0.0, 2.0 * PI * m as f64) + self.beta) / (2.0 * self.kk())
    }

    /// `h(s) = int_0^{2K} e^{-s u} phi(u) du`.
    pub fn laplace_segment(&self, s: C64) -> Result<C64> {
        let grid = self.segment_grid()?;
        let vals = self.segment_values(&grid)?;
        Ok(segment_integral(&grid, &vals, s))
    }

    fn segment_grid(&self) -> Result<QuadGrid> {
        composite_gauss_legendre(self.truncation.max(16), 20, 0.0, 2.0 * self.kk())
    }

    fn segment_values(&self, grid: &QuadGrid) -> Result<Vec<C64>> {
        par::map_slice(&grid.nodes, |&u| self.phi(u)).into_iter().collect()
    }

    /// Bilateral expansion `phi(x) = sum_{|m| <= M} xi_m e^{-lambda_m x}` with
    /// `xi_m = h(-lambda_m) / (2K)`.
    pub fn expansion(&self) -> Result<ExpSymbol> {
        let grid = self.segment_grid()?;
        let vals = self.segment_values(&grid)?;
        let m = self.truncation as i64;
        let idx: Vec<i64> = (-m..=m).collect();
        let lambdas: Vec<C64> = idx.iter().map(|&j| self.lambda(j)).collect();
        let xis: Vec<C64> = par::map_slice(&lambdas, |&l| segment_integral(&grid, &vals, -l) / (2.0 * self.kk()));
        ExpSymbol::scalar(lambdas, xis)
    }

    /// Largest reconstruction error of the expansion on `[0, 4K]`.
    pub fn reconstruction_error(&self, samples: usize) -> Result<f64> {
        let e = self.expansion()?;
        let mut worst: f64 = 0.0;
        for i in 0..=samples {
            let x = 4.0 * self.kk() * i as f64 / samples as f64;
            worst = worst.max((e.eval_scalar(x) - self.phi(x)?).norm());
        }
        Ok(worst)
    }

    /// Residual of `Psi'' = (2 wp(x) + wp(alpha)) Psi` by a 7-point stencil.
    pub fn ode_residual(&self, x: C64, h: f64) -> Result<f64> {
        let w = [2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0];
        let mut d2 = c(0.0);
        for (i, wi) in w.iter().enumerate() {
            d2 += self.psi(x + (i as f64 - 3.0) * h)? * *wi;
        }
        d2 /= 180.0 * h * h;
        let p = self.psi(x)?;
        let b = self.params.wp(self.alpha)?;
        Ok((d2 - (self.params.wp(x)? * 2.0 + b) * p).norm() / p.norm().max(1.0))
    }
}

fn segment_integral(grid: &QuadGrid, vals: &[C64], s: C64) -> C64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(vals)
        .fold(c(0.0), |acc, ((&u, &w), &v)| acc + (-s * u).exp() * v * w)
}

/// `beta = -2K zeta(alpha) + alpha (zeta(alpha + 2K) - zeta(alpha))`.
pub fn beta_exponent(w: &Weierstrass, alpha: C64) -> Result<C64> {
    let za = w.zeta(alpha)?;
    let za2 = w.zeta(alpha + 2.0 * w.kk)?;
    Ok(-za * (2.0 * w.kk) + alpha * (za2 - za))
}

/// `det(I - R_t)` from the bilateral expansion of `sym` (shift `t` added to `sym.shift`).
pub fn tau(sym: &LameSymbol, t: f64) -> Result<C64> {
    expsymbol::tau_det(&sym.expansion()?, t)
}

/// Truncation after doubling `M` from `sym.truncation` until tau at the
/// first grid point changes by less than `tol`.
pub fn auto_truncation(sym: &LameSymbol, t: f64, tol: f64) -> Result<(usize, Vec<(usize, f64)>)> {
    let mut m = sym.truncation;
    let mut prev = tau(&sym.with_truncation(m), t)?;
    let mut log = Vec::new();
    while m < MAX_TRUNCATION {
        let next = tau(&sym.with_truncation(2 * m), t)?;
        let d = (next - prev).norm();
        log.push((2 * m, d));
        if d < tol {
            return Ok((m, log));
        }
        m *= 2;
        prev = next;
    }
    Err(Error::Divergent(format!(
        "tau did not settle within M = {MAX_TRUNCATION}"
    )))
}

/// Tau and sigma on a grid of shifts, truncation chosen by `auto_truncation`.
pub fn tau_curve(sym: &LameSymbol, ts: &[f64]) -> Result<(TauCurve, usize)> {
    let t0 = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    if !t0.is_finite() {
        return invalid("empty t grid");
    }
    let (m, _) = auto_truncation(sym, t0, 1e-9)?;
    let e = sym.with_truncation(m).expansion()?;
    Ok((expsymbol::tau_curve(&e, ts)?, m))
}

/// Nyström oracle `det(I - Gamma)` for the Hankel kernel `phi(s + u + 2t)`
/// evaluated from `Psi` directly.
pub fn tau_oracle(sym: &LameSymbol, t: f64, policy: &GridPolicy) -> Result<C64> {
    let rate = sym.beta.re / (2.0 * sym.kk());
    let mut gmax: f64 = 0.0;
    for i in 0..128 {
        let x = 2.0 * sym.kk() * i as f64 / 128.0;
        gmax = gmax.max(sym.phi(x)?.norm() * (rate * x).exp());
    }
    let amp = 1.5 * gmax * (-2.0 * rate * t).exp();
    let grid = half_line_grid(&Truncation::new(rate, amp), policy)?;
    let k = hankel_matrix(|s| sym.phi(s + 2.0 * t).unwrap_or(c(f64::NAN)), &grid)?;
    k.det(c(-1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSumCheck {
    /// Largest spread of the truncated sum over the tested `j`.
    pub spread: f64,
    pub value: f64,
    pub closed_form: f64,
}

/// `sum_k 1/|lambda_j + lambda_k|^2` for several `j` against `K^2 Re coth(beta) / Re beta`.
pub fn lattice_sum_check(sym: &LameSymbol, m: i64) -> LatticeSumCheck {
    let vals: Vec<f64> = (-3..=3).map(|j| lattice_sum(sym.beta, sym.kk(), j, m)).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    LatticeSumCheck {
        spread: hi - lo,
        value: vals[3],
        closed_form: lattice_sum_closed(sym.beta, sym.kk()),
    }
}

/// Gram bounds of `e^{-lambda_m x}`, `|m| <= M`, on the half line.
pub fn riesz_bounds(sym: &LameSymbol, m: usize) -> Result<GramBounds> {
    let m = m as i64;
    let lambdas: Vec<C64> = (-m..=m).map(|j| sym.lambda(j)).collect();
    gram_bounds(&lambdas)
}

/// Supremum of the Gram condition number over all truncations, `e^{2 Re beta}`:
/// the Gram matrix is Toeplitz with symbol proportional to `e^{-Re beta theta / pi}` on `(0, 2 pi)`.
pub fn riesz_condition_limit(sym: &LameSymbol) -> f64 {
    (2.0 * sym.beta.re).exp()
}
