//! Finite exponential-sum symbols `phi(x) = sum_j xi_j exp(-lambda_j x)`
//! and the tau functions of their Hankel operators.

pub mod partition;

pub use partition::Partition;

use crate::error::{invalid, Error, Result};
use crate::linsys::Realization;
use crate::numkit::linalg::{self, c, CMat, C64};
use crate::numkit::{half_line_grid, hankel_matrix, GridPolicy, TauCurve, Truncation};
use crate::par;
use serde::Serialize;

/// Exponential-sum symbol with values in `C^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpSymbol {
    lambdas: Vec<C64>,
    /// `xis[j]` has length `dim`.
    xis: Vec<Vec<C64>>,
    dim: usize,
}

impl ExpSymbol {
    pub fn scalar(lambdas: Vec<C64>, xis: Vec<C64>) -> Result<Self> {
        if lambdas.len() != xis.len() {
            return invalid("one coefficient per exponent is required");
        }
        Self::vector(lambdas, xis.into_iter().map(|x| vec![x]).collect())
    }

    pub fn vector(lambdas: Vec<C64>, xis: Vec<Vec<C64>>) -> Result<Self> {
        if lambdas.len() != xis.len() {
            return invalid("one coefficient per exponent is required");
        }
        let dim = xis.first().map_or(1, |x| x.len());
        if dim == 0 || xis.iter().any(|x| x.len() != dim) {
            return invalid("coefficients must share one positive dimension");
        }
        for (j, l) in lambdas.iter().enumerate() {
            if !(l.re > 0.0) || !l.im.is_finite() {
                return invalid(format!("exponent {l} must have positive real part"));
            }
            if lambdas[..j].iter().any(|m| (l - m).norm() <= 1e-12 * l.norm().max(1.0)) {
                return Err(Error::DuplicateExponent(format!("{l}")));
            }
        }
        if xis.iter().flatten().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return invalid("coefficients must be finite");
        }
        Ok(ExpSymbol { lambdas, xis, dim })
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn xis(&self) -> &[Vec<C64>] {
        &self.xis
    }

    /// Scalar coefficients; panics for vector symbols.
    pub fn scalar_xis(&self) -> Vec<C64> {
        assert_eq!(self.dim, 1, "scalar coefficients of a vector symbol");
        self.xis.iter().map(|x| x[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: f64) -> Vec<C64> {
        let mut out = vec![c(0.0); self.dim];
        for (l, xi) in self.lambdas.iter().zip(&self.xis) {
            let e = (-l * x).exp();
            for (o, v) in out.iter_mut().zip(xi) {
                *o += v * e;
            }
        }
        out
    }

    pub fn eval_scalar(&self, x: f64) -> C64 {
        self.eval(x)[0]
    }

    /// Symbol of `phi_(t)(s) = phi(s + 2t)`.
    pub fn shifted(&self, t: f64) -> ExpSymbol {
        ExpSymbol {
            lambdas: self.lambdas.clone(),
            xis: self
                .lambdas
                .iter()
                .zip(&self.xis)
                .map(|(l, xi)| {
                    let e = (-l * (2.0 * t)).exp();
                    xi.iter().map(|v| v * e).collect()
                })
                .collect(),
            dim: self.dim,
        }
    }

    /// Smallest real part of the exponents.
    pub fn decay_rate(&self) -> f64 {
        self.lambdas.iter().map(|l| l.re).fold(f64::INFINITY, f64::min)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.lambdas.iter().all(|l| l.im == 0.0) && self.xis.iter().flatten().all(|x| x.im == 0.0)
    }

    /// Scalar symbols: `B = xi`, `C = (1, ..., 1)`.
    /// Vector symbols: `B = (1, ..., 1)^T`, columns of `C` are the `xi_j`.
    pub fn to_realization(&self) -> Result<Realization> {
        let n = self.len();
        if self.dim == 1 {
            Realization::scalar(self.lambdas.clone(), self.scalar_xis(), vec![c(1.0); n])
        } else {
            Realization::new(
                self.lambdas.clone(),
                CMat::from_element(n, 1, c(1.0)),
                CMat::from_fn(self.dim, n, |r, j| self.xis[j][r]),
                vec![1.0; self.dim],
            )
        }
    }
}

/// `det(I - R_t) = det(I - Gamma_{phi_(t)})` for a scalar symbol.
pub fn tau_det(sym: &ExpSymbol, t: f64) -> Result<C64> {
    if sym.dim() != 1 {
        return invalid("det(I - R_t) is defined for scalar symbols");
    }
    if sym.is_empty() {
        return Ok(c(1.0));
    }
    let r = sym.to_realization()?.rx_matrix(t)?;
    let n = sym.len();
    linalg::det(&(CMat::identity(n, n) - r), "I - R_t")
}

/// `sigma(t) = d/dt log det(I - R_t) = T_{-1}(t, t)`.
pub fn sigma(sym: &ExpSymbol, t: f64) -> Result<C64> {
    if sym.is_empty() {
        return Ok(c(0.0));
    }
    Ok(sym.to_realization()?.resolvent_kernel(c(-1.0), t, t)?[(0, 0)])
}

/// `tau` and `sigma` on a grid of shifts.
pub fn tau_curve(sym: &ExpSymbol, ts: &[f64]) -> Result<TauCurve> {
    let rows: Vec<Result<(C64, C64)>> = par::map_slice(ts, |&t| Ok((tau_det(sym, t)?, sigma(sym, t)?)));
    let rows: Vec<(C64, C64)> = rows.into_iter().collect::<Result<_>>()?;
    TauCurve::new(
        ts.to_vec(),
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )
}

/// `det(I - Gamma^* Gamma)` for `phi_(t)` via the Gramians `det(I - Q_t L_t)`.
pub fn tau_squared_gramian(sym: &ExpSymbol, t: f64) -> Result<C64> {
    if sym.is_empty() {
        return Ok(c(1.0));
    }
    sym.to_realization()?.tau_from_gramians(t)
}

/// Caps on the subset expansion: `|S| = |T| <= max_order`, and optionally
/// `|S| + sum S + sum T <= max_weight` with 0-based exponent indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesCaps {
    pub max_order: usize,
    pub max_weight: Option<usize>,
}

impl SeriesCaps {
    pub fn order(max_order: usize) -> Self {
        SeriesCaps {
            max_order,
            max_weight: None,
        }
    }
}

/// Index subsets of `0..n` of size `size` in lexicographic order, with total
/// weight `sum weight(i)` at most `budget`. `weight` must be non-decreasing.
pub fn weighted_subsets(
    n: usize,
    size: usize,
    weight: &dyn Fn(usize) -> usize,
    budget: Option<usize>,
) -> Vec<(Vec<usize>, usize)> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        start: usize,
        n: usize,
        left: usize,
        cur: &mut Vec<usize>,
        w: usize,
        weight: &dyn Fn(usize) -> usize,
        budget: Option<usize>,
        out: &mut Vec<(Vec<usize>, usize)>,
    ) {
        if left == 0 {
            out.push((cur.clone(), w));
            return;
        }
        for i in start..n {
            if n - i < left {
                break;
            }
            let wi = w + weight(i);
            if budget.is_some_and(|b| wi > b) {
                break;
            }
            cur.push(i);
            rec(i + 1, n, left - 1, cur, wi, weight, budget, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), 0, weight, budget, &mut out);
    out
}

/// Cauchy–Binet expansion of `det(I - Gamma^* Gamma)` for `phi_(t)`:
/// `sum_l (-1)^l sum_{S,T} det[xi_j^(r) e^{-2 lambda_j t} / (lambda_j + conj lambda_k)]
///  det[conj xi_k^(r) e^{-2 conj lambda_k t} / (lambda_m + conj lambda_k)]`,
/// with `T` ranging over pairs `(k, r)` in row-major order.
pub fn tau_squared_series(sym: &ExpSymbol, t: f64, caps: SeriesCaps) -> Result<C64> {
    let n = sym.len();
    let d = sym.dim();
    let sh = sym.shifted(t);
    let lam = sym.lambdas();
    let weight_s = |i: usize| i;
    let weight_t = |i: usize| i / d;
    let mut total = c(1.0);
    for l in 1..=caps.max_order.min(n) {
        let budget = caps.max_weight.map(|w| w.saturating_sub(l));
        if caps.max_weight.is_some_and(|w| w < l) {
            break;
        }
        let ss = weighted_subsets(n, l, &weight_s, budget);
        let block: Vec<C64> = par::map_slice(&ss, |(s, ws)| {
            let tb = budget.map(|b| b - ws);
            let ts = weighted_subsets(n * d, l, &weight_t, tb);
            let mut acc = c(0.0);
            for (tset, _) in &ts {
                let a = CMat::from_fn(l, l, |i, q| {
                    let (j, (k, r)) = (s[i], (tset[q] / d, tset[q] % d));
                    sh.xis[j][r] / (lam[j] + lam[k].conj())
                });
                let b = CMat::from_fn(l, l, |i, q| {
                    let (m, (k, r)) = (s[i], (tset[q] / d, tset[q] % d));
                    sh.xis[k][r].conj() / (lam[m] + lam[k].conj())
                });
                let da = linalg::det(&a, "series minor").unwrap_or(c(0.0));
                let db = linalg::det(&b, "series minor").unwrap_or(c(0.0));
                acc += da * db;
            }
            acc
        });
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        total += block.into_iter().fold(c(0.0), |a, b| a + b) * sign;
    }
    Ok(total)
}

/// Fredholm oracle: `det(I + z Gamma_{phi_(t)})` by Nyström quadrature of
/// the Hankel kernel on the half line.
pub fn hankel_oracle(sym: &ExpSymbol, t: f64, z: C64, policy: &GridPolicy) -> Result<C64> {
    if sym.dim() != 1 {
        return invalid("Hankel oracle is for scalar symbols");
    }
    if sym.is_empty() {
        return Ok(c(1.0));
    }
    let sh = sym.shifted(t);
    let amp: f64 = sh.xis.iter().map(|x| x[0].norm()).sum();
    let grid = half_line_grid(&Truncation::new(sym.decay_rate(), amp), policy)?;
    let k = hankel_matrix(|s| sh.eval_scalar(s), &grid)?;
    k.det(z)
}

/// Fredholm oracle for `det(I - Gamma^* Gamma)` of `phi_(t)`.
pub fn hankel_oracle_squared(sym: &ExpSymbol, t: f64, policy: &GridPolicy) -> Result<C64> {
    if sym.dim() != 1 {
        return invalid("Hankel oracle is for scalar symbols");
    }
    if sym.is_empty() {
        return Ok(c(1.0));
    }
    let sh = sym.shifted(t);
    let amp: f64 = sh.xis.iter().map(|x| x[0].norm()).sum();
    let grid = half_line_grid(&Truncation::new(sym.decay_rate(), amp), policy)?;
    let k = hankel_matrix(|s| sh.eval_scalar(s), &grid)?;
    let n = k.dim();
    let m = CMat::identity(n, n) - k.matrix.adjoint() * &k.matrix;
    linalg::det(&m, "I - Gamma^* Gamma")
}

/// `xi t^k exp(-lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyExpTerm {
    pub lambda: C64,
    pub power: usize,
    pub xi: C64,
}

/// Replace each `t^k e^{-lambda t}` by `(-Delta_eps)^k e^{-lambda t}`, with
/// `Delta_eps g(lambda) = (g(lambda + eps) - g(lambda)) / eps`, which tends
/// to `t^k e^{-lambda t}` as `eps -> 0`.
pub fn resolve_higher_poles(terms: &[PolyExpTerm], eps: f64) -> Result<ExpSymbol> {
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    let mut lambdas = Vec::new();
    let mut xis = Vec::new();
    for term in terms {
        let k = term.power;
        let mut binom = 1.0;
        for i in 0..=k {
            // eps^{-k} C(k, i) (-1)^i
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            lambdas.push(term.lambda + eps * i as f64);
            xis.push(term.xi * (sign * binom / eps.powi(k as i32)));
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
    }
    ExpSymbol::scalar(lambdas, xis)
}
