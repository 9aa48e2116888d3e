//! Hypergeometric kernel: the off-diagonal system with poles at `0` and `1`,
//! its decaying solution seeded by the Liouville-Green approximation, the
//! Loewner representations of `lambda^{-c}(lambda-1)^{c-1}` and the kernel
//! `<J Psi(x), Psi(y)> / (x - y)` on `(1 + delta, infinity)`.

use crate::error::{invalid, Error, Result};
use crate::numkit::linalg::{c, hermitian_eigenvalues, CMat, Lu};
use crate::numkit::ode::{integrate, integrate_through, OdeOptions};
use crate::numkit::{panelled, QuadGrid, TauCurve};
use crate::par;
use nalgebra::{Matrix2, Vector2};
use serde::Serialize;
use std::f64::consts::PI;

pub type V = Vector2<f64>;

/// Default starting point of the backward integration.
pub const LAMBDA_START: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HgParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
}

impl HgParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return invalid("hypergeometric parameters must be finite");
        }
        if a + b != 0.0 {
            return invalid(format!("need a + b = 0, got {}", a + b));
        }
        if !(0.0..=1.0).contains(&c) {
            return invalid(format!("need 0 <= c <= 1, got {c}"));
        }
        let nab = -a * b;
        if nab <= 1.25 {
            return invalid(format!("need -ab > 5/4, got {nab}"));
        }
        let s = 2.0 * nab.sqrt();
        if (s - s.round()).abs() < 1e-12 {
            return invalid(format!("2 sqrt(-ab) = {s} is an integer"));
        }
        Ok(HgParams {
            a,
            b,
            c,
            c0: c,
            c1: 1.0 - c,
        })
    }

    /// `a = sqrt(-ab)`, `b = -a`.
    pub fn from_product(neg_ab: f64, c: f64) -> Result<Self> {
        if !(neg_ab > 0.0) {
            return invalid(format!("need -ab > 0, got {neg_ab}"));
        }
        let a = neg_ab.sqrt();
        Self::new(a, -a, c)
    }

    /// `-ab = 3`, `c = 0.3`.
    pub fn reference() -> Self {
        Self::from_product(3.0, 0.3).expect("reference parameters are valid")
    }

    pub fn ab(&self) -> f64 {
        self.a * self.b
    }

    /// Eigenvalues of the residue at infinity are `+-sqrt(-ab)`.
    pub fn residue_exponent(&self) -> f64 {
        (-self.ab()).sqrt()
    }

    /// Off-diagonal entries `(g, h)` of `W`.
    fn entries(&self, l: f64) -> (f64, f64) {
        let g = l.powf(-self.c0) * (l - 1.0).powf(-self.c1);
        let h = -self.ab() * l.powf(self.c0 - 1.0) * (l - 1.0).powf(self.c1 - 1.0);
        (g, h)
    }
}

/// `W(lambda) = [[0, lambda^{-c0}(lambda-1)^{-c1}], [-ab lambda^{c0-1}(lambda-1)^{c1-1}, 0]]`.
pub fn w_matrix(p: &HgParams, l: f64) -> Result<Matrix2<f64>> {
    if !(l > 1.0) || !l.is_finite() {
        return invalid(format!("W needs lambda > 1, got {l}"));
    }
    let (g, h) = p.entries(l);
    Ok(Matrix2::new(0.0, g, h, 0.0))
}

/// Potential of the normal form `y'' = q y` of the scalar equation for `Psi_1`.
pub fn q_potential(p: &HgParams, l: f64) -> f64 {
    let cc = p.c;
    let lm = l - 1.0;
    -p.ab() / (l * lm)
        + 0.25 * ((cc * cc - 2.0 * cc) / (l * l) + 2.0 * cc * (1.0 - cc) / (l * lm) + (cc * cc - 1.0) / (lm * lm))
}

fn q_derivative(p: &HgParams, l: f64) -> f64 {
    let cc = p.c;
    let lm = l - 1.0;
    let d_inv = -(2.0 * l - 1.0) / (l * lm).powi(2);
    -p.ab() * d_inv
        + 0.25
            * (-2.0 * (cc * cc - 2.0 * cc) / l.powi(3) + 2.0 * cc * (1.0 - cc) * d_inv
                - 2.0 * (cc * cc - 1.0) / lm.powi(3))
}

/// `int_2^lambda sqrt(q)`, erroring if `q` is not positive on the way.
fn lg_phase(p: &HgParams, l: f64) -> Result<f64> {
    if l == 2.0 {
        return Ok(0.0);
    }
    let (a, b) = if l > 2.0 { (2.0, l) } else { (l, 2.0) };
    let mut breaks = vec![a];
    while breaks.last().unwrap() * 2.0 < b {
        let next = breaks.last().unwrap() * 2.0;
        breaks.push(next);
    }
    breaks.push(b);
    let grid = panelled(&breaks, 20)?;
    if let Some(&x) = grid.nodes.iter().find(|&&x| q_potential(p, x) <= 0.0) {
        return Err(Error::NonDecaying(format!("q({x}) <= 0 on the phase path")));
    }
    let v = grid.integrate(|x| q_potential(p, x).sqrt());
    Ok(if l > 2.0 { v } else { -v })
}

/// Decaying Liouville-Green branch `Psi_1 = g^{1/2} q^{-1/4} exp(-int_2^lambda sqrt q)`,
/// `Psi_2 = Psi_1' / g`.
pub fn lg_seed(p: &HgParams, l: f64) -> Result<V> {
    if !(l > 1.0) {
        return invalid(format!("seed point must exceed 1, got {l}"));
    }
    let q = q_potential(p, l);
    if q <= 0.0 {
        return Err(Error::NonDecaying(format!("q({l}) = {q} <= 0")));
    }
    let (g, _) = p.entries(l);
    let psi1 = g.sqrt() * q.powf(-0.25) * (-lg_phase(p, l)?).exp();
    let dlog_g = -p.c0 / l - p.c1 / (l - 1.0);
    let dpsi1 = psi1 * (0.5 * dlog_g - 0.25 * q_derivative(p, l) / q - q.sqrt());
    Ok(V::new(psi1, dpsi1 / g))
}

/// `lambda^{-c0} (lambda-1)^{c0-1}`.
pub fn loewner_closed(c0: f64, l: f64) -> f64 {
    l.powf(-c0) * (l - 1.0).powf(c0 - 1.0)
}

/// `int_0^1 v^{-c}(1-v)^{c-1} f(v) dv` with both endpoint powers absorbed
/// by substitution; `0 < c < 1`.
fn beta_weighted<F: Fn(f64) -> f64>(cc: f64, f: F) -> Result<f64> {
    const PANELS: usize = 12;
    const NODES: usize = 20;
    let left_end = 0.5f64.powf(1.0 - cc);
    let right_end = 0.5f64.powf(cc);
    let gl = panelled(&split(left_end, PANELS), NODES)?;
    let gr = panelled(&split(right_end, PANELS), NODES)?;
    // v = w^{1/(1-c)} on (0, 1/2)
    let left = gl.integrate(|w| {
        let v = w.powf(1.0 / (1.0 - cc));
        (1.0 - v).powf(cc - 1.0) * f(v)
    }) / (1.0 - cc);
    // 1 - v = w^{1/c} on (1/2, 1)
    let right = gr.integrate(|w| {
        let r = w.powf(1.0 / cc);
        (1.0 - r).powf(-cc) * f(1.0 - r)
    }) / cc;
    Ok(left + right)
}

fn split(end: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|i| end * i as f64 / panels as f64).collect()
}

/// Loewner integral `(sin pi c0 / pi) int_{-1}^0 (-u)^{-c0}(1+u)^{c0-1} / (lambda + u) du`.
///
/// At `c0 = 0` and `c0 = 1` the measure collapses to a point mass at
/// `u = -1` and `u = 0`.
pub fn loewner_rep(c0: f64, l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c0) {
        return invalid(format!("need 0 <= c0 <= 1, got {c0}"));
    }
    if !(l > 1.0) {
        return invalid(format!("Loewner representation needs lambda > 1, got {l}"));
    }
    if c0 == 0.0 {
        return Ok(1.0 / (l - 1.0));
    }
    if c0 == 1.0 {
        return Ok(1.0 / l);
    }
    Ok((PI * c0).sin() / PI * beta_weighted(c0, |v| 1.0 / (l - v))?)
}

/// Divided difference `(L(x) - L(y)) / (x - y)` of the Loewner function,
/// as `-int omega(du) / ((x + u)(y + u))`.
pub fn loewner_divided(c0: f64, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c0) {
        return invalid(format!("need 0 <= c0 <= 1, got {c0}"));
    }
    if !(x > 1.0 && y > 1.0) {
        return invalid(format!("need x, y > 1, got ({x}, {y})"));
    }
    if c0 == 0.0 {
        return Ok(-1.0 / ((x - 1.0) * (y - 1.0)));
    }
    if c0 == 1.0 {
        return Ok(-1.0 / (x * y));
    }
    Ok(-(PI * c0).sin() / PI * beta_weighted(c0, |v| 1.0 / ((x - v) * (y - v)))?)
}

/// Diagonal of `(J W(x) + W(y)^T J) / (x - y)` from the Loewner measures.
pub fn schur_diagonal(p: &HgParams, x: f64, y: f64) -> Result<(f64, f64)> {
    Ok((p.ab() * loewner_divided(p.c1, x, y)?, loewner_divided(p.c0, x, y)?))
}

/// The same diagonal from the entries of `W`.
pub fn schur_diagonal_direct(p: &HgParams, x: f64, y: f64) -> Result<(f64, f64)> {
    let j = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let m = (j * w_matrix(p, x)? + w_matrix(p, y)?.transpose() * j) / (x - y);
    if m[(0, 1)] != 0.0 || m[(1, 0)] != 0.0 {
        return Err(Error::Factorization("off-diagonal Schur entries".into()));
    }
    Ok((m[(0, 0)], m[(1, 1)]))
}

fn jform(a: &V, b: &V) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Backward integration of `Psi' = W Psi` from the LG seed at `lambda_start`.
#[derive(Debug, Clone)]
pub struct HgSystem {
    pub params: HgParams,
    pub lambda_start: f64,
    pub opts: OdeOptions,
    seed: V,
}

impl HgSystem {
    pub fn new(params: HgParams) -> Result<Self> {
        Self::with_start(params, LAMBDA_START)
    }

    pub fn with_start(params: HgParams, lambda_start: f64) -> Result<Self> {
        if !(lambda_start > 2.0) || !lambda_start.is_finite() {
            return invalid(format!("lambda_start must exceed 2, got {lambda_start}"));
        }
        let seed = lg_seed(&params, lambda_start)?;
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-300,
            initial_step: lambda_start * 1e-4,
            ..OdeOptions::default()
        };
        Ok(HgSystem {
            params,
            lambda_start,
            opts,
            seed,
        })
    }

    pub fn with_tolerance(mut self, rtol: f64) -> Self {
        self.opts.rtol = rtol;
        self
    }

    pub fn seed(&self) -> V {
        self.seed
    }

    fn rhs(&self) -> impl Fn(f64, &[f64]) -> Vec<f64> + '_ {
        move |l, y| {
            let (g, h) = self.params.entries(l);
            vec![g * y[1], h * y[0]]
        }
    }

    /// `Psi` at the given points, in input order; each must lie in `(1, lambda_start]`.
    pub fn solve(&self, points: &[f64]) -> Result<Vec<V>> {
        if let Some(&x) = points.iter().find(|&&x| !(x > 1.0 && x <= self.lambda_start)) {
            return invalid(format!("evaluation point {x} outside (1, {}]", self.lambda_start));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[j].total_cmp(&points[i]));
        let sorted: Vec<f64> = order.iter().map(|&i| points[i]).collect();
        let f = self.rhs();
        let vals = integrate_through(&f, self.lambda_start, self.seed.as_slice(), &sorted, &self.opts)?;
        let mut out = vec![V::zeros(); points.len()];
        for (k, &i) in order.iter().enumerate() {
            out[i] = V::new(vals[k][0], vals[k][1]);
        }
        Ok(out)
    }

    pub fn psi(&self, x: f64) -> Result<V> {
        Ok(self.solve(&[x])?[0])
    }

    /// `|Psi' - W Psi| / |W Psi|` with `Psi'` from a five-point stencil of the
    /// computed solution, step `1e-3 (x - 1)`.
    pub fn residual(&self, x: f64) -> Result<f64> {
        let h = 1e-3 * (x - 1.0);
        let pts = [x - 2.0 * h, x - h, x, x + h, x + 2.0 * h];
        let v = self.solve(&pts)?;
        let d = (v[0] - v[4] + (v[3] - v[1]) * 8.0) / (12.0 * h);
        let wp = w_matrix(&self.params, x)? * v[2];
        Ok((d - wp).norm() / wp.norm())
    }

    /// Relative gap after one step of length `h` between the integrated
    /// solution and the LG formula.
    pub fn seed_step_check(&self, h: f64) -> Result<f64> {
        let x = self.lambda_start - h;
        let a = self.psi(x)?;
        let b = lg_seed(&self.params, x)?;
        Ok((a - b).norm() / b.norm())
    }

    /// Integrate down to `lambda_mid` and back; relative distance to the seed.
    pub fn reversibility(&self, lambda_mid: f64) -> Result<f64> {
        let mid = self.psi(lambda_mid)?;
        let f = self.rhs();
        let (back, _) = integrate(&f, lambda_mid, mid.as_slice(), self.lambda_start, &self.opts)?;
        Ok((V::new(back[0], back[1]) - self.seed).norm() / self.seed.norm())
    }

    /// `int_2^{2^k} x |Psi|^2 dx` for `k = 2, ..`, up to `lambda_start`.
    pub fn l2_partials(&self) -> Result<Vec<f64>> {
        let mut breaks = vec![2.0];
        while breaks.last().unwrap() * 2.0 <= self.lambda_start {
            let next = breaks.last().unwrap() * 2.0;
            breaks.push(next);
        }
        let mut out = Vec::new();
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            let g = panelled(&[w[0], w[1]], 20)?;
            let v = self.solve(&g.nodes)?;
            acc += g
                .nodes
                .iter()
                .zip(&g.weights)
                .zip(&v)
                .map(|((x, wt), p)| wt * x * p.norm_squared())
                .sum::<f64>();
            out.push(acc);
        }
        Ok(out)
    }
}

/// Determinant of `I - K` on `(x, lambda_start)` with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HgDet {
    pub det: f64,
    /// Resolvent kernel `R(x, x) = d/dx log det`.
    pub resolvent: f64,
    pub eig_min: f64,
    pub eig_max: f64,
}

#[derive(Debug, Clone)]
pub struct HgKernel {
    pub system: HgSystem,
}

impl HgKernel {
    pub fn new(params: HgParams) -> Result<Self> {
        Ok(HgKernel {
            system: HgSystem::new(params)?.with_tolerance(1e-12),
        })
    }

    fn value(&self, x: f64, y: f64, px: &V, py: &V) -> f64 {
        if x == y {
            // <J Psi', Psi> = -<J Psi, W Psi>
            let (g, h) = self.system.params.entries(x);
            -jform(px, &V::new(g * px[1], h * px[0]))
        } else {
            jform(px, py) / (x - y)
        }
    }

    /// `K(x, y) = <J Psi(x), Psi(y)> / (x - y)`, confluent on the diagonal.
    pub fn k(&self, x: f64, y: f64) -> Result<f64> {
        let v = self.system.solve(&[x, y])?;
        Ok(self.value(x, y, &v[0], &v[1]))
    }

    /// `((d/dx + d/dy) [(x - y) K])` by central differences, and the same
    /// quantity from the Loewner diagonal.
    pub fn derivative_identity(&self, x: f64, y: f64, h: f64) -> Result<(f64, f64)> {
        let v = self.system.solve(&[
            x - 2.0 * h,
            x - h,
            x + h,
            x + 2.0 * h,
            y - 2.0 * h,
            y - h,
            y + h,
            y + 2.0 * h,
            x,
            y,
        ])?;
        let n = |i: usize| jform(&v[i], &v[i + 4]);
        let lhs = (n(0) - n(3) + 8.0 * (n(2) - n(1))) / (12.0 * h);
        let (d1, d2) = schur_diagonal(&self.system.params, x, y)?;
        let (px, py) = (v[8], v[9]);
        let rhs = (x - y) * (d1 * px[0] * py[0] + d2 * px[1] * py[1]);
        Ok((lhs, rhs))
    }

    /// `K(x, y)` as the boundary term at `lambda_start` minus the integral of
    /// the Loewner diagonal along the shift `s`.
    pub fn k_factorized(&self, x: f64, y: f64, nodes: usize) -> Result<f64> {
        if x == y {
            return invalid("factorized kernel needs x != y");
        }
        let s_max = self.system.lambda_start - x.max(y);
        if !(s_max > 0.0) {
            return invalid("points beyond lambda_start");
        }
        let mut breaks = vec![0.0];
        let mut b = 0.25;
        while b < s_max {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(s_max);
        let grid = panelled(&breaks, nodes)?;
        let p = self.system.params;
        let xs: Vec<f64> = grid.nodes.iter().map(|s| x + s).collect();
        let ys: Vec<f64> = grid.nodes.iter().map(|s| y + s).collect();
        let px = self.system.solve(&xs)?;
        let py = self.system.solve(&ys)?;
        let terms = par::try_map_range(grid.len(), |i| -> Result<f64> {
            let (d1, d2) = schur_diagonal(&p, xs[i], ys[i])?;
            Ok(grid.weights[i] * (d1 * px[i][0] * py[i][0] + d2 * px[i][1] * py[i][1]))
        })?;
        let ends = self.system.solve(&[x + s_max, y + s_max])?;
        Ok(jform(&ends[0], &ends[1]) / (x - y) - terms.iter().sum::<f64>())
    }

    /// Panels `[1 + (x-1) 2^k, 1 + (x-1) 2^{k+1}]` up to `lambda_start`.
    pub fn grid(&self, x: f64, nodes: usize) -> Result<QuadGrid> {
        if !(x > 1.0 && x < self.system.lambda_start) {
            return invalid(format!("need 1 < x < {}, got {x}", self.system.lambda_start));
        }
        let mut breaks = vec![x];
        let mut k = 1.0;
        while 1.0 + (x - 1.0) * 2f64.powf(k) < self.system.lambda_start {
            breaks.push(1.0 + (x - 1.0) * 2f64.powf(k));
            k += 1.0;
        }
        breaks.push(self.system.lambda_start);
        panelled(&breaks, nodes)
    }

    /// `det(I - K)` on `grid`, the resolvent at `x = grid.a` and the
    /// spectrum of the symmetrized discretization.
    pub fn fredholm(&self, grid: &QuadGrid) -> Result<HgDet> {
        let n = grid.len();
        let x = grid.a;
        let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let mut pts = grid.nodes.clone();
        pts.push(x);
        let psis = self.system.solve(&pts)?;
        let kv = |i: usize, j: usize| self.value(pts[i], pts[j], &psis[i], &psis[j]);
        let rows: Vec<Vec<f64>> = par::map_range(n, |i| (0..n).map(|j| sw[i] * kv(i, j) * sw[j]).collect());
        let km = CMat::from_fn(n, n, |i, j| c(rows[i][j]));
        if km.iter().any(|v| !v.re.is_finite()) {
            return Err(Error::NonFinite { i: 0, j: 0 });
        }
        let eig = hermitian_eigenvalues(&km);
        let a = CMat::identity(n, n) - &km;
        let lu = Lu::new(&a, "I - K (hypergeometric)")?;
        let col = CMat::from_fn(n, 1, |j, _| c(kv(j, n) * sw[j]));
        let row = CMat::from_fn(1, n, |_, j| c(kv(n, j) * sw[j]));
        let r = kv(n, n) + (row * lu.solve(&col))[(0, 0)].re;
        Ok(HgDet {
            det: lu.det().re,
            resolvent: r,
            eig_min: eig.iter().cloned().fold(f64::INFINITY, f64::min),
            eig_max: eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// `det(I - K)` on `(x, lambda_start)` for each `x`, with `sigma = R(x, x)`.
    pub fn tau_curve(&self, xs: &[f64], nodes: usize) -> Result<TauCurve> {
        let dets = xs
            .iter()
            .map(|&x| self.fredholm(&self.grid(x, nodes)?))
            .collect::<Result<Vec<_>>>()?;
        TauCurve::new(
            xs.to_vec(),
            dets.iter().map(|d| c(d.det)).collect(),
            dets.iter().map(|d| c(d.resolvent)).collect(),
        )
    }
}
