//! Fuchsian system with poles at `0, 1, t` behind Painlevé VI: residue
//! matrices, the Laurent solution at infinity, Schlesinger consistency and
//! the integrable kernel `<J Phi(lambda), Phi(mu)> / (lambda - mu)`.

use crate::error::{invalid, Error, Result};
use crate::numkit::linalg::{c, singular_values, CMat, Lu, C64};
use crate::numkit::ode::{integrate, OdeOptions};
use crate::numkit::{composite_gauss_legendre, panelled, QuadGrid};
use crate::par;
use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

pub type M2 = Matrix2<C64>;
pub type V2 = Vector2<C64>;

/// `J = [[0, -1], [1, 0]]`.
pub fn j_matrix() -> M2 {
    M2::new(c(0.0), c(-1.0), c(1.0), c(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PviParams {
    /// `theta_0, theta_1, theta_t`.
    pub theta: [f64; 3],
    pub z: [f64; 3],
    pub u: [f64; 3],
    pub t: f64,
    /// `-2(z_0 + z_1 + z_t) - (theta_0 + theta_1 + theta_t)`.
    pub theta_inf: f64,
}

impl PviParams {
    pub fn new(theta: [f64; 3], z: [f64; 3], u: [f64; 3], t: f64) -> Result<Self> {
        if theta.iter().chain(&z).chain(&u).any(|v| !v.is_finite()) || !t.is_finite() {
            return invalid("PVI parameters must be finite");
        }
        if u.contains(&0.0) {
            return invalid("u_nu must be nonzero");
        }
        if t == 0.0 || t == 1.0 {
            return invalid("t must differ from 0 and 1");
        }
        let theta_inf = -2.0 * (z[0] + z[1] + z[2]) - (theta[0] + theta[1] + theta[2]);
        for s in [theta_inf, -theta_inf] {
            if s > 0.0 && s.fract() == 0.0 {
                return invalid(format!(
                    "theta_inf = {theta_inf}: +-theta_inf must not be a positive integer"
                ));
            }
        }
        Ok(PviParams {
            theta,
            z,
            u,
            t,
            theta_inf,
        })
    }

    /// Instance with diagonal `W_inf = diag(0.7, -0.7)`, `theta_inf = 1.4`, `t = 1/2`.
    pub fn reference() -> Self {
        PviParams::new([0.3, 0.2, 0.1], [-0.3, -0.5, -0.2], [13.0 / 3.0, -3.0, 1.0], 0.5).unwrap()
    }

    pub fn system(&self) -> PviSystem {
        PviSystem {
            t: self.t,
            w: [0, 1, 2].map(|i| w_matrix(self.theta[i], self.z[i], self.u[i])),
        }
    }

    /// Painlevé VI constants `(alpha, beta, gamma, delta)`.
    pub fn pvi_constants(&self) -> [f64; 4] {
        [
            0.5 * (self.theta_inf - 1.0).powi(2),
            -0.5 * self.theta[0].powi(2),
            0.5 * self.theta[1].powi(2),
            0.5 * (1.0 - self.theta[2].powi(2)),
        ]
    }
}

/// `[[z + theta/2, -u z], [(z + theta)/u, -z - theta/2]]`.
pub fn w_matrix(theta: f64, z: f64, u: f64) -> M2 {
    M2::new(c(z + theta / 2.0), c(-u * z), c((z + theta) / u), c(-z - theta / 2.0))
}

/// Residues `W_0, W_1, W_t` at the poles `0, 1, t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PviSystem {
    pub t: f64,
    pub w: [M2; 3],
}

impl PviSystem {
    pub fn poles(&self) -> [f64; 3] {
        [0.0, 1.0, self.t]
    }

    pub fn w_inf(&self) -> M2 {
        -(self.w[0] + self.w[1] + self.w[2])
    }

    /// `W_0/x + W_1/(x - 1) + W_t/(x - t)`.
    pub fn coefficient(&self, x: C64) -> M2 {
        self.w[0] / x + self.w[1] / (x - 1.0) + self.w[2] / (x - self.t)
    }

    pub fn is_real(&self) -> bool {
        self.w.iter().all(|m| m.iter().all(|v| v.im == 0.0))
    }

    /// Schlesinger velocities `([W_t, W_0]/t, [W_t, W_1]/(t - 1), -[W_t, W_0]/t - [W_t, W_1]/(t - 1))`.
    pub fn velocity(&self) -> [M2; 3] {
        let [w0, w1, wt] = self.w;
        let a = comm(&wt, &w0) / c(self.t);
        let b = comm(&wt, &w1) / c(self.t - 1.0);
        [a, b, -a - b]
    }

    /// Schlesinger flow from `self.t` to `t1`.
    pub fn evolve(&self, t1: f64, opts: &OdeOptions) -> Result<PviSystem> {
        let f = |t: f64, y: &[f64]| {
            let s = PviSystem { t, w: unpack(y) };
            pack(&s.velocity())
        };
        let (y, _) = integrate(&f, self.t, &pack(&self.w), t1, opts)?;
        Ok(PviSystem { t: t1, w: unpack(&y) })
    }
}

fn comm(a: &M2, b: &M2) -> M2 {
    a * b - b * a
}

fn pack(w: &[M2; 3]) -> Vec<f64> {
    w.iter().flat_map(|m| m.iter().flat_map(|v| [v.re, v.im])).collect()
}

fn unpack(y: &[f64]) -> [M2; 3] {
    [0, 1, 2].map(|k| M2::from_iterator((0..4).map(|i| C64::new(y[8 * k + 2 * i], y[8 * k + 2 * i + 1]))))
}

fn norm(m: &M2) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Real symmetric `J W`; errors when `W` is not traceless and real.
pub fn jw(w: &M2) -> Result<Matrix2<f64>> {
    let p = j_matrix() * w;
    if p.iter().any(|v| v.im != 0.0) {
        return invalid("JW factorization needs a real residue matrix");
    }
    Ok(p.map(|v| v.re))
}

/// Real `V` with `JW = V^T diag(1, -1) V`, from the symmetric eigendecomposition.
/// A zero eigenvalue gives a zero row.
pub fn jw_factor(s: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let (p, q, r) = (s[(0, 0)], s[(0, 1)], s[(1, 1)]);
    if (q - s[(1, 0)]).abs() > 1e-14 * (1.0 + q.abs()) {
        return Err(Error::Factorization("JW is not symmetric".into()));
    }
    let mid = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let (mp, mm) = (mid + rad, mid - rad);
    let scale = 1e-14 * rad.max(mid.abs()).max(f64::MIN_POSITIVE);
    if mp < -scale || mm > scale {
        return Err(Error::Factorization(format!("JW is definite (eigenvalues {mp}, {mm})")));
    }
    let th = 0.5 * (2.0 * q).atan2(p - r);
    let (sn, cs) = th.sin_cos();
    let a = mp.max(0.0).sqrt();
    let b = (-mm).max(0.0).sqrt();
    Ok(Matrix2::new(a * cs, a * sn, -b * sn, b * cs))
}

/// `exp(M)` for 2x2 `M`: `e^{tr/2} (cosh s I + sinh(s)/s (M - tr/2 I))`, `s^2 = -det(M - tr/2 I)`.
pub fn expm2(m: &M2) -> M2 {
    let h = m.trace() * 0.5;
    let n = m - M2::identity() * h;
    let s2 = -(n[(0, 0)] * n[(1, 1)] - n[(0, 1)] * n[(1, 0)]);
    let s = s2.sqrt();
    let sinhc = if s.norm() < 1e-4 {
        c(1.0) + s2 / 6.0 + s2 * s2 / 120.0
    } else {
        s.sinh() / s
    };
    (M2::identity() * s.cosh() + n * sinhc) * h.exp()
}

/// Real parameter sets whose `W_inf` has real eigenvalues `+-a`, `a` in `(0.2, 1.2)`
/// and `2a` at least 0.05 from the integers.
pub fn random_params(seed: u64, count: usize) -> Vec<PviParams> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let theta = [0; 3].map(|_| rng.gen_range(0.1..0.5));
        let z = [0; 3].map(|_| rng.gen_range(-0.6..0.0));
        let u = [0; 3].map(|_| {
            let m: f64 = rng.gen_range(0.5..2.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        });
        let t = rng.gen_range(0.2..0.8);
        let Ok(p) = PviParams::new(theta, z, u, t) else {
            continue;
        };
        let a = eigenvalues2(&p.system().w_inf())[0];
        if a.im.abs() > 0.0 || !(0.2..1.2).contains(&a.re) {
            continue;
        }
        let frac = (2.0 * a.re).fract();
        if frac.min(1.0 - frac) < 0.05 {
            continue;
        }
        out.push(p);
    }
    out
}

/// Eigenvalues of a 2x2 matrix, larger real part first.
pub fn eigenvalues2(m: &M2) -> [C64; 2] {
    let h = m.trace() * 0.5;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let d = (h * h - det).sqrt();
    let (a, b) = (h + d, h - d);
    if a.re >= b.re {
        [a, b]
    } else {
        [b, a]
    }
}

/// Unique `C` with `W C - C (W + n I) = D`, by the 4x4 Kronecker system.
pub fn sylvester_solve(w: &M2, n: usize, d: &M2) -> Result<M2> {
    let ev = eigenvalues2(w);
    for a in ev {
        for b in ev {
            if (a - b - n as f64).norm() < 1e-10 * (1.0 + n as f64) {
                return Err(Error::Resonant { n });
            }
        }
    }
    let wn = w + M2::identity() * c(n as f64);
    let mut k = CMat::zeros(4, 4);
    for i in 0..2 {
        for kk in 0..2 {
            let row = i + 2 * kk;
            for p in 0..2 {
                for q in 0..2 {
                    let col = p + 2 * q;
                    let mut v = c(0.0);
                    if q == kk {
                        v += w[(i, p)];
                    }
                    if p == i {
                        v -= wn[(q, kk)];
                    }
                    k[(row, col)] = v;
                }
            }
        }
    }
    let rhs = CMat::from_fn(4, 1, |r, _| d[(r % 2, r / 2)]);
    let sol = Lu::new(&k, "Sylvester system")
        .map_err(|_| Error::Resonant { n })?
        .solve(&rhs);
    Ok(M2::new(sol[(0, 0)], sol[(2, 0)], sol[(1, 0)], sol[(3, 0)]))
}

/// `C = -int_0^inf e^{s W} D e^{-s (W + n I)} ds` by quadrature; requires
/// `n > Re(a_i - a_j)` for the eigenvalues `a_i` of `W`.
pub fn sylvester_integral(w: &M2, n: usize, d: &M2) -> Result<M2> {
    let ev = eigenvalues2(w);
    let spread = (ev[0] - ev[1]).re.abs();
    let rate = n as f64 - spread;
    if !(rate > 0.0) {
        return Err(Error::Divergent(format!("integral form needs n > {spread}")));
    }
    let len = 45.0 / rate;
    let g = composite_gauss_legendre(48, 24, 0.0, len)?;
    let mut acc = M2::zeros();
    for (&s, &wt) in g.nodes.iter().zip(&g.weights) {
        let e1 = expm2(&(w * c(s)));
        let e2 = expm2(&(-w * c(s)));
        acc += e1 * d * e2 * c(wt * (-(n as f64) * s).exp());
    }
    Ok(-acc)
}

/// Coefficients `C_0 = I, C_1, ..., C_M` of
/// `Phi(x) = (I + sum C_j x^{-j}) x^{-W_inf} Phi_0`.
#[derive(Debug, Clone)]
pub struct LaurentSeries {
    pub system: PviSystem,
    pub w_inf: M2,
    pub coeffs: Vec<M2>,
    rhs: Vec<M2>,
    /// `max_n ||C_n||^{1/n}`.
    pub growth: f64,
}

impl LaurentSeries {
    pub fn new(system: &PviSystem, m: usize) -> Result<Self> {
        let w_inf = system.w_inf();
        let t = c(system.t);
        let [_, w1, wt] = system.w;
        let mut coeffs = vec![M2::identity()];
        let mut rhs = vec![M2::zeros()];
        let mut s1 = M2::zeros();
        let mut st = M2::zeros();
        let mut growth: f64 = 0.0;
        for n in 1..=m {
            let prev = coeffs[n - 1];
            s1 += prev;
            st = (st + prev) * t;
            let d = w1 * s1 + wt * st;
            let cn = sylvester_solve(&w_inf, n, &d)?;
            growth = growth.max(norm(&cn).powf(1.0 / n as f64));
            coeffs.push(cn);
            rhs.push(d);
        }
        Ok(LaurentSeries {
            system: system.clone(),
            w_inf,
            coeffs,
            rhs,
            growth,
        })
    }

    /// Smallest series reaching `||C_n|| x_min^{-n} < tol` for three consecutive `n`.
    pub fn converged_at(system: &PviSystem, x_min: f64, tol: f64) -> Result<Self> {
        let r = system.t.abs().max(1.0);
        if !(x_min > r) {
            return Err(Error::Divergent(format!("x = {x_min} is inside |x| <= {r}")));
        }
        let mut m = 32;
        loop {
            let s = LaurentSeries::new(system, m)?;
            let ok = (m - 2..=m).all(|n| norm(&s.coeffs[n]) * x_min.powi(-(n as i32)) < tol);
            if ok {
                return Ok(s);
            }
            if m >= 4096 {
                return Err(Error::Divergent(format!("Laurent series not converged at x = {x_min}")));
            }
            m *= 2;
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.system.t.abs().max(1.0)
    }

    /// Scaled residual `||W C_n - C_n (W + n I) - D_n|| / max(1, ||D_n||)`.
    pub fn recurrence_residual(&self, n: usize) -> f64 {
        let cn = self.coeffs[n];
        let r = self.w_inf * cn - cn * (self.w_inf + M2::identity() * c(n as f64)) - self.rhs[n];
        norm(&r) / norm(&self.rhs[n]).max(1.0)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(norm).collect()
    }

    /// Fundamental solution truncated after `m` terms.
    pub fn fundamental_truncated(&self, x: C64, m: usize) -> M2 {
        let inv = c(1.0) / x;
        let mut y = M2::zeros();
        let mut p = c(1.0);
        for cj in self.coeffs.iter().take(m + 1) {
            y += cj * p;
            p *= inv;
        }
        y * expm2(&(-self.w_inf * x.ln()))
    }

    /// Fundamental solution; errors when the tail estimate exceeds `1e-13`.
    pub fn fundamental(&self, x: C64) -> Result<M2> {
        let r = self.radius();
        if !(x.norm() > r) {
            return Err(Error::Divergent(format!("|x| = {} <= {r}", x.norm())));
        }
        let m = self.order();
        let tail = norm(&self.coeffs[m]) * x.norm().powi(-(m as i32)) / (1.0 - r / x.norm());
        if tail > 1e-13 {
            return Err(Error::Divergent(format!(
                "tail estimate {tail:.1e} at |x| = {}, increase M = {m}",
                x.norm()
            )));
        }
        Ok(self.fundamental_truncated(x, m))
    }

    pub fn phi(&self, x: C64, phi0: &V2) -> Result<V2> {
        Ok(self.fundamental(x)? * phi0)
    }

    /// `||Phi'(x) - A(x) Phi(x)|| / ||Phi(x)||` with `Phi'` by complex step
    /// (real system and real `Phi_0`) using the first `m` terms.
    pub fn ode_residual(&self, x: f64, phi0: &V2, m: usize) -> Result<f64> {
        if !self.system.is_real() || phi0.iter().any(|v| v.im != 0.0) {
            return invalid("complex-step residual needs a real system");
        }
        let h = 1e-30;
        let p = self.fundamental_truncated(c(x), m) * phi0;
        let ph = self.fundamental_truncated(C64::new(x, h), m) * phi0;
        let d = ph.map(|v| c(v.im / h));
        let res = d - self.system.coefficient(c(x)) * p;
        Ok(res.norm() / p.norm())
    }
}

/// Real eigenvalue `a > 0` of `W_inf` with the largest real part and a unit
/// eigenvector `v`, so that `x^{-W_inf} v = x^{-a} v` decays.
pub fn decaying_direction(w_inf: &M2) -> Result<(f64, V2)> {
    let [a, b] = eigenvalues2(w_inf);
    if a.im.abs() > 1e-14 || !(a.re > 0.0) || (a - b).norm() < 1e-12 {
        return Err(Error::NonDecaying(format!("W_inf eigenvalues {a}, {b}")));
    }
    let m = w_inf - M2::identity() * a;
    let v1 = V2::new(m[(0, 1)], -m[(0, 0)]);
    let v2 = V2::new(-m[(1, 1)], m[(1, 0)]);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let v = v / c(v.norm());
    Ok((a.re, v.map(|z| c(z.re))))
}

pub fn schlesinger_lhs(sys: &PviSystem, lambda: C64) -> M2 {
    let v = sys.velocity();
    v[0] / lambda + v[1] / (lambda - 1.0) + v[2] / (lambda - sys.t)
}

pub fn schlesinger_rhs(sys: &PviSystem, lambda: C64) -> M2 {
    let [w0, w1, wt] = sys.w;
    comm(&w0, &wt) / (lambda * (lambda - sys.t)) + comm(&w1, &wt) / ((lambda - 1.0) * (lambda - sys.t))
}

/// `max ||lhs - rhs||` over the samples.
pub fn schlesinger_residual(sys: &PviSystem, lambdas: &[C64]) -> f64 {
    lambdas
        .iter()
        .map(|&l| norm(&(schlesinger_lhs(sys, l) - schlesinger_rhs(sys, l))))
        .fold(0.0, f64::max)
}

/// Kernel `K(lambda, mu) = <J Phi(lambda), Phi(mu)> / (lambda - mu)` for the
/// decaying real solution.
#[derive(Debug, Clone)]
pub struct PviKernel {
    pub series: LaurentSeries,
    pub phi0: V2,
    /// Decay exponent `a` of `Phi ~ x^{-a}`.
    pub decay: f64,
    /// `V_0, V_1, V_t` with `J W_nu = V_nu^T diag(1, -1) V_nu`.
    pub v: [Matrix2<f64>; 3],
}

/// Six-vector `(V_0 Phi/lambda, V_1 Phi/(lambda - 1), V_t Phi/(lambda - t))`
/// paired with the signature `diag(1, -1, 1, -1, 1, -1)`.
pub const STACK_SIGNATURE: [f64; 6] = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];

impl PviKernel {
    /// Kernel whose series converges to `1e-17` at `x_min`.
    pub fn new(sys: &PviSystem, x_min: f64) -> Result<Self> {
        if !sys.is_real() {
            return invalid("the kernel needs a real system");
        }
        let series = LaurentSeries::converged_at(sys, x_min, 1e-17)?;
        let (decay, phi0) = decaying_direction(&series.w_inf)?;
        Self::from_parts(series, phi0, decay)
    }

    pub fn from_parts(series: LaurentSeries, phi0: V2, decay: f64) -> Result<Self> {
        let v = [
            jw_factor(&jw(&series.system.w[0])?)?,
            jw_factor(&jw(&series.system.w[1])?)?,
            jw_factor(&jw(&series.system.w[2])?)?,
        ];
        Ok(PviKernel { series, phi0, decay, v })
    }

    pub fn t(&self) -> f64 {
        self.series.system.t
    }

    pub fn phi(&self, x: f64) -> Result<Vector2<f64>> {
        Ok(self.series.phi(c(x), &self.phi0)?.map(|v| v.re))
    }

    fn phi_prime(&self, x: f64, p: &Vector2<f64>) -> Vector2<f64> {
        (self.series.system.coefficient(c(x)) * p.map(c)).map(|v| v.re)
    }

    /// `<J a, b>` with `J a = (-a_2, a_1)`.
    fn jform(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
        -a[1] * b[0] + a[0] * b[1]
    }

    /// `K(lambda, mu)`; on the diagonal `<J Phi'(lambda), Phi(lambda)>`.
    pub fn k(&self, lambda: f64, mu: f64) -> Result<f64> {
        let pl = self.phi(lambda)?;
        if lambda == mu {
            let d = self.phi_prime(lambda, &pl);
            return Ok(Self::jform(&d, &pl));
        }
        let pm = self.phi(mu)?;
        Ok(Self::jform(&pl, &pm) / (lambda - mu))
    }

    pub fn stacked(&self, lambda: f64) -> Result<[f64; 6]> {
        let p = self.phi(lambda)?;
        let t = self.t();
        let mut out = [0.0; 6];
        for (i, (den, v)) in [lambda, lambda - 1.0, lambda - t].iter().zip(&self.v).enumerate() {
            let q = v * p / *den;
            out[2 * i] = q[0];
            out[2 * i + 1] = q[1];
        }
        Ok(out)
    }

    /// Geometric panels on `(0, 2^40)` for the factorized integral.
    pub fn factor_grid() -> Result<QuadGrid> {
        let mut breaks = vec![0.0, 0.25, 0.5];
        let mut b: f64 = 1.0;
        while b <= 2f64.powi(40) {
            breaks.push(b);
            b *= 2.0;
        }
        panelled(&breaks, 20)
    }

    /// `int_0^inf <sigma phi(lambda + s), phi(mu + s)> ds`.
    pub fn k_factorized(&self, lambda: f64, mu: f64, grid: &QuadGrid) -> Result<f64> {
        let terms: Vec<Result<f64>> = par::map_slice(&grid.nodes, |&s| {
            let a = self.stacked(lambda + s)?;
            let b = self.stacked(mu + s)?;
            Ok((0..6).map(|i| STACK_SIGNATURE[i] * a[i] * b[i]).sum())
        });
        let mut acc = 0.0;
        for (v, w) in terms.into_iter().zip(&grid.weights) {
            acc += v? * w;
        }
        Ok(acc)
    }

    /// `<J W_t Phi(lambda), Phi(mu)> / ((lambda - t)(mu - t))`.
    pub fn dk_dt(&self, lambda: f64, mu: f64) -> Result<f64> {
        let t = self.t();
        let m = jw(&self.series.system.w[2])?;
        let pl = self.phi(lambda)?;
        let pm = self.phi(mu)?;
        Ok((m * pl).dot(&pm) / ((lambda - t) * (mu - t)))
    }

    /// `d/dt K` from the quotient rule with `dPhi/dt = -W_t Phi / (lambda - t)`.
    pub fn dk_dt_flow(&self, lambda: f64, mu: f64) -> Result<f64> {
        let t = self.t();
        let wt = self.series.system.w[2].map(|v| v.re);
        let pl = self.phi(lambda)?;
        let pm = self.phi(mu)?;
        let dl = -(wt * pl) / (lambda - t);
        let dm = -(wt * pm) / (mu - t);
        Ok((Self::jform(&dl, &pm) + Self::jform(&pl, &dm)) / (lambda - mu))
    }

    /// `d/dt K` by central differences along the Schlesinger flow, with the
    /// normalization at infinity and `Phi_0` held fixed.
    pub fn dk_dt_difference(&self, lambda: f64, mu: f64, h: f64) -> Result<f64> {
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            initial_step: h / 4.0,
            max_steps: 100_000,
        };
        let sys = &self.series.system;
        let m = self.series.order();
        let mut vals = [0.0; 2];
        for (k, s) in [h, -h].iter().enumerate() {
            let moved = sys.evolve(sys.t + s, &opts)?;
            let series = LaurentSeries::new(&moved, m)?;
            let kern = PviKernel {
                series,
                phi0: self.phi0,
                decay: self.decay,
                v: self.v,
            };
            vals[k] = kern.k(lambda, mu)?;
        }
        Ok((vals[0] - vals[1]) / (2.0 * h))
    }

    /// Singular values of `[dK/dt(lambda_i, mu_j)]`.
    pub fn dk_dt_singular_values(&self, lambdas: &[f64], mus: &[f64]) -> Result<Vec<f64>> {
        let mut m = CMat::zeros(lambdas.len(), mus.len());
        for (i, &l) in lambdas.iter().enumerate() {
            for (j, &u) in mus.iter().enumerate() {
                m[(i, j)] = c(self.dk_dt(l, u)?);
            }
        }
        let mut s = singular_values(&m);
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(s)
    }

    /// Partial integrals `int_{x0}^{x0 2^k} ||Phi||^2 / lambda` for `k = 1..=levels`.
    pub fn l2_partials(&self, x0: f64, levels: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(levels);
        let mut acc = 0.0;
        let mut a = x0;
        for _ in 0..levels {
            let g = composite_gauss_legendre(2, 20, a, 2.0 * a)?;
            for (&x, &w) in g.nodes.iter().zip(&g.weights) {
                acc += w * self.phi(x)?.norm_squared() / x;
            }
            out.push(acc);
            a *= 2.0;
        }
        Ok(out)
    }

    /// Geometric panels on `(x, x + 2^30)`, `nodes` per panel.
    pub fn tail_grid(x: f64, nodes: usize) -> Result<QuadGrid> {
        let mut breaks = vec![x];
        let mut w = 0.25;
        while w < 2f64.powi(30) {
            breaks.push(x + w);
            w *= 2.0;
        }
        panelled(&breaks, nodes)
    }

    /// `det(I - K)` on `(x, inf)` and the resolvent diagonal `R(x, x)` by Nyström.
    pub fn tau(&self, x: f64, grid: &QuadGrid) -> Result<(f64, f64)> {
        let n = grid.len();
        let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let mut pts = grid.nodes.clone();
        pts.push(x);
        let phis: Vec<Vector2<f64>> = par::map_slice(&pts, |&l| self.phi(l))
            .into_iter()
            .collect::<Result<_>>()?;
        let kv = |i: usize, j: usize| {
            if pts[i] == pts[j] {
                Self::jform(&self.phi_prime(pts[i], &phis[i]), &phis[i])
            } else {
                Self::jform(&phis[i], &phis[j]) / (pts[i] - pts[j])
            }
        };
        let rows: Vec<Vec<f64>> = par::map_range(n, |i| (0..n).map(|j| sw[i] * kv(i, j) * sw[j]).collect());
        let mut a = CMat::identity(n, n);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r.into_iter().enumerate() {
                a[(i, j)] -= v;
            }
        }
        let lu = Lu::new(&a, "I - K (PVI)")?;
        let col = CMat::from_fn(n, 1, |j, _| c(kv(j, n) * sw[j]));
        let row = CMat::from_fn(1, n, |_, j| c(kv(n, j) * sw[j]));
        let r = kv(n, n) + (row * lu.solve(&col))[(0, 0)].re;
        Ok((lu.det().re, r))
    }
}
