//! Continuous-time linear systems `(-A, B, C)` with diagonal `A`, their
//! Gramians, resolvents and the block Gelfand–Levitan solution.

use crate::error::{invalid, Result};
use crate::numkit::linalg::{self, c, CMat, Lu, C64};

/// Condition number above which a resolvent solve is refused.
pub const MAX_COND: f64 = 1e12;

/// `phi(x) = C exp(-xA) B` with `A = diag(lambdas)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub lambdas: Vec<C64>,
    /// `N x m`
    pub b: CMat,
    /// `p x N`
    pub c: CMat,
    /// Diagonal of the output signature `sigma`, entries `+-1`.
    pub signature: Vec<f64>,
}

/// Blocks of `G(x, y) = [[U, V], [T, zeta]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlBlocks {
    pub u: CMat,
    pub v: CMat,
    pub t: CMat,
    pub zeta: CMat,
}

impl GlBlocks {
    pub fn trace(&self) -> C64 {
        self.u.trace() + self.zeta.trace()
    }
}

impl Realization {
    pub fn new(lambdas: Vec<C64>, b: CMat, c: CMat, signature: Vec<f64>) -> Result<Self> {
        let n = lambdas.len();
        if b.nrows() != n || c.ncols() != n {
            return invalid(format!(
                "shape mismatch: {} exponents, B is {}x{}, C is {}x{}",
                n,
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            ));
        }
        if signature.len() != c.nrows() || signature.iter().any(|&s| s != 1.0 && s != -1.0) {
            return invalid("signature must be a +-1 vector matching the output dimension");
        }
        if let Some(l) = lambdas.iter().find(|l| !(l.re > 0.0)) {
            return invalid(format!("exponent {l} must have positive real part"));
        }
        Ok(Realization {
            lambdas,
            b,
            c,
            signature,
        })
    }

    /// Scalar system `phi(x) = sum_j c_j b_j exp(-lambda_j x)`.
    pub fn scalar(lambdas: Vec<C64>, b: Vec<C64>, c: Vec<C64>) -> Result<Self> {
        let n = lambdas.len();
        if b.len() != n || c.len() != n {
            return invalid("b and c must have one entry per exponent");
        }
        Realization::new(
            lambdas,
            CMat::from_column_slice(n, 1, &b),
            CMat::from_row_slice(1, n, &c),
            vec![1.0],
        )
    }

    pub fn order(&self) -> usize {
        self.lambdas.len()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    fn decay(&self, x: f64) -> Vec<C64> {
        self.lambdas.iter().map(|l| (-l * x).exp()).collect()
    }

    /// `phi(x)`, a `p x m` matrix.
    pub fn eval(&self, x: f64) -> CMat {
        let e = self.decay(x);
        let eb = CMat::from_fn(self.order(), self.inputs(), |j, k| e[j] * self.b[(j, k)]);
        &self.c * eb
    }

    /// `R_x = int_x^inf exp(-tA) B C exp(-tA) dt`.
    pub fn rx_matrix(&self, x: f64) -> Result<CMat> {
        if self.inputs() != self.outputs() {
            return invalid("R_x needs a square symbol (inputs == outputs)");
        }
        let bc = &self.b * &self.c;
        let n = self.order();
        let e = self.decay(x);
        Ok(CMat::from_fn(n, n, |j, k| {
            let s = self.lambdas[j] + self.lambdas[k];
            bc[(j, k)] * e[j] * e[k] / s
        }))
    }

    /// Controllability and observability Gramians `(L_x, Q_x)`.
    pub fn gramians(&self, x: f64) -> (CMat, CMat) {
        let n = self.order();
        let e = self.decay(x);
        let bb = &self.b * self.b.adjoint();
        let sig = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.outputs(),
            self.signature.iter().map(|&s| c(s)),
        ));
        let csc = self.c.adjoint() * sig * &self.c;
        let l = CMat::from_fn(n, n, |j, k| {
            let s = self.lambdas[j] + self.lambdas[k].conj();
            bb[(j, k)] * e[j] * e[k].conj() / s
        });
        let q = CMat::from_fn(n, n, |j, k| {
            let s = self.lambdas[j].conj() + self.lambdas[k];
            csc[(j, k)] * e[j].conj() * e[k] / s
        });
        (l, q)
    }

    /// `tau(x) = det(I - Q_x L_x)`.
    pub fn tau_from_gramians(&self, x: f64) -> Result<C64> {
        let (l, q) = self.gramians(x);
        let n = self.order();
        linalg::det(&(CMat::identity(n, n) - q * l), "I - QL")
    }

    /// `T_lambda(x, y) = -lambda C exp(-xA) (I + lambda R_x)^{-1} exp(-yA) B`.
    pub fn resolvent_kernel(&self, lam: C64, x: f64, y: f64) -> Result<CMat> {
        let n = self.order();
        let r = self.rx_matrix(x)?;
        let m = CMat::identity(n, n) + r * lam;
        let ey = self.decay(y);
        let rhs = CMat::from_fn(n, self.inputs(), |j, k| ey[j] * self.b[(j, k)]);
        let sol = linalg::solve_checked(&m, &rhs, MAX_COND, "I + lambda R_x")?;
        let ex = self.decay(x);
        let cx = CMat::from_fn(self.outputs(), n, |i, j| self.c[(i, j)] * ex[j]);
        Ok(cx * sol * (-lam))
    }

    /// Solution of the block Gelfand–Levitan equation at `(x, y)`.
    pub fn gl_block_solution(&self, x: f64, y: f64) -> Result<GlBlocks> {
        let n = self.order();
        let (l, q) = self.gramians(x);
        let id = CMat::identity(n, n);
        let ilq = Lu::new(&(&id - &l * &q), "I - LQ")?;
        let iql = Lu::new(&(&id - &q * &l), "I - QL")?;
        let cond = ilq.cond1(&(&id - &l * &q));
        if !(cond <= MAX_COND) {
            return Err(crate::Error::NearSingular {
                context: "I - LQ",
                cond,
            });
        }
        let ex = self.decay(x);
        let ey = self.decay(y);
        let sig = self.signature.clone();
        // C exp(-xA), p x N
        let cx = CMat::from_fn(self.outputs(), n, |i, j| self.c[(i, j)] * ex[j]);
        // exp(-yA) B, N x m
        let by = CMat::from_fn(n, self.inputs(), |j, k| ey[j] * self.b[(j, k)]);
        // exp(-yA^*) C^* sigma, N x p
        let cys = CMat::from_fn(n, self.outputs(), |j, i| ey[j].conj() * self.c[(i, j)].conj() * sig[i]);
        // exp(-yA^*) C^*, N x p
        let cy = CMat::from_fn(n, self.outputs(), |j, i| ey[j].conj() * self.c[(i, j)].conj());
        // B^* exp(-xA^*), m x N
        let bx = CMat::from_fn(self.inputs(), n, |k, j| self.b[(j, k)].conj() * ex[j].conj());
        let u = &cx * ilq.solve(&(&l * cys));
        let v = -(&cx * ilq.solve(&by));
        let t = -(&bx * iql.solve(&cy));
        let zeta = &bx * iql.solve(&(&q * &by));
        Ok(GlBlocks { u, v, t, zeta })
    }

    /// `f_x(u) = sum_l b_l c_l exp(-2 lambda_l x) / (u + lambda_l)` (scalar systems).
    pub fn f_x(&self, x: f64, u: C64) -> C64 {
        (0..self.order()).fold(c(0.0), |acc, l| {
            acc + self.b[(l, 0)] * self.c[(0, l)] * (-self.lambdas[l] * (2.0 * x)).exp() / (u + self.lambdas[l])
        })
    }

    fn f_x_prime(&self, x: f64, u: C64) -> C64 {
        (0..self.order()).fold(c(0.0), |acc, l| {
            let d = u + self.lambdas[l];
            acc - self.b[(l, 0)] * self.c[(0, l)] * (-self.lambdas[l] * (2.0 * x)).exp() / (d * d)
        })
    }

    /// Entry `(j, k)` of `R_x^2` in the integrable form
    /// `b_j e^{-x lambda_j} (f_x(lambda_j) - f_x(lambda_k)) / (lambda_k - lambda_j) c_k e^{-x lambda_k}`.
    pub fn rx_squared_entry(&self, x: f64, j: usize, k: usize) -> Result<C64> {
        if self.inputs() != 1 || self.outputs() != 1 {
            return invalid("integrable form of R_x^2 is for scalar systems");
        }
        if j >= self.order() || k >= self.order() {
            return invalid("index out of range");
        }
        let (u, t) = (self.lambdas[j], self.lambdas[k]);
        let quotient = if (u - t).norm() <= 1e-12 * u.norm().max(1.0) {
            -self.f_x_prime(x, u)
        } else {
            (self.f_x(x, u) - self.f_x(x, t)) / (t - u)
        };
        Ok(self.b[(j, 0)] * (-u * x).exp() * quotient * self.c[(0, k)] * (-t * x).exp())
    }
}
