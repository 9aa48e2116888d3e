use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Dense LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(a: &CMat, context: &'static str) -> Result<Lu> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "{context}: LU needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { context, column: k });
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn pivots(&self) -> Vec<C64> {
        (0..self.dim()).map(|k| self.lu[(k, k)]).collect()
    }

    /// Determinant as a product of pivots in row order.
    pub fn det(&self) -> C64 {
        let sign = if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.pivots().into_iter().fold(C64::new(sign, 0.0), |acc, p| acc * p)
    }

    /// `log det` as the sum of principal logs of the pivots.
    ///
    /// The imaginary part is a continuous branch along the pivot sequence,
    /// not reduced to `(-pi, pi]`.
    pub fn log_det(&self) -> C64 {
        let parity = if self.swaps.is_multiple_of(2) {
            0.0
        } else {
            std::f64::consts::PI
        };
        self.pivots()
            .into_iter()
            .fold(C64::new(0.0, parity), |acc, p| acc + p.ln())
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        let n = self.dim();
        let mut x = CMat::zeros(n, b.ncols());
        for c in 0..b.ncols() {
            for i in 0..n {
                x[(i, c)] = b[(self.perm[i], c)];
            }
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        self.solve(&CMat::identity(self.dim(), self.dim()))
    }

    /// One-norm condition number of the factored matrix `a`.
    pub fn cond1(&self, a: &CMat) -> f64 {
        norm1(a) * norm1(&self.inverse())
    }
}

pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn det(a: &CMat, context: &'static str) -> Result<C64> {
    if a.nrows() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    match Lu::new(a, context) {
        Ok(lu) => Ok(lu.det()),
        Err(Error::Singular { .. }) => Ok(C64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Solve `a x = b`, rejecting systems with condition number above `max_cond`.
pub fn solve_checked(a: &CMat, b: &CMat, max_cond: f64, context: &'static str) -> Result<CMat> {
    let lu = Lu::new(a, context)?;
    let cond = lu.cond1(a);
    if !(cond <= max_cond) {
        return Err(Error::NearSingular { context, cond });
    }
    Ok(lu.solve(b))
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(n: usize) -> CMat {
        CMat::from_fn(n, n, |i, j| {
            C64::new(
                ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 4.0 } else { 0.0 },
                ((i + 2 * j) % 3) as f64 * 0.5,
            )
        })
    }

    #[test]
    fn det_matches_nalgebra() {
        for n in 1..8 {
            let a = sample(n);
            let ours = det(&a, "test").unwrap();
            let reference = a.clone().determinant();
            assert!((ours - reference).norm() <= 1e-11 * reference.norm().max(1.0));
        }
    }

    #[test]
    fn log_det_exponentiates_to_det() {
        let a = sample(6);
        let lu = Lu::new(&a, "test").unwrap();
        assert!((lu.log_det().exp() - lu.det()).norm() < 1e-10 * lu.det().norm());
    }

    #[test]
    fn solve_and_inverse() {
        let a = sample(5);
        let lu = Lu::new(&a, "test").unwrap();
        let id = &a * lu.inverse();
        assert!((id - CMat::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let a = CMat::from_element(3, 3, c(1.0));
        match Lu::new(&a, "ones") {
            Err(Error::Singular { column, .. }) => assert_eq!(column, 1),
            other => panic!("expected singular, got {other:?}"),
        }
        assert_eq!(det(&a, "ones").unwrap(), c(0.0));
    }

    #[test]
    fn ill_conditioned_system_is_rejected() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0 + 1e-14)]);
        let b = CMat::from_element(2, 1, c(1.0));
        assert!(matches!(
            solve_checked(&a, &b, 1e12, "near"),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn hermitian_spectrum() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(2.0)]);
        let ev = hermitian_eigenvalues(&a);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-13);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-13);
    }
}
