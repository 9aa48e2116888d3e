use super::linalg::{CMat, Lu, C64};
use super::quad::QuadGrid;
use crate::error::{Error, Result};
use crate::par;

/// Symmetrized Nyström matrix `sqrt(w_i) K(x_i, x_j) sqrt(w_j)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub matrix: CMat,
    pub grid: QuadGrid,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `det(I + z K)`.
    pub fn det(&self, z: C64) -> Result<C64> {
        let n = self.dim();
        let m = CMat::identity(n, n) + &self.matrix * z;
        match Lu::new(&m, "fredholm determinant") {
            Ok(lu) => Ok(lu.det()),
            Err(Error::Singular { .. }) => Ok(C64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    /// Composition `K ∘ K` on the same grid.
    pub fn squared(&self) -> KernelMatrix {
        KernelMatrix {
            matrix: &self.matrix * &self.matrix,
            grid: self.grid.clone(),
        }
    }
}

/// Nyström discretization of `kernel` on `grid`.
pub fn kernel_matrix<F>(kernel: F, grid: &QuadGrid) -> Result<KernelMatrix>
where
    F: Fn(f64, f64) -> C64 + Sync + Send,
{
    let n = grid.len();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let rows = par::map_range(n, |i| {
        (0..n)
            .map(|j| kernel(grid.nodes[i], grid.nodes[j]) * (sw[i] * sw[j]))
            .collect::<Vec<C64>>()
    });
    for (i, row) in rows.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { i, j });
        }
    }
    let matrix = CMat::from_fn(n, n, |i, j| rows[i][j]);
    Ok(KernelMatrix {
        matrix,
        grid: grid.clone(),
    })
}

/// Hankel discretization `sqrt(w_i) phi(x_i + x_j) sqrt(w_j)`.
pub fn hankel_matrix<F>(phi: F, grid: &QuadGrid) -> Result<KernelMatrix>
where
    F: Fn(f64) -> C64 + Sync + Send,
{
    kernel_matrix(|x, y| phi(x + y), grid)
}

/// `det(I + z K)` for a kernel on `grid`.
pub fn fredholm_det<F>(kernel: F, grid: &QuadGrid, z: C64) -> Result<C64>
where
    F: Fn(f64, f64) -> C64 + Sync + Send,
{
    kernel_matrix(kernel, grid)?.det(z)
}
