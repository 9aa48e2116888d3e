//! Quadrature, dense complex linear algebra and Fredholm determinants.

pub mod curve;
pub mod fredholm;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod special;

pub use curve::{log_derivative_fn, TauCurve};
pub use fredholm::{fredholm_det, hankel_matrix, kernel_matrix, KernelMatrix};
pub use linalg::{CMat, Lu, C64};
pub use quad::{composite_gauss_legendre, gauss_legendre, half_line_grid, panelled, GridPolicy, QuadGrid, Truncation};
