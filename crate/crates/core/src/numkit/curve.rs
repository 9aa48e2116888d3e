use super::linalg::C64;
use crate::error::{invalid, Error, Result};
use serde::Serialize;

/// Samples of `tau(t)` and `sigma(t) = d/dt log tau(t)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauCurve {
    pub ts: Vec<f64>,
    pub taus: Vec<C64>,
    pub sigmas: Vec<C64>,
}

impl TauCurve {
    pub fn new(ts: Vec<f64>, taus: Vec<C64>, sigmas: Vec<C64>) -> Result<Self> {
        if ts.len() != taus.len() || ts.len() != sigmas.len() {
            return invalid("curve columns differ in length");
        }
        if ts.windows(2).any(|p| p[1] <= p[0]) {
            return invalid("curve abscissae must be strictly increasing");
        }
        Ok(TauCurve { ts, taus, sigmas })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// True when every imaginary part is below `tol` relative to the modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        self.taus
            .iter()
            .chain(&self.sigmas)
            .all(|z| z.im.abs() <= tol * z.norm().max(1.0))
    }

    /// Three-point derivative of `log tau` at the sample `t`.
    ///
    /// `t` must be an interior sample; the stencil uses its two neighbours
    /// and works for non-uniform spacing.
    pub fn log_derivative(&self, t: f64) -> Result<C64> {
        let i = self
            .ts
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| Error::InvalidInput(format!("t = {t} is not a sample")))?;
        if i == 0 || i + 1 == self.ts.len() {
            return invalid(format!("t = {t} is not an interior sample"));
        }
        let (t0, t1, t2) = (self.ts[i - 1], self.ts[i], self.ts[i + 1]);
        let taus = [self.taus[i - 1], self.taus[i], self.taus[i + 1]];
        let real = taus.iter().all(|z| z.im == 0.0);
        for (k, z) in taus.iter().enumerate() {
            if (real && z.re <= 0.0) || z.norm() == 0.0 {
                return Err(Error::LogUndefined(format!(
                    "tau({}) = {} is not positive",
                    self.ts[i - 1 + k],
                    z
                )));
            }
        }
        // logs relative to the centre keep the branch local
        let l0 = (taus[0] / taus[1]).ln();
        let l2 = (taus[2] / taus[1]).ln();
        let (h0, h1) = (t1 - t0, t2 - t1);
        Ok(-l0 * (h1 / (h0 * (h0 + h1))) + l2 * (h0 / (h1 * (h0 + h1))))
    }
}

/// Centered difference of `log f` at `t` with step `h`.
pub fn log_derivative_fn<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> Result<f64> {
    let (a, m, b) = (f(t - h), f(t), f(t + h));
    if a <= 0.0 || b <= 0.0 || m <= 0.0 {
        return Err(Error::LogUndefined(format!(
            "non-positive value in stencil around t = {t}"
        )));
    }
    Ok((b.ln() - a.ln()) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn curve<F: Fn(f64) -> f64>(f: F, ts: &[f64]) -> TauCurve {
        let taus = ts.iter().map(|&t| C64::new(f(t), 0.0)).collect();
        TauCurve::new(ts.to_vec(), taus, vec![C64::new(0.0, 0.0); ts.len()]).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let h = 1e-4;
        let c = curve(|t| (-t).exp(), &[1.0 - h, 1.0, 1.0 + h]);
        assert_relative_eq!(c.log_derivative(1.0).unwrap().re, -1.0, epsilon = 1e-8);
    }

    #[test]
    fn rank_one_tau_at_origin() {
        let h = 1e-4;
        let c = curve(|t| 1.0 - (-2.0 * t).exp() / 2.0, &[-h, 0.0, h]);
        assert_relative_eq!(c.log_derivative(0.0).unwrap().re, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn constant_curve_has_zero_derivative() {
        let c = curve(|_| 3.0, &[0.0, 0.5, 1.5]);
        assert_eq!(c.log_derivative(0.5).unwrap().re, 0.0);
    }

    #[test]
    fn non_positive_tau_is_rejected() {
        let c = curve(|t| t, &[-1.0, 0.0, 1.0]);
        assert!(matches!(c.log_derivative(0.0), Err(Error::LogUndefined(_))));
        assert!(log_derivative_fn(|t| t, 0.0, 0.1).is_err());
    }

    #[test]
    fn boundary_sample_is_rejected() {
        let c = curve(|t| 1.0 + t, &[0.0, 1.0, 2.0]);
        assert!(c.log_derivative(0.0).is_err());
    }

    #[test]
    fn non_uniform_stencil_exact_for_quadratic_logs() {
        let c = curve(|t| (t * t).exp(), &[0.7, 1.0, 1.6]);
        assert_relative_eq!(c.log_derivative(1.0).unwrap().re, 2.0, epsilon = 1e-12);
    }
}
