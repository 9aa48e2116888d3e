//! Real special functions not covered by `statrs`.

use crate::error::{invalid, Result};

const SHIFT: f64 = 20.0;

/// Digamma `psi(x)` for `x > 0`: upward recurrence, then Stirling series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("digamma needs x > 0, got {x}"));
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < SHIFT {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    let series = r * (1.0 / 12.0 - r * (1.0 / 120.0 - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0)))));
    Ok(acc + y.ln() - 0.5 / y - series)
}

/// Trigamma `psi'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("trigamma needs x > 0, got {x}"));
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < SHIFT {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    let series = 1.0 / y
        + 0.5 * r
        + r / y * (1.0 / 6.0 - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r * (1.0 / 30.0 - r * 5.0 / 66.0))));
    Ok(acc + series)
}

/// `Gamma(x)` for real `x`, not a non-positive integer.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `1 / Gamma(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_values() {
        assert_relative_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-15);
        assert_relative_eq!(digamma(0.5).unwrap(), -EULER_GAMMA - 2.0 * 2f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(
            digamma(10.0).unwrap(),
            -EULER_GAMMA + (1..10).map(|k| 1.0 / k as f64).sum::<f64>(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn trigamma_values() {
        assert_relative_eq!(trigamma(1.0).unwrap(), PI * PI / 6.0, epsilon = 1e-14);
        assert_relative_eq!(trigamma(0.5).unwrap(), PI * PI / 2.0, epsilon = 1e-13);
        assert_relative_eq!(trigamma(3.0).unwrap(), PI * PI / 6.0 - 1.25, epsilon = 1e-14);
    }

    #[test]
    fn trigamma_is_derivative_of_digamma() {
        for &x in &[0.3, 1.7, 4.2, 25.0] {
            let h = 1e-5;
            let fd = (digamma(x + h).unwrap() - digamma(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(trigamma(x).unwrap(), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn rejects_non_positive() {
        assert!(digamma(0.0).is_err());
        assert!(trigamma(-1.5).is_err());
    }

    #[test]
    fn reciprocal_gamma() {
        assert_eq!(rgamma(-2.0), 0.0);
        assert_relative_eq!(rgamma(5.0), 1.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(rgamma(0.5), 1.0 / PI.sqrt(), epsilon = 1e-15);
    }
}
