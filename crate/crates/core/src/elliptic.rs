//! Jacobi and Weierstrass elliptic functions for the rectangular lattice
//! `2K Z + 2iK' Z` with `e1 - e3 = 1`.

use crate::error::{invalid, Error, Result};
use crate::numkit::linalg::{c, C64};
use std::f64::consts::PI;

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// Complete elliptic integral `K(m)`, parameter `m = k^2 in [0, 1)`.
pub fn ellip_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return invalid(format!("K(m) needs 0 <= m < 1, got {m}"));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - m).sqrt())))
}

/// `(sn, cn, dn)(u | m)` for real `u` by descending Landen transformation.
pub fn sncndn_real(u: f64, m: f64) -> (f64, f64, f64) {
    if m == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    if m == 1.0 {
        let s = 1.0 / u.cosh();
        return (u.tanh(), s, s);
    }
    let mut a = vec![1.0];
    let mut cs = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while cs.last().unwrap().abs() > 1e-16 && a.len() < 64 {
        let an = *a.last().unwrap();
        a.push(0.5 * (an + b));
        cs.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (cs[j] / a[j] * phi.sin()).asin());
    }
    let (s, co) = phi.sin_cos();
    (s, co, (1.0 - m * s * s).sqrt())
}

/// Numerators of `(sn, cn, dn)(x + iy | m)` over a common denominator.
#[derive(Debug, Clone, Copy)]
pub struct JacobiParts {
    pub sn: C64,
    pub cn: C64,
    pub dn: C64,
    pub den: f64,
}

/// Jacobi functions at complex argument via the real and imaginary
/// addition formulas.
pub fn jacobi_parts(z: C64, m: f64) -> JacobiParts {
    let (s, co, d) = sncndn_real(z.re, m);
    let (s1, c1, d1) = sncndn_real(z.im, 1.0 - m);
    JacobiParts {
        sn: C64::new(s * d1, co * d * s1 * c1),
        cn: C64::new(co * c1, -s * d * s1 * d1),
        dn: C64::new(d * c1 * d1, -m * s * co * s1),
        den: c1 * c1 + m * s * s * s1 * s1,
    }
}

pub fn sncndn(z: C64, m: f64) -> (C64, C64, C64) {
    let p = jacobi_parts(z, m);
    (p.sn / p.den, p.cn / p.den, p.dn / p.den)
}

/// Weierstrass functions with `e1 = (2 - k^2)/3`, `e2 = (2k^2 - 1)/3`,
/// `e3 = -(k^2 + 1)/3`, half-periods `omega1 = K`, `omega3 = iK'`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weierstrass {
    pub k2: f64,
    pub e: [f64; 3],
    pub g2: f64,
    pub g3: f64,
    pub kk: f64,
    pub kkp: f64,
    /// Nome `exp(-pi K'/K)`.
    pub q: f64,
    /// `zeta(omega1)`.
    pub eta1: f64,
    /// `zeta(omega3)`.
    pub eta3: C64,
}

impl Weierstrass {
    pub fn new(k2: f64) -> Result<Self> {
        if !(k2 > 0.0 && k2 < 1.0) {
            return invalid(format!("k^2 must lie in (0, 1), got {k2}"));
        }
        let kk = ellip_k(k2)?;
        let kkp = ellip_k(1.0 - k2)?;
        let q = (-PI * kkp / kk).exp();
        let mut s = 0.0;
        for n in 1..10_000 {
            let q2n = q.powi(2 * n);
            let term = n as f64 * q2n / (1.0 - q2n);
            s += term;
            if term < 1e-18 * s.max(1e-300) {
                break;
            }
        }
        let eta1 = PI * PI / (12.0 * kk) * (1.0 - 24.0 * s);
        // Legendre: eta1 omega3 - eta3 omega1 = i pi / 2
        let eta3 = (C64::new(0.0, eta1 * kkp) - C64::new(0.0, PI / 2.0)) / kk;
        Ok(Weierstrass {
            k2,
            e: [(2.0 - k2) / 3.0, (2.0 * k2 - 1.0) / 3.0, -(k2 + 1.0) / 3.0],
            g2: 4.0 * (k2 * k2 - k2 + 1.0) / 3.0,
            g3: 4.0 * (k2 - 2.0) * (2.0 * k2 - 1.0) * (k2 + 1.0) / 27.0,
            kk,
            kkp,
            q,
            eta1,
            eta3,
        })
    }

    fn omega3(&self) -> C64 {
        C64::new(0.0, self.kkp)
    }

    /// Split `z = z0 + 2m omega1 + 2n omega3` with `z0` in the central cell.
    fn reduce(&self, z: C64) -> (C64, i64, i64) {
        let m = (z.re / (2.0 * self.kk)).round();
        let n = (z.im / (2.0 * self.kkp)).round();
        let z0 = z - C64::new(2.0 * self.kk * m, 2.0 * self.kkp * n);
        (z0, m as i64, n as i64)
    }

    fn is_lattice_point(&self, z: C64) -> bool {
        let (z0, _, _) = self.reduce(z);
        z0.norm() <= 1e-14 * self.kk.max(1.0)
    }

    /// `wp(z) = e3 + 1 / sn(z | k^2)^2`.
    pub fn wp(&self, z: C64) -> Result<C64> {
        let p = jacobi_parts(z, self.k2);
        if p.sn.norm() == 0.0 || self.is_lattice_point(z) {
            return Err(Error::Pole(format!("wp at lattice point {z}")));
        }
        let ns = p.den / p.sn;
        Ok(c(self.e[2]) + ns * ns)
    }

    /// `wp'(z) = -2 cn dn / sn^3`.
    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        let p = jacobi_parts(z, self.k2);
        if p.sn.norm() == 0.0 || self.is_lattice_point(z) {
            return Err(Error::Pole(format!("wp' at lattice point {z}")));
        }
        let cs = p.cn / p.sn;
        let ds = p.dn / p.sn;
        let ns = p.den / p.sn;
        Ok(cs * ds * ns * (-2.0))
    }

    fn zeta_cell(&self, z: C64) -> C64 {
        let w1 = self.kk;
        let mut series = c(0.0);
        for n in 1..10_000 {
            let q2n = self.q.powi(2 * n);
            let term = (z * (n as f64 * PI / w1)).sin() * (q2n / (1.0 - q2n));
            series += term;
            if term.norm() < 1e-18 * series.norm().max(1e-300) {
                break;
            }
        }
        z * (self.eta1 / w1)
            + (z * (PI / (2.0 * w1))).cos() / (z * (PI / (2.0 * w1))).sin() * (PI / (2.0 * w1))
            + series * (2.0 * PI / w1)
    }

    fn ln_sigma_cell(&self, z: C64) -> C64 {
        let w1 = self.kk;
        let cosz = (z * (PI / w1)).cos();
        let mut acc = c(0.0);
        for n in 1..10_000 {
            let q2n = self.q.powi(2 * n);
            let term = (c(1.0) - cosz * (2.0 * q2n) + q2n * q2n).ln() - 2.0 * (1.0 - q2n).ln();
            acc += term;
            if term.norm() < 1e-18 * acc.norm().max(1e-300) {
                break;
            }
        }
        c((2.0 * w1 / PI).ln()) + z * z * (self.eta1 / (2.0 * w1)) + (z * (PI / (2.0 * w1))).sin().ln() + acc
    }

    /// Weierstrass `zeta(z)`.
    pub fn zeta(&self, z: C64) -> Result<C64> {
        if self.is_lattice_point(z) {
            return Err(Error::Pole(format!("zeta at lattice point {z}")));
        }
        let (z0, m, n) = self.reduce(z);
        Ok(self.zeta_cell(z0) + self.eta1 * (2 * m) as f64 + self.eta3 * (2 * n) as f64)
    }

    /// `log sigma(z)` on some branch; exponentiate for `sigma`.
    pub fn ln_sigma(&self, z: C64) -> Result<C64> {
        if self.is_lattice_point(z) {
            return Err(Error::Pole(format!("log sigma at lattice zero {z}")));
        }
        let (z0, m, n) = self.reduce(z);
        let w = C64::new(m as f64 * self.kk, 0.0) + self.omega3() * n as f64;
        let h = self.eta3 * n as f64 + m as f64 * self.eta1;
        let parity = (m + n + m * n).rem_euclid(2) as f64;
        Ok(self.ln_sigma_cell(z0) + h * (z0 + w) * 2.0 + C64::new(0.0, PI * parity))
    }

    pub fn sigma(&self, z: C64) -> C64 {
        self.ln_sigma(z).map_or(c(0.0), |l| l.exp())
    }

    /// Weierstrass product `z prod' (1 - z/w) exp(z/w + z^2/(2w^2))` over
    /// `|m|, |n| <= radius`; slowly convergent, for cross-checks only.
    pub fn sigma_lattice_product(&self, z: C64, radius: i64) -> C64 {
        let mut acc = z.ln();
        for m in -radius..=radius {
            for n in -radius..=radius {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = C64::new(2.0 * self.kk * m as f64, 2.0 * self.kkp * n as f64);
                let r = z / w;
                acc += (c(1.0) - r).ln() + r + r * r * 0.5;
            }
        }
        acc.exp()
    }
}
