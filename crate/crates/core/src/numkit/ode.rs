//! Adaptive Dormand–Prince 5(4) integrator for real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-14,
            initial_step: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<F>(f: &F, x0: f64, y0: &[f64], x1: f64, opts: &OdeOptions) -> Result<(Vec<f64>, OdeStats)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let mut stats = OdeStats::default();
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok((y0.to_vec(), stats));
    }
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut h = opts.initial_step.min(span);
    let mut k1 = f(x, &y);
    while (x1 - x) * dir > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at x = {x}")));
        }
        let last = h >= (x1 - x).abs();
        if last {
            h = (x1 - x).abs();
        }
        let s = dir * h;
        let k2 = f(x + C2 * s, &axpy(&y, s, &[(A21, &k1)]));
        let k3 = f(x + C3 * s, &axpy(&y, s, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * s, &axpy(&y, s, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * s,
            &axpy(&y, s, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + s,
            &axpy(&y, s, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y5 = axpy(&y, s, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + s, &y5);
        let mut err = 0.0f64;
        for i in 0..y.len() {
            let e = s * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite state near x = {x}")));
        }
        if err <= 1.0 {
            stats.accepted += 1;
            x = if last { x1 } else { x + s };
            y = y5;
            k1 = k7;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(Error::Integration(format!("step size underflow at x = {x}")));
        }
    }
    Ok((y, stats))
}

/// Integrate through the ordered checkpoints, returning the state at each.
pub fn integrate_through<F>(f: &F, x0: f64, y0: &[f64], points: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let mut out = Vec::with_capacity(points.len());
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut o = *opts;
    for &p in points {
        let (yn, _) = integrate(f, x, &y, p, &o)?;
        o.initial_step = opts.initial_step.max((p - x).abs() * 0.1);
        x = p;
        y = yn;
        out.push(y.clone());
    }
    Ok(out)
}
