use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Quadrature nodes and weights on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of `w_i f(x_i)`, accumulated in node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(0.0, |acc, (&x, &w)| acc + w * f(x))
    }

    /// Concatenate grids on adjacent intervals.
    pub fn concat(parts: &[QuadGrid]) -> QuadGrid {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            nodes.extend_from_slice(&p.nodes);
            weights.extend_from_slice(&p.weights);
        }
        let a = parts.first().map_or(0.0, |p| p.a);
        let b = parts.last().map_or(0.0, |p| p.b);
        QuadGrid { nodes, weights, a, b }
    }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence, `n >= 2`.
fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Legendre nodes and weights on `[-1, 1]`, `n >= 2`, by Newton iteration.
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadGrid> {
    if n == 0 {
        return invalid("Gauss-Legendre rule needs at least one node");
    }
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return invalid(format!("bad interval [{a}, {b}]"));
    }
    if n == 1 {
        return Ok(QuadGrid {
            nodes: vec![0.5 * (a + b)],
            weights: vec![b - a],
            a,
            b,
        });
    }
    let (x, w) = legendre_reference(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(QuadGrid {
        nodes: x.iter().map(|&t| c + h * t).collect(),
        weights: w.iter().map(|&v| h * v).collect(),
        a,
        b,
    })
}

/// Composite rule with `panels` equal panels of `n` nodes each.
pub fn composite_gauss_legendre(panels: usize, n: usize, a: f64, b: f64) -> Result<QuadGrid> {
    if panels == 0 {
        return invalid("composite rule needs at least one panel");
    }
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return invalid(format!("bad interval [{a}, {b}]"));
    }
    let h = (b - a) / panels as f64;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| if i == panels { b } else { a + h * i as f64 })
        .collect();
    panelled(&breaks, n)
}

/// Composite rule on the panels `[breaks[i], breaks[i+1]]`.
pub fn panelled(breaks: &[f64], n: usize) -> Result<QuadGrid> {
    if breaks.len() < 2 {
        return invalid("need at least two panel breaks");
    }
    if n == 0 {
        return invalid("Gauss-Legendre rule needs at least one node");
    }
    let (x, w) = if n == 1 {
        (vec![0.0], vec![2.0])
    } else {
        legendre_reference(n)
    };
    let mut nodes = Vec::with_capacity(n * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return invalid(format!("bad panel [{a}, {b}]"));
        }
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        nodes.extend(x.iter().map(|&t| c + h * t));
        weights.extend(w.iter().map(|&v| h * v));
    }
    Ok(QuadGrid {
        nodes,
        weights,
        a: breaks[0],
        b: breaks[breaks.len() - 1],
    })
}

/// Panel breaks on `[a, b]` refined geometrically towards `a`.
///
/// The smallest panel is `[a, a + (b-a) ratio^levels]`.
pub fn graded_breaks(a: f64, b: f64, levels: usize, ratio: f64) -> Vec<f64> {
    let mut out = vec![a];
    for k in (1..=levels).rev() {
        out.push(a + (b - a) * ratio.powi(k as i32));
    }
    out.push(b);
    out
}

/// Tail model `|K(x, y)| <= amplitude * exp(-decay_rate (x + y))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub decay_rate: f64,
    pub amplitude: f64,
    pub tail_tol: f64,
}

impl Truncation {
    pub fn new(decay_rate: f64, amplitude: f64) -> Self {
        Truncation {
            decay_rate,
            amplitude,
            tail_tol: 1e-14,
        }
    }

    /// Cut-off `L` with `amplitude * exp(-2 rate L) / (2 rate) < tail_tol`.
    pub fn cutoff(&self) -> Result<f64> {
        if !(self.decay_rate > 0.0 && self.decay_rate.is_finite()) {
            return invalid(format!("decay rate must be positive, got {}", self.decay_rate));
        }
        let amp = self.amplitude.abs().max(1e-300);
        let l = (amp / (2.0 * self.decay_rate * self.tail_tol)).ln() / (2.0 * self.decay_rate);
        Ok(l.max(1.0 / self.decay_rate))
    }
}

/// Panel layout on a truncated half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    pub nodes_per_panel: usize,
    pub panel_width: f64,
    pub panel_factor: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            nodes_per_panel: 64,
            panel_width: 8.0,
            panel_factor: 1,
        }
    }
}

impl GridPolicy {
    pub fn doubled(self) -> Self {
        GridPolicy {
            panel_factor: self.panel_factor * 2,
            ..self
        }
    }

    pub fn panels_for(&self, length: f64) -> usize {
        ((length / self.panel_width).ceil() as usize).max(1) * self.panel_factor
    }
}

/// Grid on `[0, L]` with `L` from the truncation model.
pub fn half_line_grid(trunc: &Truncation, policy: &GridPolicy) -> Result<QuadGrid> {
    let l = trunc.cutoff()?;
    composite_gauss_legendre(policy.panels_for(l), policy.nodes_per_panel, 0.0, l)
}
