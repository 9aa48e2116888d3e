use crate::args::{BesselArgs, BesselMethod, CauchyArgs, ExpArgs, HypergeomArgs, LameArgs, PviArgs};
use crate::error::{CliError, Tag};
use crate::output::{Cell, Table};
use num_complex::Complex;
use serde_json::{json, Value};
use taulab::expsymbol::{self, ExpSymbol};
use taulab::hardedge::{self, BesselParams, SignMode};
use taulab::hypergeom::{HgKernel, HgParams, HgSystem};
use taulab::lame::{self, LameSymbol};
use taulab::numkit::curve::log_derivative_fn;
use taulab::numkit::quad::GridPolicy;
use taulab::pvi::{PviKernel, PviParams};
use taulab::{cauchydet, par, TauCurve, C64};

const HG_RTOL: f64 = 1e-12;
const LAME_TOL: f64 = 1e-9;
const SIGMA_STEP: f64 = 1e-4;

/// Table plus what the manifest must record about how it was produced.
pub struct RunOutput {
    pub table: Table,
    pub tolerances: Value,
    pub truncation: Value,
    pub invariants: Value,
}

pub fn parse_complex(field: &str, i: usize, s: &str) -> Result<C64, CliError> {
    let t = s.trim();
    t.parse::<Complex<f64>>()
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--{field} item {}: cannot parse '{t}' as a complex number",
                i + 1
            ))
        })
}

fn parse_num(field: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--{field}: cannot parse '{}' as a number", s.trim())))
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let ts = match parts.as_slice() {
        [a, b, h] => {
            let (a, b, h) = (parse_num("grid", a)?, parse_num("grid", b)?, parse_num("grid", h)?);
            if !(h > 0.0) || b < a {
                return Err(CliError::Usage(format!("--grid {s}: need start <= stop and step > 0")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            (0..=n).map(|i| a + i as f64 * h).collect()
        }
        [_] => s
            .split(',')
            .map(|v| parse_num("grid", v))
            .collect::<Result<Vec<_>, _>>()?,
        _ => {
            return Err(CliError::Usage(format!(
                "--grid {s}: expected start:stop:step or a comma list"
            )))
        }
    };
    if ts.is_empty() {
        return Err(CliError::Usage("--grid is empty".into()));
    }
    Ok(ts)
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn curve_output(c: &TauCurve, tolerances: Value, truncation: Value, invariants: Value) -> RunOutput {
    RunOutput {
        table: Table::from_curve(c),
        tolerances,
        truncation,
        invariants,
    }
}

pub fn exp(a: &ExpArgs) -> Result<RunOutput, CliError> {
    if a.lambda.len() != a.xi.len() {
        return Err(CliError::Usage(format!(
            "--lambda has {} items but --xi has {}",
            a.lambda.len(),
            a.xi.len()
        )));
    }
    let lambdas = a
        .lambda
        .iter()
        .enumerate()
        .map(|(i, s)| parse_complex("lambda", i, s))
        .collect::<Result<Vec<_>, _>>()?;
    let xis =
        a.xi.iter()
            .enumerate()
            .map(|(i, s)| parse_complex("xi", i, s))
            .collect::<Result<Vec<_>, _>>()?;
    let ts = parse_grid(&a.grid)?;
    let n = lambdas.len();
    let sym = ExpSymbol::scalar(lambdas, xis).tag("exp")?;
    let c = expsymbol::tau_curve(&sym, &ts).tag("exp")?;
    Ok(curve_output(
        &c,
        json!({}),
        json!({ "finite_rank": n }),
        json!({ "self_adjoint": sym.is_self_adjoint() }),
    ))
}

pub fn bessel(a: &BesselArgs) -> Result<RunOutput, CliError> {
    let ts = parse_grid(&a.grid)?;
    let policy = GridPolicy::default();
    let p = BesselParams::new(a.nu, a.hill_size).tag("bessel")?;
    if a.method == BesselMethod::Series && a.nu != 0.0 {
        return Err(CliError::Usage(
            "bessel: the partition series is available for nu = 0 only".into(),
        ));
    }
    let f = |x: f64| -> taulab::Result<f64> {
        match a.method {
            BesselMethod::Series => hardedge::tau_partition_series(x, a.weight_cap, SignMode::Derived),
            BesselMethod::Hill => hardedge::tau_hill(&p, x, a.hill_size),
            BesselMethod::Oracle => hardedge::tau_oracle(a.nu, x, &policy),
        }
    };
    let rows = par::try_map_slice(&ts, |&x| -> taulab::Result<(C64, C64)> {
        let tau = f(x)?;
        let (lo, hi) = (f(x - SIGMA_STEP)?, f(x + SIGMA_STEP)?);
        let s = log_derivative_fn(
            |y| {
                if y < x {
                    lo
                } else if y > x {
                    hi
                } else {
                    tau
                }
            },
            x,
            SIGMA_STEP,
        )?;
        Ok((C64::new(tau, 0.0), C64::new(s, 0.0)))
    })
    .tag("bessel")?;
    let (taus, sigmas) = rows.into_iter().unzip();
    let c = TauCurve::new(ts, taus, sigmas).tag("bessel")?;
    let truncation = match a.method {
        BesselMethod::Series => json!({ "weight_cap": a.weight_cap }),
        BesselMethod::Hill => json!({ "hill_size": a.hill_size }),
        BesselMethod::Oracle => json!({
            "nodes_per_panel": policy.nodes_per_panel,
            "panel_width": policy.panel_width,
            "panel_factor": policy.panel_factor,
        }),
    };
    Ok(curve_output(
        &c,
        json!({ "sigma_step": SIGMA_STEP }),
        truncation,
        json!({ "method": a.method }),
    ))
}

pub fn lame(a: &LameArgs) -> Result<RunOutput, CliError> {
    let alpha = parse_complex("alpha", 0, &a.alpha)?;
    let ts = parse_grid(&a.grid)?;
    let sym = LameSymbol::new(a.k2, alpha, a.shift, a.truncation).tag("lame")?;
    let (c, m) = lame::tau_curve(&sym, &ts).tag("lame")?;
    let w = &sym.params;
    let beta = sym.beta;
    let mono = sym.monodromy();
    Ok(curve_output(
        &c,
        json!({ "truncation_settle": LAME_TOL }),
        json!({ "M": m, "M_start": a.truncation }),
        json!({
            "e": w.e,
            "g2": w.g2,
            "g3": w.g3,
            "K": w.kk,
            "K_prime": w.kkp,
            "beta": [beta.re, beta.im],
            "monodromy": [mono.re, mono.im],
        }),
    ))
}

pub fn cauchy(a: &CauchyArgs) -> Result<RunOutput, CliError> {
    let beta = parse_complex("beta", 0, &a.beta)?;
    if a.n.is_empty() {
        return Err(CliError::Usage("--N is empty".into()));
    }
    let rep = cauchydet::growth_check(beta.re, a.k, &a.n).tag("cauchy")?;
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n as i64),
                Cell::Float(r.log_d),
                Cell::Float(r.root),
                Cell::Float(r.gap),
                Cell::Float(rep.limit),
            ]
        })
        .collect();
    Ok(RunOutput {
        table: Table {
            header: vec!["N", "log_d", "root", "gap", "limit"],
            rows,
        },
        tolerances: json!({}),
        truncation: json!({ "N": a.n }),
        invariants: json!({
            "limit": rep.limit,
            "fitted_c": rep.fitted_c,
            "slope": rep.slope,
            "monotone": rep.monotone,
        }),
    })
}

fn triple(field: &str, v: &[f64]) -> Result<[f64; 3], CliError> {
    v.try_into()
        .map_err(|_| CliError::Usage(format!("--{field} needs exactly 3 values, got {}", v.len())))
}

pub fn pvi(a: &PviArgs) -> Result<RunOutput, CliError> {
    let p = PviParams::new(triple("theta", &a.theta)?, triple("z", &a.z)?, triple("u", &a.u)?, a.t).tag("pvi")?;
    let xs = parse_grid(&a.grid)?;
    let sys = p.system();
    let kern = PviKernel::new(&sys, min_of(&xs)).tag("pvi")?;
    let mut taus = Vec::with_capacity(xs.len());
    let mut sigmas = Vec::with_capacity(xs.len());
    for &x in &xs {
        let grid = PviKernel::tail_grid(x, a.nodes).tag("pvi")?;
        let (d, r) = kern.tau(x, &grid).tag("pvi")?;
        taus.push(C64::new(d, 0.0));
        sigmas.push(C64::new(r, 0.0));
    }
    let c = TauCurve::new(xs, taus, sigmas).tag("pvi")?;
    Ok(curve_output(
        &c,
        json!({ "laurent": 1e-17 }),
        json!({
            "laurent_order": kern.series.order(),
            "nodes_per_panel": a.nodes,
            "tail_extent": 2f64.powi(30),
        }),
        json!({ "pvi_constants": p.pvi_constants() }),
    ))
}

pub fn hypergeom(a: &HypergeomArgs) -> Result<RunOutput, CliError> {
    let p = HgParams::from_product(a.neg_ab, a.c).tag("hypergeom")?;
    let xs = parse_grid(&a.grid)?;
    let kern = HgKernel {
        system: HgSystem::with_start(p, a.lambda_start)
            .tag("hypergeom")?
            .with_tolerance(HG_RTOL),
    };
    let c = kern.tau_curve(&xs, a.nodes).tag("hypergeom")?;
    Ok(curve_output(
        &c,
        json!({ "ode_rtol": HG_RTOL }),
        json!({ "lambda_start": a.lambda_start, "nodes_per_panel": a.nodes }),
        json!({ "c0": p.c0, "c1": p.c1, "residue_exponent": p.residue_exponent() }),
    ))
}
