#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod output;

use args::{CheckArgs, Cli, Command, SUBCOMMANDS};
use clap::{CommandFactory, FromArgMatches};
use error::{CliError, Tag};
use output::{RunManifest, Table};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;
use taulab::acceptance::{self, CriterionReport, SuiteOptions, SUITE_BUDGET};

fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TAULAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("TAULAB_THREADS must be a positive integer, got '{v}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("TAULAB_THREADS: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn snapshot<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("argument structs serialize")
}

fn print_reports(reports: &[CriterionReport]) {
    for r in reports {
        eprintln!("{}", r.line());
    }
}

fn run_checks(suite: &str, opts: &SuiteOptions) -> Result<(Vec<CriterionReport>, f64), CliError> {
    let start = Instant::now();
    let reports = acceptance::run_suite(suite, opts).tag("check")?;
    print_reports(&reports);
    Ok((reports, start.elapsed().as_secs_f64()))
}

fn check(a: &CheckArgs, out: Option<&Path>, command_line: Vec<String>) -> Result<(), CliError> {
    if let Some(t) = a.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let opts = SuiteOptions {
        seed: a.seed,
        tol: a.tol,
    };
    let (reports, total) = run_checks(&a.suite, &opts)?;
    let within_budget = total <= SUITE_BUDGET;
    let passed = within_budget && reports.iter().all(|r| r.passed);
    let verdict = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command_line": command_line,
        "suite": a.suite,
        "seed": a.seed,
        "tol_override": a.tol,
        "threads": threads(),
        "parallel": cfg!(feature = "parallel"),
        "total_s": total,
        "budget_s": SUITE_BUDGET,
        "within_budget": within_budget,
        "passed": passed,
        "failed": reports.iter().filter(|r| !r.passed).map(|r| r.id).collect::<Vec<_>>(),
        "criteria": reports,
    });
    match out {
        Some(p) => output::write_json(p, &verdict)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&verdict).expect("verdict serializes")
        ),
    }
    eprintln!(
        "{} criteria, {} failed, {total:.1}s of {SUITE_BUDGET:.0}s",
        reports.len(),
        reports.iter().filter(|r| !r.passed).count()
    );
    if passed {
        Ok(())
    } else if !within_budget {
        Err(CliError::Check(format!("suite exceeded the {SUITE_BUDGET:.0}s budget")))
    } else {
        Err(CliError::Check("acceptance failures".into()))
    }
}

fn dispatch(cli: Cli, command_line: Vec<String>, config_file: Option<Value>) -> Result<(), CliError> {
    let start = Instant::now();
    let name = cli.command.name();
    let (res, check_flag, config) = match &cli.command {
        Command::Check(a) => return check(a, cli.out.as_deref(), command_line),
        Command::Exp(a) => (commands::exp(a), a.check, snapshot(a)),
        Command::Bessel(a) => (commands::bessel(a), a.check, snapshot(a)),
        Command::Lame(a) => (commands::lame(a), a.check, snapshot(a)),
        Command::Cauchy(a) => (commands::cauchy(a), a.check, snapshot(a)),
        Command::Pvi(a) => (commands::pvi(a), a.check, snapshot(a)),
        Command::Hypergeom(a) => (commands::hypergeom(a), a.check, snapshot(a)),
    };
    let run = res?;
    run.table.check_finite()?;
    let checks = if check_flag {
        Some(run_checks(name, &SuiteOptions::default())?.0)
    } else {
        None
    };
    let checks_passed = checks.as_ref().map(|c| c.iter().all(|r| r.passed));
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        command_line,
        subcommand: name,
        config,
        config_file,
        tolerances: run.tolerances,
        truncation: run.truncation,
        invariants: run.invariants,
        threads: threads(),
        parallel: cfg!(feature = "parallel"),
        wall_time_s: start.elapsed().as_secs_f64(),
        checks_passed,
        checks,
        output: cli.out.clone(),
    };
    write_outputs(&run.table, &manifest, cli.out.as_deref())?;
    match checks_passed {
        Some(false) => Err(CliError::Check(format!("{name}: acceptance failures"))),
        _ => Ok(()),
    }
}

/// CSV to `out` (manifest beside it) or to stdout (manifest dropped).
fn write_outputs(table: &Table, manifest: &RunManifest, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            table.write(std::fs::File::create(p)?)?;
            output::write_json(&output::manifest_path(p), manifest)
        }
        None => table.write(std::io::stdout().lock()),
    }
}

fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let fail = |e: CliError| {
        eprintln!("taulab: {e}");
        e.exit_code()
    };
    if let Err(e) = init_threads() {
        return fail(e);
    }
    let (expanded, config_file) = match config::expand(argv.clone()) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let mut cmd = Cli::command();
    for name in SUBCOMMANDS {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    let parsed = cmd
        .try_get_matches_from(&expanded)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, argv, config_file) {
        Ok(()) => 0,
        Err(e) => fail(e),
    }
}

fn main() {
    std::process::exit(run());
}
