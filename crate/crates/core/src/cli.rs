//! Command-line front end.
//!
//! Every subcommand reads a JSON model config and writes its artifacts into
//! the output directory. Exit status: 0 on success, 1 for a bad config or
//! arguments, 2 when the model fails validation, 3 for a numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{
    call_rate, covered_call_rate, fixed_strike_limit, limit_smile_point, put_rate, GridSpec,
};
use crate::config::ModelConfig;
use crate::error::Error;
use crate::legendre::RateFunction;
use crate::limit_cgf::LimitCgf;
use crate::model::ModelCharacteristics;
use crate::par::{self, Exec};
use crate::pricer::{term_smile, PricingConfig, State};

pub const THREADS_ENV: &str = "AFFINE_SMILE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "affine-smile",
    version,
    about = "Large-maturity smiles of affine stochastic volatility models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Debug, Subcommand)]
pub enum CommandLine {
    /// Check the model assumptions and write validate.json.
    Validate(Flags),
    /// Write the limiting smile to limit_smile.csv.
    LimitSmile(Flags),
    /// Write finite-maturity smiles to term_smile.csv.
    TermSmile(Flags),
    /// Compare finite-maturity smiles with the limit in converge.csv.
    Converge(Flags),
    /// Write the option price decay rates to rates.csv.
    Rates(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Model config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Log-moneyness grid LO:HI:N.
    #[arg(long, default_value = "-0.1:0.1:81", allow_hyphen_values = true)]
    pub grid: GridArg,
    /// Comma-separated maturities in years.
    #[arg(long, default_value = "10,15", allow_hyphen_values = true)]
    pub maturities: MaturitiesArg,
    /// Damping of the Fourier transform.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_d: Option<f64>,
    /// Relative tolerance of the Riccati integrator.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg(pub GridSpec);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected LO:HI:N, got {s:?}"));
        }
        let lo = parts[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad LO {:?}: {e}", parts[0]))?;
        let hi = parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad HI {:?}: {e}", parts[1]))?;
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad N {:?}: {e}", parts[2]))?;
        Ok(GridArg(GridSpec::new(lo, hi, n)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaturitiesArg(pub Vec<f64>);

impl FromStr for MaturitiesArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad maturity {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MaturitiesArg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    LimitSmile,
    TermSmile,
    Converge,
    Rates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub grid: GridSpec,
    pub maturities: Vec<f64>,
    pub alpha_d: Option<f64>,
    pub tol: Option<f64>,
    pub exec: Exec,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let (command, f) = match cli.command {
            CommandLine::Validate(f) => (Command::Validate, f),
            CommandLine::LimitSmile(f) => (Command::LimitSmile, f),
            CommandLine::TermSmile(f) => (Command::TermSmile, f),
            CommandLine::Converge(f) => (Command::Converge, f),
            CommandLine::Rates(f) => (Command::Rates, f),
        };
        RunConfig {
            command,
            config: f.config,
            out: f.out,
            grid: f.grid.0,
            maturities: f.maturities.0,
            alpha_d: f.alpha_d,
            tol: f.tol,
            exec: Exec::Parallel,
        }
    }

    pub fn check(&self) -> Result<(), Failure> {
        let g = self.grid;
        if g.n < 1 {
            return Err(Failure::config("grid needs at least one point"));
        }
        if !(g.lo.is_finite() && g.hi.is_finite() && g.lo < g.hi) {
            return Err(Failure::config(format!(
                "grid requires finite LO < HI, got {}:{}",
                g.lo, g.hi
            )));
        }
        if self.maturities.is_empty() || !self.maturities.iter().all(|t| *t > 0.0 && t.is_finite())
        {
            return Err(Failure::config(format!(
                "maturities must be positive, got {:?}",
                self.maturities
            )));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Failure::config(format!(
                    "--tol must lie in (0, 1), got {tol}"
                )));
            }
        }
        if let Some(a) = self.alpha_d {
            if !a.is_finite() {
                return Err(Failure::config(format!(
                    "--alpha-d must be finite, got {a}"
                )));
            }
        }
        Ok(())
    }

    pub fn pricing(&self) -> PricingConfig {
        let mut cfg = PricingConfig {
            alpha_d: self.alpha_d,
            ..Default::default()
        };
        if let Some(tol) = self.tol {
            cfg.ode.rtol = tol;
        }
        cfg
    }
}

/// A failed run: process exit code and a diagnostic for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::config(e.to_string()),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

/// Sets the global thread pool size from `AFFINE_SMILE_THREADS`, if given.
pub fn configure_threads() -> Result<Exec, Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(Exec::Parallel);
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    if n == 0 {
        return Err(Failure::config(format!(
            "{THREADS_ENV} must be a positive integer"
        )));
    }
    if n == 1 {
        return Ok(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot size the thread pool: {e}")))?;
    Ok(Exec::Parallel)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Setup {
    config: ModelConfig,
    model: ModelCharacteristics,
    state: State,
}

impl Setup {
    fn header(&self, out: &mut String, rate: Option<&RateFunction>) {
        let _ = writeln!(
            out,
            "# model={} params_hash={}",
            self.model.id(),
            self.config.params_hash()
        );
        let _ = writeln!(out, "# x0={} v0={}", num(self.state.x0), num(self.state.v0));
        if let Some(r) = rate {
            let _ = writeln!(
                out,
                "# x_star={} x_tilde_star={}",
                num(r.x_star()),
                num(r.x_tilde_star())
            );
        }
    }
}

fn load(cfg: &RunConfig) -> Result<Setup, Failure> {
    let config = ModelConfig::load(&cfg.config)?;
    let model = config.to_model()?;
    let state = config.state(&model);
    Ok(Setup {
        config,
        model,
        state,
    })
}

fn validated_rate(setup: &Setup) -> Result<RateFunction, Failure> {
    let report = setup.model.validate();
    if !report.passed() {
        return Err(Failure::validation(format!(
            "model {} failed validation: {}",
            setup.model.id(),
            report.messages.join("; ")
        )));
    }
    let limit =
        LimitCgf::new(setup.model.clone()).map_err(|e| Failure::validation(e.to_string()))?;
    Ok(RateFunction::new(limit)?)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, body)
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn at_x(x: f64, e: Error) -> Failure {
    Failure::numerical(format!("x = {x}: {e}"))
}

fn limit_rows(
    rate: &RateFunction,
    grid: GridSpec,
    exec: Exec,
) -> Result<Vec<crate::asymptotics::LimitSmilePoint>, Failure> {
    par::map_slice(exec, &grid.points(), |&x| {
        limit_smile_point(rate, x).map_err(|e| at_x(x, e))
    })
    .into_iter()
    .collect()
}

fn validate(cfg: &RunConfig, setup: &Setup) -> Result<Vec<PathBuf>, Failure> {
    let report = setup.model.validate();
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    let path = write(&cfg.out, "validate.json", &body)?;
    if !report.passed() {
        return Err(Failure::validation(format!(
            "model {} failed validation: {}",
            setup.model.id(),
            report.messages.join("; ")
        )));
    }
    Ok(vec![path])
}

fn limit_smile_cmd(cfg: &RunConfig, setup: &Setup) -> Result<Vec<PathBuf>, Failure> {
    let rate = validated_rate(setup)?;
    let rows = limit_rows(&rate, cfg.grid, cfg.exec)?;
    let mut out = String::new();
    setup.header(&mut out, Some(&rate));
    out.push_str("x,sigma_inf,h_star,h_tilde_star,u_x,flags\n");
    for p in rows {
        let flags = if p.clamped { "clamped" } else { "ok" };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{flags}",
            num(p.x),
            num(p.sigma_inf),
            num(p.h_star),
            num(p.h_tilde_star),
            num(p.u_x)
        );
    }
    Ok(vec![write(&cfg.out, "limit_smile.csv", &out)?])
}

fn term_curves(cfg: &RunConfig, setup: &Setup) -> Result<Vec<(f64, Vec<f64>)>, Failure> {
    let pricing = cfg.pricing();
    cfg.maturities
        .iter()
        .map(|&t| {
            term_smile(&setup.model, setup.state, t, cfg.grid, &pricing, cfg.exec)
                .map(|c| (t, c.sigmas()))
                .map_err(|e| match e {
                    Error::Strip { .. } => Failure::config(e.to_string()),
                    _ => Failure::numerical(format!("t = {t}: {e}")),
                })
        })
        .collect()
}

fn term_smile_cmd(cfg: &RunConfig, setup: &Setup) -> Result<Vec<PathBuf>, Failure> {
    let rate = validated_rate(setup)?;
    let curves = term_curves(cfg, setup)?;
    let xs = cfg.grid.points();
    let mut out = String::new();
    setup.header(&mut out, Some(&rate));
    out.push_str("t,x,sigma_t\n");
    for (t, sig) in &curves {
        for (x, s) in xs.iter().zip(sig) {
            let _ = writeln!(out, "{},{},{}", num(*t), num(*x), num(*s));
        }
    }
    Ok(vec![write(&cfg.out, "term_smile.csv", &out)?])
}

const PLOT_SCRIPT: &str = r##"import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "converge.csv"
curves = defaultdict(list)
with open(path) as f:
    rows = csv.DictReader(line for line in f if not line.startswith("#"))
    for r in rows:
        curves[float(r["t"])].append((float(r["x"]), 1e4 * float(r["abs_err"])))

for t, pts in sorted(curves.items()):
    xs, ys = zip(*pts)
    plt.plot(xs, ys, label=f"t = {t:g}")
plt.xlabel("x")
plt.ylabel("|sigma_t(x) - sigma_inf(x)| (bp)")
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"##;

fn converge_cmd(cfg: &RunConfig, setup: &Setup) -> Result<Vec<PathBuf>, Failure> {
    let rate = validated_rate(setup)?;
    let limit = limit_rows(&rate, cfg.grid, cfg.exec)?;
    let curves = term_curves(cfg, setup)?;
    let mut out = String::new();
    setup.header(&mut out, Some(&rate));
    out.push_str("t,x,sigma_t,sigma_inf,abs_err\n");
    for (t, sig) in &curves {
        let mut sup: f64 = 0.0;
        for (p, s) in limit.iter().zip(sig) {
            let err = (s - p.sigma_inf).abs();
            sup = sup.max(err);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(*t),
                num(p.x),
                num(*s),
                num(p.sigma_inf),
                num(err)
            );
        }
        println!("t = {t}: sup |sigma_t - sigma_inf| = {:.2} bp", 1e4 * sup);
    }
    Ok(vec![
        write(&cfg.out, "converge.csv", &out)?,
        write(&cfg.out, "plot_converge.py", PLOT_SCRIPT)?,
    ])
}

fn rates_cmd(cfg: &RunConfig, setup: &Setup) -> Result<Vec<PathBuf>, Failure> {
    let rate = validated_rate(setup)?;
    let xs = cfg.grid.points();
    let rows = par::map_slice(cfg.exec, &xs, |&x| -> Result<[f64; 6], Failure> {
        let e = |err| at_x(x, err);
        Ok([
            x,
            put_rate(&rate, x).map_err(e)?,
            call_rate(&rate, x).map_err(e)?,
            covered_call_rate(&rate, x).map_err(e)?,
            rate.h_star(x).map_err(e)?,
            rate.rate_tilde(x).map_err(e)?,
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::new();
    setup.header(&mut out, Some(&rate));
    let _ = writeln!(
        out,
        "# fixed_strike_limit={}",
        num(fixed_strike_limit(&rate)?)
    );
    out.push_str("x,put_rate,call_rate,covered_call_rate,h_star,h_tilde_star\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| num(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(vec![write(&cfg.out, "rates.csv", &out)?])
}

/// Runs one command and returns the paths it wrote.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    cfg.check()?;
    let setup = load(cfg)?;
    match cfg.command {
        Command::Validate => validate(cfg, &setup),
        Command::LimitSmile => limit_smile_cmd(cfg, &setup),
        Command::TermSmile => term_smile_cmd(cfg, &setup),
        Command::Converge => converge_cmd(cfg, &setup),
        Command::Rates => rates_cmd(cfg, &setup),
    }
}

/// Runs one command, reporting failures on stderr; returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
