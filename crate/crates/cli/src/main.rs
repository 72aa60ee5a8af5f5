use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use casimir_shell::freeenergy::{FreeEnergyConfig, Method};
use casimir_shell::specfun::{self, EvalOptions, ModeIndex};
use casimir_shell::PrecisionPolicy;
use casimir_shell_cli::figures::{write_figure, FigureOverrides};
use casimir_shell_cli::grid::{parse_methods, parse_values, SweepGrid};
use casimir_shell_cli::sweep::{evaluate_point, fmt_float, sweep_to_files, RunManifest};
use clap::{Args, Parser, Subcommand};

const EXIT_FLAGGED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "casimir-shell",
    version,
    about = "Thermal TM Casimir free energy of a plasma shell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Tolerances {
    /// Relative tolerance for quadrature and partial-wave sums.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
}

impl Tolerances {
    fn config(&self) -> Result<FreeEnergyConfig> {
        let mut cfg = FreeEnergyConfig::default();
        if let Some(r) = self.rel_tol {
            cfg.quadrature.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            cfg.quadrature.abs_tol = a;
        }
        cfg.quadrature.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one (lambda0, t) point.
    Eval {
        #[arg(long)]
        lambda0: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "exact")]
        method: String,
        /// Also compute the entropy.
        #[arg(long)]
        entropy: bool,
        #[command(flatten)]
        tol: Tolerances,
        /// Append the sample to this manifest (created if missing).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Sweep a (lambda0, t, method) grid and write CSV.
    Sweep {
        /// Flat key=value grid file; flags override its entries.
        #[arg(long)]
        grid_file: Option<PathBuf>,
        /// Values as `a,b,c`, `log:a:b:n` or `lin:a:b:n`.
        #[arg(long)]
        lambda0: Option<String>,
        #[arg(long)]
        t: Option<String>,
        /// Comma-separated methods.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        entropy: bool,
        /// Add a ratio column against this method.
        #[arg(long)]
        ratio_to: Option<String>,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long)]
        workers: Option<usize>,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure.
    Figure {
        #[arg(long)]
        id: u32,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        lambda0: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        xi: Option<String>,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate one special function: s, e, s_prime, e_prime, f_h, psi_prime,
    /// cal_j, cal_y or f_h_imag.
    #[command(hide = true)]
    SpecfunEval {
        name: String,
        l: u32,
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda0: f64,
    },
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn parse_method(s: &str) -> Result<Method> {
    s.trim().parse::<Method>().map_err(|e| usage(e.to_string()))
}

fn run_eval(
    lambda0: f64,
    t: f64,
    method: &str,
    entropy: bool,
    tol: &Tolerances,
    manifest: Option<PathBuf>,
) -> Result<u8> {
    let method = parse_method(method)?;
    if !(lambda0 > 0.0 && lambda0.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(usage("lambda0 and t must be positive and finite"));
    }
    let cfg = tol.config().map_err(|e| usage(e.to_string()))?;
    let start = Instant::now();
    let row = evaluate_point(lambda0, t, method, entropy, None, &cfg);
    println!("lambda0 = {}", fmt_float(lambda0));
    println!("t       = {}", fmt_float(t));
    println!("method  = {method}");
    println!("aF      = {}", fmt_float(row.a_f));
    println!("err     = {}", fmt_float(row.err));
    if let (Some(s), Some(e)) = (row.a_s, row.err_s) {
        println!("aS      = {}", fmt_float(s));
        println!("err_aS  = {}", fmt_float(e));
    }
    if let Some(l) = row.l_max {
        println!("l_max   = {l}");
    }
    println!("flags   = {}", row.flags);
    if let Some(f) = &row.failure {
        println!("failure = {f}");
    }
    if let Some(path) = manifest {
        let grid = SweepGrid {
            lambda0_values: vec![lambda0],
            t_values: vec![t],
            methods: vec![method],
            entropy,
            ..Default::default()
        };
        let mut m = if path.exists() {
            RunManifest::load(&path)?
        } else {
            RunManifest::new(&command_line(), cfg, grid, 1)
        };
        m.samples.push(row.clone());
        m.wall_time_s += start.elapsed().as_secs_f64();
        m.save(&path)?;
    }
    Ok(if row.flagged() { EXIT_FLAGGED } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn run_sweep_cmd(
    grid_file: Option<PathBuf>,
    lambda0: Option<String>,
    t: Option<String>,
    method: Option<String>,
    entropy: bool,
    ratio_to: Option<String>,
    tol: &Tolerances,
    workers: Option<usize>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
) -> Result<u8> {
    let mut grid = match &grid_file {
        Some(p) => SweepGrid::from_file(p)?,
        None => SweepGrid::default(),
    };
    if let Some(v) = lambda0 {
        grid.lambda0_values = parse_values(&v).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(v) = t {
        grid.t_values = parse_values(&v).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(v) = method {
        grid.methods = parse_methods(&v).map_err(|e| usage(e.to_string()))?;
    }
    if entropy {
        grid.entropy = true;
    }
    if let Some(r) = ratio_to {
        grid.ratio_to = Some(parse_method(&r)?);
    }
    if tol.rel_tol.is_some() {
        grid.rel_tol = tol.rel_tol;
    }
    if tol.abs_tol.is_some() {
        grid.abs_tol = tol.abs_tol;
    }
    grid.validate().map_err(|e| usage(e.to_string()))?;
    let base = FreeEnergyConfig::default();
    let workers = workers.unwrap_or_else(default_workers);
    let rows = sweep_to_files(
        &grid,
        &base,
        workers,
        out.as_deref(),
        manifest.as_deref(),
        &command_line(),
    )?;
    let flagged = rows.iter().filter(|r| r.flagged()).count();
    if flagged > 0 {
        eprintln!("{flagged} of {} rows flagged", rows.len());
        Ok(EXIT_FLAGGED)
    } else {
        Ok(0)
    }
}

fn run_specfun(name: &str, l: u32, x: f64, lambda0: f64) -> Result<u8> {
    let opts = EvalOptions::default();
    let mode = || ModeIndex::new(l).map_err(|e| usage(e.to_string()));
    match name {
        "s" => println!("{}", fmt_float(specfun::riccati_s(l, x)?)),
        "e" => println!("{}", fmt_float(specfun::riccati_e(l, x)?)),
        "s_prime" => println!("{}", fmt_float(specfun::riccati_s_prime(l, x)?)),
        "e_prime" => println!("{}", fmt_float(specfun::riccati_e_prime(l, x)?)),
        "f_h" => println!("{}", fmt_float(specfun::f_h(l, x)?)),
        "psi_prime" => println!("{}", fmt_float(specfun::riccati_psi_prime(l, x)?)),
        "cal_j" => println!("{}", fmt_float(specfun::cal_j(mode()?, x, opts)?.value)),
        "cal_y" => println!("{}", fmt_float(specfun::cal_y(mode()?, x, opts)?.value)),
        "f_h_imag" => {
            let p = PrecisionPolicy::from_env().run(|prec| {
                specfun::f_h_imag_axis(mode()?, x, lambda0, EvalOptions::with_precision(prec))
                    .map_err(anyhow::Error::from)
            })?;
            println!("{},{}", fmt_float(p.value.re), fmt_float(p.value.im));
        }
        _ => return Err(usage(format!("unknown function '{name}'"))),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Eval {
            lambda0,
            t,
            method,
            entropy,
            tol,
            manifest,
        } => run_eval(lambda0, t, &method, entropy, &tol, manifest),
        Command::Sweep {
            grid_file,
            lambda0,
            t,
            method,
            entropy,
            ratio_to,
            tol,
            workers,
            out,
            manifest,
        } => run_sweep_cmd(
            grid_file, lambda0, t, method, entropy, ratio_to, &tol, workers, out, manifest,
        ),
        Command::Figure {
            id,
            out,
            lambda0,
            t,
            xi,
            tol,
            workers,
        } => {
            if !(1..=7).contains(&id) {
                return Err(usage(format!("figure id must be 1..7, got {id}")));
            }
            let parse = |v: Option<String>| -> Result<Option<Vec<f64>>> {
                v.map(|s| parse_values(&s).map_err(|e| usage(e.to_string())))
                    .transpose()
            };
            let ov = FigureOverrides {
                lambda0: parse(lambda0)?,
                t: parse(t)?,
                xi: parse(xi)?,
            };
            let cfg = tol.config().map_err(|e| usage(e.to_string()))?;
            let res = write_figure(id, &out, &ov, &cfg, workers.unwrap_or_else(default_workers))?;
            println!(
                "{} ({} rows, {} flagged)",
                res.path.display(),
                res.rows,
                res.flagged
            );
            Ok(if res.flagged > 0 { EXIT_FLAGGED } else { 0 })
        }
        Command::SpecfunEval {
            name,
            l,
            x,
            lambda0,
        } => run_specfun(&name, l, x, lambda0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let is_usage = e.downcast_ref::<UsageError>().is_some();
            eprintln!("error: {e:#}");
            if is_usage {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}
