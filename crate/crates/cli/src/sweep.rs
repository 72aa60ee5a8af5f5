//! Sweep execution, CSV rendering and run manifests.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use casimir_shell::freeenergy::{entropy, free_energy, FreeEnergyConfig, Method, ShellParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::SweepGrid;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 10] = [
    "lambda0", "t", "alpha", "xi", "method", "aF", "aS", "err", "l_max", "flags",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda0: f64,
    pub t: f64,
    pub alpha: f64,
    pub xi: f64,
    pub method: Method,
    #[serde(rename = "aF")]
    pub a_f: f64,
    #[serde(rename = "aS")]
    pub a_s: Option<f64>,
    pub err: f64,
    pub err_s: Option<f64>,
    pub l_max: Option<u32>,
    pub flags: String,
    pub ratio: Option<f64>,
    pub failure: Option<String>,
}

impl SweepRow {
    pub fn flagged(&self) -> bool {
        self.flags != "ok"
    }
}

pub fn config_for(grid: &SweepGrid, base: &FreeEnergyConfig) -> FreeEnergyConfig {
    let mut cfg = *base;
    if let Some(r) = grid.rel_tol {
        cfg.quadrature.rel_tol = r;
    }
    if let Some(a) = grid.abs_tol {
        cfg.quadrature.abs_tol = a;
    }
    cfg
}

/// Evaluates one grid point.
pub fn evaluate_point(
    lambda0: f64,
    t: f64,
    method: Method,
    with_entropy: bool,
    ratio_to: Option<Method>,
    cfg: &FreeEnergyConfig,
) -> SweepRow {
    let params = ShellParams { lambda0, t };
    let sample = free_energy(&params, method, cfg);
    let mut flags = sample.flags;
    let mut failure = sample.failure.clone();
    let (a_s, err_s) = if with_entropy {
        let s = entropy(&params, method, None, cfg);
        flags.merge(s.flags);
        if failure.is_none() {
            failure = s.failure.clone();
        }
        (Some(s.a_s), Some(s.error_estimate))
    } else {
        (None, None)
    };
    let ratio = ratio_to.map(|r| {
        let reference = if r == method {
            sample.clone()
        } else {
            free_energy(&params, r, cfg)
        };
        flags.merge(reference.flags);
        sample.a_f / reference.a_f
    });
    SweepRow {
        lambda0,
        t,
        alpha: params.alpha(),
        xi: params.xi(),
        method,
        a_f: sample.a_f,
        a_s,
        err: sample.error_estimate,
        err_s,
        l_max: sample.l_max,
        flags: flags.to_string(),
        ratio,
        failure,
    }
}

/// Runs every grid point on a pool of `workers` threads. Rows come back in
/// grid order.
pub fn run_sweep(
    grid: &SweepGrid,
    base: &FreeEnergyConfig,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    let cfg = config_for(grid, base);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;
    let points = grid.points();
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|&(l, t, m)| evaluate_point(l, t, m, grid.entropy, grid.ratio_to, &cfg))
            .collect()
    }))
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], ratio_to: Option<Method>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    if let Some(r) = ratio_to {
        header.push(format!("ratio_to_{r}"));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            fmt_float(r.lambda0),
            fmt_float(r.t),
            fmt_float(r.alpha),
            fmt_float(r.xi),
            r.method.to_string(),
            fmt_float(r.a_f),
            opt(r.a_s, fmt_float),
            fmt_float(r.err),
            opt(r.l_max, |l| l.to_string()),
            r.flags.clone(),
        ];
        if ratio_to.is_some() {
            rec.push(opt(r.ratio, fmt_float));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: FreeEnergyConfig,
    pub grid: SweepGrid,
    pub samples: Vec<SweepRow>,
    pub wall_time_s: f64,
    pub workers: usize,
}

impl RunManifest {
    pub fn new(command: &str, config: FreeEnergyConfig, grid: SweepGrid, workers: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            grid,
            samples: Vec::new(),
            wall_time_s: 0.0,
            workers,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

/// Sweeps `grid`, writes the CSV to `csv_path` (or stdout) and the manifest
/// to `manifest_path` when given. Returns the rows.
pub fn sweep_to_files(
    grid: &SweepGrid,
    base: &FreeEnergyConfig,
    workers: usize,
    csv_path: Option<&Path>,
    manifest_path: Option<&Path>,
    command: &str,
) -> Result<Vec<SweepRow>> {
    let start = Instant::now();
    let rows = run_sweep(grid, base, workers)?;
    match csv_path {
        Some(p) => {
            let file =
                std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_csv(std::io::BufWriter::new(file), &rows, grid.ratio_to)?;
        }
        None => write_csv(std::io::stdout().lock(), &rows, grid.ratio_to)?,
    }
    if let Some(m) = manifest_path {
        let mut manifest = RunManifest::new(command, config_for(grid, base), grid.clone(), workers);
        manifest.samples = rows.clone();
        manifest.wall_time_s = start.elapsed().as_secs_f64();
        manifest.save(m)?;
    }
    Ok(rows)
}
