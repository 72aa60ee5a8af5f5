//! Default data sets for the seven figures.
//!
//! | id | content | file |
//! |----|---------|------|
//! | 1 | low-T bracket vs xi: closed form and arctan integral at alpha 0.1, 0.01 | `fig1.csv` |
//! | 2 | aF vs t, exact and lowT_closed, lambda0 in {0.5, 1, 2} | `fig2.csv` |
//! | 3 | aF / strong_lowT vs t, exact and lowT_closed, lambda0 in {0.5, 1, 2} | `fig3.csv` |
//! | 4 | aF / weak_lowT vs t, exact and lowT_closed, lambda0 in {1, 2, 4}e-4 | `fig4.csv` |
//! | 5 | aF / strong_lowT vs lambda0 at t in {0.025, 0.05, 0.1} | `fig5.csv` |
//! | 6 | exact / weak1 vs t for several lambda0 | `fig6.csv` |
//! | 7 | weak1 pi/lambda0 vs t with its low- and high-T forms | `fig7.csv` |

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use casimir_shell::freeenergy::{free_energy, lowt_bracket, FreeEnergyConfig, Method, ShellParams};
use rayon::prelude::*;

use crate::grid::{parse_values, SweepGrid};
use crate::sweep::{fmt_float, run_sweep, write_csv};

pub const FIGURE_IDS: std::ops::RangeInclusive<u32> = 1..=7;

/// Grid overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct FigureOverrides {
    pub lambda0: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub xi: Option<Vec<f64>>,
}

/// What a figure run produced.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub path: PathBuf,
    pub rows: usize,
    pub flagged: usize,
}

fn values(spec: &str) -> Vec<f64> {
    parse_values(spec).expect("built-in grid")
}

/// Sweep grid behind figures 2 to 6; `None` for the tabulated figures.
pub fn figure_grid(id: u32, ov: &FigureOverrides) -> Result<Option<SweepGrid>> {
    use Method::*;
    let (lambda0, t, methods, ratio_to) = match id {
        1 | 7 => return Ok(None),
        2 => ("0.5,1,2", "log:0.02:1:40", vec![Exact, LowTClosed], None),
        3 => (
            "0.5,1,2",
            "log:0.005:0.5:40",
            vec![Exact, LowTClosed],
            Some(StrongLowT),
        ),
        4 => (
            "1e-4,2e-4,4e-4",
            "log:0.002:0.1:40",
            vec![Exact, LowTClosed],
            Some(WeakLowT),
        ),
        5 => (
            "log:1e-4:10:40",
            "0.025,0.05,0.1",
            vec![Exact, LowTClosed],
            Some(StrongLowT),
        ),
        6 => (
            "1e-3,1e-2,0.1,0.5,1",
            "log:0.05:5:30",
            vec![Exact],
            Some(Weak1),
        ),
        _ => bail!("figure id must be 1..7, got {id}"),
    };
    let grid = SweepGrid {
        lambda0_values: ov.lambda0.clone().unwrap_or_else(|| values(lambda0)),
        t_values: ov.t.clone().unwrap_or_else(|| values(t)),
        methods,
        entropy: false,
        ratio_to,
        rel_tol: None,
        abs_tol: None,
    };
    grid.validate()?;
    Ok(Some(grid))
}

pub const FIG1_ALPHAS: [f64; 2] = [0.1, 0.01];

/// Figure 1 rows: xi, closed bracket, arctan-integral bracket at each alpha.
pub fn figure1_rows(xis: &[f64], cfg: &FreeEnergyConfig) -> Vec<(f64, f64, Vec<f64>, bool)> {
    xis.par_iter()
        .map(|&xi| {
            let mut flagged = false;
            let integrals = FIG1_ALPHAS
                .iter()
                .map(|&alpha| {
                    let lambda0 = 1.5 * (alpha / xi).powi(2);
                    let p = ShellParams {
                        lambda0,
                        t: alpha / (2.0 * PI),
                    };
                    let s = free_energy(&p, Method::LowTIntegral, cfg);
                    flagged |= !s.converged();
                    s.a_f / ((2.0 * lambda0 / 3.0).powi(2) / PI)
                })
                .collect();
            (xi, lowt_bracket(xi), integrals, flagged)
        })
        .collect()
}

/// Figure 7 rows: t, weak1 pi/lambda0 and the two limiting forms.
pub fn figure7_rows(ts: &[f64]) -> Vec<[f64; 4]> {
    ts.iter()
        .map(|&t| {
            let p = ShellParams { lambda0: 1.0, t };
            let weak = free_energy(&p, Method::Weak1, &FreeEnergyConfig::default()).a_f * PI;
            [t, weak, 2.0 / 9.0 * PI * PI * t * t, PI * PI * t * t / 18.0]
        })
        .collect()
}

fn table<W: std::io::Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt_float(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `fig<id>.csv` into `outdir`.
pub fn write_figure(
    id: u32,
    outdir: &Path,
    ov: &FigureOverrides,
    cfg: &FreeEnergyConfig,
    workers: usize,
) -> Result<FigureOutput> {
    std::fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
    let path = outdir.join(format!("fig{id}.csv"));
    let file =
        std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let out = std::io::BufWriter::new(file);
    let (rows, flagged) = match id {
        1 => {
            let xis = ov.xi.clone().unwrap_or_else(|| values("log:0.05:10:60"));
            if xis.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                bail!("xi values must be positive");
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.max(1))
                .build()?;
            let data = pool.install(|| figure1_rows(&xis, cfg));
            let flagged = data.iter().filter(|r| r.3).count();
            let rows: Vec<Vec<f64>> = data
                .into_iter()
                .map(|(xi, closed, ints, _)| {
                    let mut r = vec![xi, closed];
                    r.extend(ints);
                    r
                })
                .collect();
            table(
                out,
                &["xi", "closed", "integral_alpha_0.1", "integral_alpha_0.01"],
                &rows,
            )?;
            (rows.len(), flagged)
        }
        7 => {
            let ts = ov.t.clone().unwrap_or_else(|| values("log:0.01:2:60"));
            if ts.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                bail!("t values must be positive");
            }
            let rows: Vec<Vec<f64>> = figure7_rows(&ts).into_iter().map(Vec::from).collect();
            table(
                out,
                &["t", "weak1_scaled", "low_t_limit", "high_t_limit"],
                &rows,
            )?;
            (rows.len(), 0)
        }
        _ => {
            let grid = figure_grid(id, ov)?.expect("sweep figure");
            let rows = run_sweep(&grid, cfg, workers)?;
            write_csv(out, &rows, grid.ratio_to)?;
            (rows.len(), rows.iter().filter(|r| r.flagged()).count())
        }
    };
    Ok(FigureOutput {
        path,
        rows,
        flagged,
    })
}
