//! Sweep grids: value-list syntax and the flat `key=value` grid file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use casimir_shell::freeenergy::Method;
use serde::{Deserialize, Serialize};

/// Parses `a,b,c`, `log:start:stop:n` or `lin:start:stop:n`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let ranged = |rest: &str, log: bool| -> Result<Vec<f64>> {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            bail!("expected start:stop:count in '{spec}'");
        }
        let a: f64 = parts[0]
            .trim()
            .parse()
            .with_context(|| format!("bad start in '{spec}'"))?;
        let b: f64 = parts[1]
            .trim()
            .parse()
            .with_context(|| format!("bad stop in '{spec}'"))?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .with_context(|| format!("bad count in '{spec}'"))?;
        if n == 0 {
            bail!("count must be positive in '{spec}'");
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        if log && !(a > 0.0 && b > 0.0) {
            bail!("log range needs positive ends in '{spec}'");
        }
        Ok((0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    b
                } else if log {
                    a * (b / a).powf(s)
                } else {
                    a + (b - a) * s
                }
            })
            .collect())
    };
    if let Some(rest) = spec.strip_prefix("log:") {
        ranged(rest, true)
    } else if let Some(rest) = spec.strip_prefix("lin:") {
        ranged(rest, false)
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number '{s}'"))
            })
            .collect()
    }
}

pub fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub lambda0_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub entropy: bool,
    pub ratio_to: Option<Method>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.lambda0_values.is_empty() {
            bail!("lambda0 list is empty");
        }
        if self.t_values.is_empty() {
            bail!("t list is empty");
        }
        if self.methods.is_empty() {
            bail!("method list is empty");
        }
        for &v in self.lambda0_values.iter().chain(&self.t_values) {
            if !(v > 0.0 && v.is_finite()) {
                bail!("grid values must be positive and finite, got {v}");
            }
        }
        for tol in [self.rel_tol, self.abs_tol].into_iter().flatten() {
            if tol.is_nan() || tol <= 0.0 {
                bail!("tolerances must be positive, got {tol}");
            }
        }
        Ok(())
    }

    /// Number of rows a sweep over this grid produces.
    pub fn len(&self) -> usize {
        self.lambda0_values.len() * self.t_values.len() * self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in output order: lambda0, then t, then method.
    pub fn points(&self) -> Vec<(f64, f64, Method)> {
        let mut out = Vec::with_capacity(self.len());
        for &l in &self.lambda0_values {
            for &t in &self.t_values {
                for &m in &self.methods {
                    out.push((l, t, m));
                }
            }
        }
        out
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "lambda0" => self.lambda0_values = parse_values(value)?,
            "t" => self.t_values = parse_values(value)?,
            "method" | "methods" => self.methods = parse_methods(value)?,
            "entropy" => self.entropy = parse_bool(value)?,
            "ratio_to" => self.ratio_to = Some(value.trim().parse()?),
            "rel_tol" => self.rel_tol = Some(value.trim().parse()?),
            "abs_tol" => self.abs_tol = Some(value.trim().parse()?),
            _ => bail!("unknown grid key '{key}'"),
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut grid = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", n + 1))?;
            grid.set(k.trim(), v.trim())
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(grid)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading grid file {}", path.display()))?;
        Self::from_text(&text)
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("expected a boolean, got '{other}'"),
    }
}
