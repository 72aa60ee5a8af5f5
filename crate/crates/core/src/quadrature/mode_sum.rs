//! Partial-wave sums `sum_{l >= 1} (2l + 1) term(l)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuadratureResult;

/// A per-mode contribution: a value with an optional error bound.
pub trait SumTerm {
    fn value(&self) -> f64;
    fn error(&self) -> f64 {
        0.0
    }
    fn converged(&self) -> bool {
        true
    }
}

impl SumTerm for f64 {
    fn value(&self) -> f64 {
        *self
    }
}

impl SumTerm for QuadratureResult {
    fn value(&self) -> f64 {
        self.value
    }
    fn error(&self) -> f64 {
        self.error_estimate
    }
    fn converged(&self) -> bool {
        self.converged
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSumConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// No stopping test before this `l`.
    pub l_min_floor: u32,
    pub l_hard_cap: u32,
}

impl Default for ModeSumConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            l_min_floor: 10,
            l_hard_cap: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSumResult<T> {
    pub value: f64,
    pub error_estimate: f64,
    pub l_max: u32,
    /// The stopping test was met and every term reported convergence.
    pub converged: bool,
    /// Terms for `l = 1..=l_max`.
    pub terms: Vec<T>,
}

const NEGLIGIBLE: f64 = 1e-3;

fn tail_bound(last: [f64; 3], target: f64) -> Option<f64> {
    let [a1, a2, a3] = last;
    if a1 <= NEGLIGIBLE * target && a2 <= NEGLIGIBLE * target && a3 <= NEGLIGIBLE * target {
        return Some(a3);
    }
    if a3 < a2 && a2 < a1 {
        let r = (a3 / a2).max(a2 / a1);
        if r < 1.0 {
            return Some(a3 * r / (1.0 - r));
        }
    }
    None
}

/// Sums `(2l + 1) term(l)` from `l = 1` until the geometric extrapolation of
/// the last three terms falls below the tolerance (never before
/// `l_min_floor`). Terms are evaluated in parallel batches and accumulated in
/// `l` order, so the result does not depend on the thread count.
pub fn mode_sum<T, E, F>(term: F, config: &ModeSumConfig) -> Result<ModeSumResult<T>, E>
where
    T: SumTerm + Send,
    E: Send,
    F: Fn(u32) -> Result<T, E> + Sync,
{
    let floor = config.l_min_floor.max(3).min(config.l_hard_cap);
    let batch = (2 * rayon::current_num_threads()).max(4) as u32;
    let mut terms: Vec<T> = Vec::new();
    let mut weighted: Vec<f64> = Vec::new();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut err = 0.0;
    let mut next = 1u32;
    let mut tail = None;
    'outer: while next <= config.l_hard_cap {
        let hi = if next < floor {
            floor
        } else {
            (next + batch - 1).min(config.l_hard_cap)
        };
        let computed: Vec<Result<T, E>> = (next..=hi).into_par_iter().map(&term).collect();
        for (l, t) in (next..=hi).zip(computed) {
            let t = t?;
            let w = f64::from(2 * l + 1);
            let v = w * t.value();
            let s = sum + v;
            comp += if sum.abs() >= v.abs() {
                (sum - s) + v
            } else {
                (v - s) + sum
            };
            sum = s;
            err += w * t.error();
            weighted.push(v.abs());
            terms.push(t);
            if l >= floor {
                let n = weighted.len();
                let last = [weighted[n - 3], weighted[n - 2], weighted[n - 1]];
                let target = (config.rel_tol * (sum + comp).abs()).max(config.abs_tol);
                if let Some(b) = tail_bound(last, target).filter(|&b| b < target) {
                    tail = Some(b);
                    break 'outer;
                }
            }
        }
        next = hi + 1;
    }
    let l_max = terms.len() as u32;
    let converged = tail.is_some() && terms.iter().all(SumTerm::converged);
    let error_estimate = err + tail.unwrap_or_else(|| weighted.last().copied().unwrap_or(0.0));
    Ok(ModeSumResult {
        value: sum + comp,
        error_estimate,
        l_max,
        converged,
        terms,
    })
}
