//! Mode phase `arg[-x^2 - lambda0 f_H(l, ix)]` on the principal arctangent
//! branch, and the zeros of its real part where the phase jumps by `pi`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::{Evaluated, PrecisionPolicy};
use crate::specfun::{f_h_imag_axis, ComplexPoint, EvalOptions, ModeIndex, SpecFunError};

const LOG_CELLS: usize = 64;
const MAX_CELL_DEPTH: u32 = 24;
const ROOT_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("phase undefined at the origin of the complex plane")]
    Domain,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("l = {l}: two sign changes of the real part unresolved in [{lo}, {hi}]")]
    MeshResolution { l: u32, lo: f64, hi: f64 },
    #[error("l = {l}: real part is not positive near the origin (x = {x})")]
    NoPositiveStart { l: u32, x: f64 },
}

/// `arctan(im / re)` on `(-pi/2, pi/2]`; `re = 0` maps to `+pi/2`.
pub fn arg_branch(p: ComplexPoint) -> Result<f64, PhaseError> {
    if p.re == 0.0 {
        if p.im == 0.0 {
            return Err(PhaseError::Domain);
        }
        return Ok(FRAC_PI_2);
    }
    let v = (p.im / p.re).atan();
    if v <= -FRAC_PI_2 {
        Ok((-FRAC_PI_2).next_up())
    } else {
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePhaseTerm {
    pub l: ModeIndex,
    pub x: f64,
    pub value: f64,
    pub re: f64,
    pub im: f64,
    pub degraded_precision: bool,
}

fn term_from(
    mode: ModeIndex,
    x: f64,
    p: Evaluated<ComplexPoint>,
) -> Result<ModePhaseTerm, PhaseError> {
    let ComplexPoint { re, im } = p.value;
    let value = if im == 0.0 && re <= 0.0 {
        0.0
    } else {
        arg_branch(p.value)?
    };
    Ok(ModePhaseTerm {
        l: mode,
        x,
        value,
        re,
        im,
        degraded_precision: p.degraded,
    })
}

/// Phase at one precision setting. Zero coupling gives exactly 0.
pub fn mode_phase(
    mode: ModeIndex,
    x: f64,
    lambda0: f64,
    opts: EvalOptions,
) -> Result<ModePhaseTerm, PhaseError> {
    term_from(mode, x, f_h_imag_axis(mode, x, lambda0, opts)?)
}

/// Phase with automatic re-evaluation in extended precision when the
/// cancellation sentinel trips (or always extended, per `policy`).
pub fn mode_phase_auto(
    mode: ModeIndex,
    x: f64,
    lambda0: f64,
    policy: PrecisionPolicy,
) -> Result<ModePhaseTerm, PhaseError> {
    let p =
        policy.run(|prec| f_h_imag_axis(mode, x, lambda0, EvalOptions::with_precision(prec)))?;
    term_from(mode, x, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenominatorZero {
    pub x: f64,
    /// The imaginary part vanishes too; the point is a breakpoint only.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySet {
    pub l: ModeIndex,
    pub zeros: Vec<DenominatorZero>,
    pub brackets: Vec<(f64, f64)>,
}

impl SingularitySet {
    pub fn positions(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.x).collect()
    }
}

struct RealPart {
    mode: ModeIndex,
    lambda0: f64,
    policy: PrecisionPolicy,
}

impl RealPart {
    fn eval(&self, x: f64) -> Result<ComplexPoint, PhaseError> {
        let p = self.policy.run(|prec| {
            f_h_imag_axis(
                self.mode,
                x,
                self.lambda0,
                EvalOptions::with_precision(prec),
            )
        })?;
        Ok(p.value)
    }

    fn positive(&self, x: f64) -> Result<bool, PhaseError> {
        Ok(self.eval(x)?.re >= 0.0)
    }

    fn refine(
        &self,
        mut lo: f64,
        mut hi: f64,
        lo_positive: bool,
    ) -> Result<(f64, f64), PhaseError> {
        while hi - lo > ROOT_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.positive(mid)? == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, hi))
    }

    fn scan_cell(
        &self,
        a: f64,
        b: f64,
        sa: bool,
        sb: bool,
        depth: u32,
        out: &mut Vec<(f64, f64)>,
    ) -> Result<(), PhaseError> {
        let m = 0.5 * (a + b);
        let sm = self.positive(m)?;
        match (sa != sm, sm != sb) {
            (false, false) => Ok(()),
            (true, false) => {
                out.push(self.refine(a, m, sa)?);
                Ok(())
            }
            (false, true) => {
                out.push(self.refine(m, b, sm)?);
                Ok(())
            }
            (true, true) => {
                if depth >= MAX_CELL_DEPTH {
                    return Err(PhaseError::MeshResolution {
                        l: self.mode.l(),
                        lo: a,
                        hi: b,
                    });
                }
                self.scan_cell(a, m, sa, sm, depth + 1, out)?;
                self.scan_cell(m, b, sm, sb, depth + 1, out)
            }
        }
    }
}

/// Zeros of `re(x) = -x^2 + lambda0 (pi/2) J Y` in `(0, x_max]`.
///
/// Below `nu` the search uses 64 log-spaced cells starting near the origin
/// (where `re > 0`); above `nu` the cells are `pi/4` wide. Every cell is also
/// probed at its midpoint, and cells showing two sign changes are split.
pub fn find_denominator_zeros(
    mode: ModeIndex,
    lambda0: f64,
    x_max: f64,
    policy: PrecisionPolicy,
) -> Result<SingularitySet, PhaseError> {
    let rp = RealPart {
        mode,
        lambda0,
        policy,
    };
    let l = f64::from(mode.l());
    let nu = mode.nu();
    let mut brackets = Vec::new();
    if lambda0 > 0.0 && x_max > 0.0 {
        let re0 = lambda0 * l * (l + 1.0) / (2.0 * l + 1.0);
        let mut x_lo = 1e-3 * re0.sqrt().min(nu).min(x_max);
        let mut tries = 0;
        while !rp.positive(x_lo)? {
            x_lo *= 0.1;
            tries += 1;
            if tries > 12 {
                return Err(PhaseError::NoPositiveStart {
                    l: mode.l(),
                    x: x_lo,
                });
            }
        }
        let mut mesh = Vec::new();
        let split = nu.min(x_max);
        let ratio = (split / x_lo).ln() / LOG_CELLS as f64;
        for i in 0..=LOG_CELLS {
            mesh.push(x_lo * (ratio * i as f64).exp());
        }
        *mesh.last_mut().unwrap() = split;
        let mut k = 1.0;
        while nu + k * FRAC_PI_4 < x_max {
            mesh.push(nu + k * FRAC_PI_4);
            k += 1.0;
        }
        if x_max > nu {
            mesh.push(x_max);
        }
        let mut signs = Vec::with_capacity(mesh.len());
        for &x in &mesh {
            signs.push(rp.positive(x)?);
        }
        for i in 0..mesh.len() - 1 {
            rp.scan_cell(
                mesh[i],
                mesh[i + 1],
                signs[i],
                signs[i + 1],
                0,
                &mut brackets,
            )?;
        }
    }
    let mut zeros = Vec::with_capacity(brackets.len());
    for &(lo, hi) in &brackets {
        let x = 0.5 * (lo + hi);
        let im = rp.eval(x)?.im;
        zeros.push(DenominatorZero {
            x,
            degenerate: im <= 0.0,
        });
    }
    Ok(SingularitySet {
        l: mode,
        zeros,
        brackets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn m(l: u32) -> ModeIndex {
        ModeIndex::new(l).unwrap()
    }

    #[test]
    fn branch_examples() {
        let p = |re, im| ComplexPoint { re, im };
        assert_eq!(arg_branch(p(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(arg_branch(p(0.0, 1.0)).unwrap(), FRAC_PI_2);
        assert!((arg_branch(p(-1.0, 1.0)).unwrap() + PI / 4.0).abs() < 1e-15);
        assert_eq!(arg_branch(p(0.0, 0.0)), Err(PhaseError::Domain));
        let v = arg_branch(p(-1e-300, 1e300)).unwrap();
        assert!(v > -FRAC_PI_2 && v < -1.5);
    }

    #[test]
    fn zero_coupling_is_exactly_zero() {
        for l in [1, 4, 30] {
            for x in [1e-3, 0.7, 12.0] {
                let t = mode_phase(m(l), x, 0.0, EvalOptions::default()).unwrap();
                assert_eq!(t.value, 0.0);
            }
        }
    }

    #[test]
    fn lowest_zero_for_weak_coupling() {
        let lam = 1e-6;
        let z = find_denominator_zeros(m(1), lam, 1.0, PrecisionPolicy::Auto).unwrap();
        assert_eq!(z.zeros.len(), 1);
        let expect = (2.0 * lam / 3.0).sqrt();
        assert!((z.zeros[0].x / expect - 1.0).abs() < 1e-5);
        assert!(!z.zeros[0].degenerate);
    }

    #[test]
    fn phase_jumps_by_pi_across_zero() {
        let z = find_denominator_zeros(m(2), 3.0, 20.0, PrecisionPolicy::Auto).unwrap();
        assert!(!z.zeros.is_empty());
        for zero in &z.zeros {
            let f = |x| {
                mode_phase_auto(m(2), x, 3.0, PrecisionPolicy::Auto)
                    .unwrap()
                    .value
            };
            let jump = f(zero.x - 1e-6) - f(zero.x + 1e-6);
            assert!((jump - PI).abs() < 1e-4, "x0={} jump={jump}", zero.x);
        }
    }
}
