//! The full thermal integral
//! `a F = -(1/pi) sum_l (2l+1) int_0^inf dx phase_l(x) / (e^{2 pi x/alpha} - 1)`.
//!
//! Each partial wave is integrated separately, with its own phase jumps as
//! principal-value points and forced panels every `pi/2` above `x = nu`;
//! the weighted integrals are then summed over `l`.

use std::f64::consts::PI;

use crate::phase::{find_denominator_zeros, mode_phase_auto};
use crate::quadrature::{
    integrate_bose, mode_sum, IntegrationLayout, ModeSumConfig, QuadratureConfig, QuadratureResult,
};
use crate::real::{Evaluated, PrecisionPolicy};
use crate::specfun::ModeIndex;

use super::{
    FreeEnergyConfig, FreeEnergyError, FreeEnergySample, Method, SampleFlags, ShellParams,
};

/// `int_0^inf dx phase_l(x) / (e^{2 pi x / alpha} - 1)` for one `l`.
pub fn exact_mode_integral(
    l: u32,
    lambda0: f64,
    alpha: f64,
    quadrature: &QuadratureConfig,
    precision: PrecisionPolicy,
) -> Result<QuadratureResult, FreeEnergyError> {
    let mode = ModeIndex::new(l).map_err(crate::phase::PhaseError::from)?;
    let nu = mode.nu();
    let mut x_max = quadrature.cutoff(alpha);
    if x_max > nu {
        x_max =
            nu + ((x_max - nu) / std::f64::consts::FRAC_PI_2).ceil() * std::f64::consts::FRAC_PI_2;
    }
    let zeros = find_denominator_zeros(mode, lambda0, x_max, precision)?;
    let layout = IntegrationLayout {
        breakpoints: zeros
            .zeros
            .iter()
            .filter(|z| z.degenerate)
            .map(|z| z.x)
            .collect(),
        pv_points: zeros
            .zeros
            .iter()
            .filter(|z| !z.degenerate)
            .map(|z| z.x)
            .collect(),
        oscillatory_from: Some(nu),
    };
    let integrand = |x: f64| {
        mode_phase_auto(mode, x, lambda0, precision).map(|t| Evaluated {
            value: t.value,
            degraded: t.degraded_precision,
        })
    };
    Ok(integrate_bose(integrand, alpha, &layout, quadrature)?)
}

fn exact_inner(
    params: &ShellParams,
    config: &FreeEnergyConfig,
) -> Result<FreeEnergySample, FreeEnergyError> {
    let alpha = params.alpha();
    let x_cut = config.quadrature.cutoff(alpha);
    let floor = 10u32.max(2 * x_cut.ceil() as u32);
    let sum_cfg = ModeSumConfig {
        rel_tol: config.quadrature.rel_tol,
        abs_tol: config.quadrature.abs_tol * PI,
        l_min_floor: floor,
        l_hard_cap: config.l_hard_cap,
    };
    let term = |l: u32| {
        let quad = QuadratureConfig {
            abs_tol: sum_cfg.abs_tol / (f64::from(2 * l + 1) * f64::from(floor)),
            ..config.quadrature
        };
        exact_mode_integral(l, params.lambda0, alpha, &quad, config.precision)
    };
    let sum = mode_sum(term, &sum_cfg)?;
    let flags = SampleFlags {
        quadrature_unconverged: sum.terms.iter().any(|t| !t.converged),
        mode_sum_unconverged: !sum.converged && sum.terms.iter().all(|t| t.converged),
        precision_degraded: sum.terms.iter().any(|t| t.degraded_evals > 0),
        ..SampleFlags::default()
    };
    Ok(FreeEnergySample {
        params: *params,
        method: Method::Exact,
        a_f: -sum.value / PI,
        error_estimate: sum.error_estimate / PI,
        l_max: Some(sum.l_max),
        n_evals: sum.terms.iter().map(|t| t.n_evals).sum(),
        flags,
        failure: None,
    })
}

/// Exact thermal free energy. Failures are returned as a flagged sample.
pub fn exact_af(params: &ShellParams, config: &FreeEnergyConfig) -> FreeEnergySample {
    exact_inner(params, config)
        .unwrap_or_else(|e| FreeEnergySample::failed(*params, Method::Exact, &e))
}
