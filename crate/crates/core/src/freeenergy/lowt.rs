//! Low-temperature integral forms in the variable `z = x / x_0`,
//! `x_0 = sqrt(2 lambda0 / 3)`, with weight scale `xi`.

use std::convert::Infallible;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::phase::arg_branch;
use crate::quadrature::{integrate_bose, IntegrationLayout};
use crate::real::Evaluated;
use crate::specfun::ComplexPoint;

use super::{
    FreeEnergyConfig, FreeEnergyError, FreeEnergySample, Method, SampleFlags, ShellParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowTForm {
    /// `arctan[c z^3 / (1 - z^2)]`, `c = (2/3)(alpha/xi)^3`.
    Arctan,
    /// The same with the arctangent expanded to first order: a simple pole at `z = 1`.
    Linearized,
}

fn inner(
    p: &ShellParams,
    form: LowTForm,
    config: &FreeEnergyConfig,
) -> Result<FreeEnergySample, FreeEnergyError> {
    let xi = p.xi();
    let c2 = (2.0 * p.lambda0 / 3.0).powi(2);
    let layout = IntegrationLayout {
        pv_points: vec![1.0],
        ..Default::default()
    };
    let (prefactor, q, method) = match form {
        LowTForm::Arctan => {
            let ratio = p.alpha() / xi;
            let c = 2.0 / 3.0 * ratio.powi(3);
            let f = move |z: f64| -> Result<Evaluated<f64>, Infallible> {
                let v = arg_branch(ComplexPoint {
                    re: 1.0 - z * z,
                    im: c * z.powi(3),
                })
                .unwrap_or(0.0);
                Ok(Evaluated::exact(v))
            };
            let pre = -c2 / PI * 3.0 / ratio.powi(3);
            (
                pre,
                integrate_bose(f, xi, &layout, &config.quadrature)?,
                Method::LowTIntegral,
            )
        }
        LowTForm::Linearized => {
            let f = |z: f64| -> Result<Evaluated<f64>, Infallible> {
                Ok(Evaluated::exact(z.powi(3) / ((1.0 - z) * (1.0 + z))))
            };
            let pre = -c2 * 2.0 / PI;
            (
                pre,
                integrate_bose(f, xi, &layout, &config.quadrature)?,
                Method::LowTIntegralLinear,
            )
        }
    };
    Ok(FreeEnergySample {
        params: *p,
        method,
        a_f: prefactor * q.value,
        error_estimate: prefactor.abs() * q.error_estimate,
        l_max: None,
        n_evals: q.n_evals,
        flags: SampleFlags {
            quadrature_unconverged: !q.converged,
            ..SampleFlags::default()
        },
        failure: None,
    })
}

/// Low-temperature free energy from its integral representation.
pub fn lowt_integral_af(
    p: &ShellParams,
    form: LowTForm,
    config: &FreeEnergyConfig,
) -> FreeEnergySample {
    inner(p, form, config).unwrap_or_else(|e| {
        let method = match form {
            LowTForm::Arctan => Method::LowTIntegral,
            LowTForm::Linearized => Method::LowTIntegralLinear,
        };
        FreeEnergySample::failed(*p, method, &e)
    })
}
