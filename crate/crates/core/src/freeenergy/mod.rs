//! TM free energy `a F` and entropy `a S` of the plasma shell in every
//! regime: the exact thermal integral, first order in the coupling, the
//! low-temperature closed and integral forms, and the limiting power laws.

mod closed;
mod entropy;
mod exact;
mod lowt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::PhaseError;
use crate::quadrature::{QuadratureConfig, QuadratureError};
use crate::real::PrecisionPolicy;

pub use closed::{
    hight_af, hight_as, ln_sinhc, lowt_bracket, lowt_closed_af, lowt_log_series, strong_lowt_af,
    weak1_af, weak_lowt_af,
};
pub use entropy::{default_stencil, entropy, EntropySample};
pub use exact::{exact_af, exact_mode_integral};
pub use lowt::{lowt_integral_af, LowTForm};

#[derive(Debug, Error)]
pub enum FreeEnergyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Coupling `lambda0` and temperature `t = aT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    pub lambda0: f64,
    pub t: f64,
}

impl ShellParams {
    pub fn new(lambda0: f64, t: f64) -> Result<Self, FreeEnergyError> {
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(FreeEnergyError::InvalidParams(format!(
                "lambda0 must be positive and finite, got {lambda0}"
            )));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(FreeEnergyError::InvalidParams(format!(
                "t must be positive and finite, got {t}"
            )));
        }
        Ok(Self { lambda0, t })
    }

    /// `2 pi t`.
    pub fn alpha(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.t
    }

    /// `alpha sqrt(3 / (2 lambda0))`.
    pub fn xi(&self) -> f64 {
        self.alpha() * (1.5 / self.lambda0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "weak1")]
    Weak1,
    #[serde(rename = "lowT_closed")]
    LowTClosed,
    /// Arctangent form of the low-temperature integral.
    #[serde(rename = "lowT_integral")]
    LowTIntegral,
    /// Linearised (principal-value pole) form.
    #[serde(rename = "lowT_integral_linear")]
    LowTIntegralLinear,
    #[serde(rename = "strong_lowT")]
    StrongLowT,
    #[serde(rename = "weak_lowT")]
    WeakLowT,
    #[serde(rename = "highT")]
    HighT,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Exact,
        Method::Weak1,
        Method::LowTClosed,
        Method::LowTIntegral,
        Method::LowTIntegralLinear,
        Method::StrongLowT,
        Method::WeakLowT,
        Method::HighT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Weak1 => "weak1",
            Method::LowTClosed => "lowT_closed",
            Method::LowTIntegral => "lowT_integral",
            Method::LowTIntegralLinear => "lowT_integral_linear",
            Method::StrongLowT => "strong_lowT",
            Method::WeakLowT => "weak_lowT",
            Method::HighT => "highT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method '{0}'")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFlags {
    pub quadrature_unconverged: bool,
    pub mode_sum_unconverged: bool,
    pub precision_degraded: bool,
    pub noise_dominated: bool,
    pub failed: bool,
}

impl SampleFlags {
    pub fn is_clean(&self) -> bool {
        *self == Self::default()
    }

    pub fn merge(&mut self, other: SampleFlags) {
        self.quadrature_unconverged |= other.quadrature_unconverged;
        self.mode_sum_unconverged |= other.mode_sum_unconverged;
        self.precision_degraded |= other.precision_degraded;
        self.noise_dominated |= other.noise_dominated;
        self.failed |= other.failed;
    }
}

impl fmt::Display for SampleFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.failed, "failed"),
            (self.quadrature_unconverged, "quad_unconverged"),
            (self.mode_sum_unconverged, "lsum_unconverged"),
            (self.precision_degraded, "precision_degraded"),
            (self.noise_dominated, "noise_dominated"),
        ];
        let set: Vec<&str> = names
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| *n)
            .collect();
        if set.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&set.join("|"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergySample {
    pub params: ShellParams,
    pub method: Method,
    #[serde(rename = "aF")]
    pub a_f: f64,
    pub error_estimate: f64,
    /// Highest partial wave summed (exact method only).
    pub l_max: Option<u32>,
    pub n_evals: usize,
    pub flags: SampleFlags,
    pub failure: Option<String>,
}

impl FreeEnergySample {
    fn closed(params: ShellParams, method: Method, a_f: f64) -> Self {
        Self {
            params,
            method,
            a_f,
            error_estimate: 4.0 * f64::EPSILON * a_f.abs(),
            l_max: None,
            n_evals: 0,
            flags: SampleFlags::default(),
            failure: None,
        }
    }

    pub(crate) fn failed(params: ShellParams, method: Method, err: &FreeEnergyError) -> Self {
        Self {
            params,
            method,
            a_f: f64::NAN,
            error_estimate: f64::NAN,
            l_max: None,
            n_evals: 0,
            flags: SampleFlags {
                failed: true,
                ..SampleFlags::default()
            },
            failure: Some(err.to_string()),
        }
    }

    pub fn converged(&self) -> bool {
        self.flags.is_clean()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyConfig {
    pub quadrature: QuadratureConfig,
    pub precision: PrecisionPolicy,
    /// Hard cap on the partial-wave sum.
    pub l_hard_cap: u32,
}

impl Default for FreeEnergyConfig {
    /// Default tolerances; precision follows the environment override.
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            precision: PrecisionPolicy::from_env(),
            l_hard_cap: 4000,
        }
    }
}

/// Evaluates `a F` with the given method.
pub fn free_energy(
    params: &ShellParams,
    method: Method,
    config: &FreeEnergyConfig,
) -> FreeEnergySample {
    let p = *params;
    match method {
        Method::Exact => exact_af(params, config),
        Method::Weak1 => FreeEnergySample::closed(p, method, weak1_af(params)),
        Method::LowTClosed => FreeEnergySample::closed(p, method, lowt_closed_af(params)),
        Method::LowTIntegral => lowt_integral_af(params, LowTForm::Arctan, config),
        Method::LowTIntegralLinear => lowt_integral_af(params, LowTForm::Linearized, config),
        Method::StrongLowT => FreeEnergySample::closed(p, method, strong_lowt_af(p.t)),
        Method::WeakLowT => FreeEnergySample::closed(p, method, weak_lowt_af(params)),
        Method::HighT => FreeEnergySample::closed(p, method, hight_af(params)),
    }
}
