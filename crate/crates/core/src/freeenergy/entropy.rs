//! `a S = -d(a F)/dt` by Richardson-extrapolated five-point differences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{free_energy, FreeEnergyConfig, FreeEnergyError, Method, SampleFlags, ShellParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    pub params: ShellParams,
    pub method: Method,
    #[serde(rename = "aS")]
    pub a_s: f64,
    pub stencil_h: f64,
    pub error_estimate: f64,
    pub flags: SampleFlags,
    pub failure: Option<String>,
}

/// `max(1e-3, t/20)`, shrunk to `t/4` when the stencil would reach `t <= 0`.
pub fn default_stencil(t: f64) -> f64 {
    let h = (t / 20.0).max(1e-3);
    if t - 2.0 * h > 0.0 {
        h
    } else {
        t / 4.0
    }
}

const OFFSETS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];

/// Entropy at `params`. With `stencil_h = None` the step is [`default_stencil`].
pub fn entropy(
    params: &ShellParams,
    method: Method,
    stencil_h: Option<f64>,
    config: &FreeEnergyConfig,
) -> EntropySample {
    let h = stencil_h.unwrap_or_else(|| default_stencil(params.t));
    let fail = |msg: String| EntropySample {
        params: *params,
        method,
        a_s: f64::NAN,
        stencil_h: h,
        error_estimate: f64::NAN,
        flags: SampleFlags {
            failed: true,
            ..SampleFlags::default()
        },
        failure: Some(msg),
    };
    if h.is_nan() || h <= 0.0 || params.t - 2.0 * h <= 0.0 {
        return fail(
            FreeEnergyError::InvalidParams(format!("stencil h = {h} needs t - 2h > 0")).to_string(),
        );
    }
    let samples: Vec<_> = OFFSETS
        .par_iter()
        .map(|o| {
            free_energy(
                &ShellParams {
                    lambda0: params.lambda0,
                    t: params.t + o * h,
                },
                method,
                config,
            )
        })
        .collect();
    let mut flags = SampleFlags::default();
    for s in &samples {
        if let Some(msg) = &s.failure {
            return fail(msg.clone());
        }
        flags.merge(s.flags);
    }
    let d_h = [1.0, -8.0, 0.0, 0.0, 8.0, -1.0].map(|c| c / (12.0 * h));
    let d_half = [0.0, 1.0, -8.0, 8.0, -1.0, 0.0].map(|c| c / (6.0 * h));
    let dot = |c: &[f64; 6]| -> f64 { c.iter().zip(&samples).map(|(c, s)| c * s.a_f).sum() };
    let (dh, dh2) = (dot(&d_h), dot(&d_half));
    let richardson = (16.0 * dh2 - dh) / 15.0;
    let noise: f64 = (0..6)
        .map(|i| ((16.0 * d_half[i] - d_h[i]) / 15.0).abs() * samples[i].error_estimate)
        .sum();
    let truncation = (dh2 - dh).abs() / 15.0;
    flags.noise_dominated = noise > 0.5 * richardson.abs();
    EntropySample {
        params: *params,
        method,
        a_s: -richardson,
        stencil_h: h,
        error_estimate: truncation + noise,
        flags,
        failure: None,
    }
}
