//! Scalar abstraction shared by the double and double-double code paths, and
//! the precision knobs that select between them.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::dd::{ldexp_f64, DoubleDouble};

/// Environment variable that forces extended precision everywhere.
pub const PRECISION_ENV: &str = "CASIMIR_SHELL_PRECISION";

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Relative rounding unit of the representation.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn pi() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn ldexp(self, exp: i32) -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn ldexp(self, exp: i32) -> Self {
        ldexp_f64(self, exp)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = DoubleDouble::EPSILON;

    fn from_f64(v: f64) -> Self {
        DoubleDouble::from(v)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn pi() -> Self {
        DoubleDouble::PI
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    fn ldexp(self, exp: i32) -> Self {
        DoubleDouble::ldexp(self, exp)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
}

/// Working precision of a single evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// IEEE binary64.
    Double,
    /// Double-double, about 32 significant digits.
    Extended,
}

/// How callers pick a [`Precision`] for a batch of evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionPolicy {
    /// Evaluate in double; re-evaluate in extended precision when the
    /// cancellation sentinel trips.
    #[default]
    Auto,
    /// Always evaluate in extended precision.
    Extended,
}

impl PrecisionPolicy {
    /// Reads [`PRECISION_ENV`]; `extended` selects [`PrecisionPolicy::Extended`],
    /// anything else (or unset) gives `Auto`.
    pub fn from_env() -> Self {
        match std::env::var(PRECISION_ENV) {
            Ok(v) if v.trim().eq_ignore_ascii_case("extended") => Self::Extended,
            _ => Self::Auto,
        }
    }

    pub fn initial(self) -> Precision {
        match self {
            Self::Auto => Precision::Double,
            Self::Extended => Precision::Extended,
        }
    }

    /// Runs `eval` at the policy's initial precision and, under `Auto`, repeats
    /// it in extended precision when the first result reports degradation.
    pub fn run<T, E>(
        self,
        mut eval: impl FnMut(Precision) -> Result<Evaluated<T>, E>,
    ) -> Result<Evaluated<T>, E> {
        let first = eval(self.initial())?;
        if first.degraded && self == Self::Auto {
            eval(Precision::Extended)
        } else {
            Ok(first)
        }
    }
}

/// A value together with the loss-of-precision sentinel raised while
/// computing it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluated<T> {
    pub value: T,
    pub degraded: bool,
}

impl<T> Evaluated<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            degraded: false,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Evaluated<U> {
        Evaluated {
            value: f(self.value),
            degraded: self.degraded,
        }
    }
}

/// Magnitude ratio `max(|a|, |b|) / |a - b|`: how many times larger the
/// operands are than their difference.
pub fn cancellation_ratio(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        1.0
    } else if diff == 0.0 {
        f64::INFINITY
    } else {
        scale / diff
    }
}
