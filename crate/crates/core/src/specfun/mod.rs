//! Special functions: modified and real-argument Riccati-Bessel functions,
//! the TM mode function `f_H`, its small-argument series, and
//! `Re psi(1 + i/xi)`.

mod digamma;
mod ladder;
mod series;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::DoubleDouble;
use crate::real::{cancellation_ratio, Evaluated, Precision, Real};
use ladder::{ImagAxis, RealAxis};

pub use digamma::{digamma_re_shifted, EULER_GAMMA};
pub use series::{f_h_series, SeriesTerm};

/// Cancellation ratio above which a result is reported as degraded
/// (about six of sixteen digits lost).
pub const DEFAULT_CANCELLATION_BOUND: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument must be positive, got x = {x}")]
    NonPositiveArgument { x: f64 },
    #[error("{function}: result for l = {l} is not representable at x = {x}")]
    Range {
        function: &'static str,
        l: u32,
        x: f64,
    },
    #[error("angular momentum must be at least 1, got l = {l}")]
    InvalidMode { l: u32 },
    #[error("continued fraction for l = {l} did not converge at x = {x}")]
    NoConvergence { l: u32, x: f64 },
    #[error("series order {order} is beyond the known terms for l = {l} (max {max})")]
    SeriesOrder { l: u32, order: u32, max: u32 },
}

/// Angular momentum `l >= 1` of a TM partial wave, with order `nu = l + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ModeIndex(u32);

impl ModeIndex {
    pub fn new(l: u32) -> Result<Self, SpecFunError> {
        if l == 0 {
            Err(SpecFunError::InvalidMode { l })
        } else {
            Ok(Self(l))
        }
    }

    pub fn l(self) -> u32 {
        self.0
    }

    pub fn nu(self) -> f64 {
        f64::from(self.0) + 0.5
    }
}

impl TryFrom<u32> for ModeIndex {
    type Error = SpecFunError;
    fn try_from(l: u32) -> Result<Self, Self::Error> {
        Self::new(l)
    }
}

impl From<ModeIndex> for u32 {
    fn from(m: ModeIndex) -> u32 {
        m.0
    }
}

/// The value `-x^2 - lambda0 f_H(l, ix)` split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

/// Precision and sentinel threshold for a single evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub precision: Precision,
    pub cancellation_bound: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            precision: Precision::Double,
            cancellation_bound: DEFAULT_CANCELLATION_BOUND,
        }
    }
}

impl EvalOptions {
    pub fn with_precision(precision: Precision) -> Self {
        Self {
            precision,
            ..Self::default()
        }
    }
}

fn check_x(x: f64) -> Result<(), SpecFunError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SpecFunError::NonPositiveArgument { x })
    }
}

fn finite_or_range(
    value: f64,
    function: &'static str,
    l: u32,
    x: f64,
) -> Result<f64, SpecFunError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SpecFunError::Range { function, l, x })
    }
}

fn imag_axis(l: u32, x: f64) -> Result<ImagAxis<f64>, SpecFunError> {
    ImagAxis::new(l, x).map_err(|_| SpecFunError::NoConvergence { l, x })
}

fn real_axis<R: Real>(l: u32, x: f64) -> Result<RealAxis<R>, SpecFunError> {
    RealAxis::new(l, R::from_f64(x)).map_err(|_| SpecFunError::NoConvergence { l, x })
}

/// `s_l(x) = sqrt(pi x / 2) I_{l+1/2}(x)`; `s_0 = sinh`.
pub fn riccati_s(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return finite_or_range(x.sinh(), "riccati_s", l, x);
    }
    let m = imag_axis(l, x)?;
    let v = m.s.cur.ldexp(-m.e.exp2) * x.exp();
    finite_or_range(v, "riccati_s", l, x)
}

/// `e_l(x) = sqrt(2x / pi) K_{l+1/2}(x)`; `e_0 = exp(-x)`. Underflows to 0
/// for very large `x`.
pub fn riccati_e(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return Ok((-x).exp());
    }
    let m = imag_axis(l, x)?;
    finite_or_range(m.e.cur.ldexp(m.e.exp2) * (-x).exp(), "riccati_e", l, x)
}

pub fn riccati_s_prime(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return finite_or_range(x.cosh(), "riccati_s_prime", l, x);
    }
    let m = imag_axis(l, x)?;
    finite_or_range(
        m.s_prime().ldexp(-m.e.exp2) * x.exp(),
        "riccati_s_prime",
        l,
        x,
    )
}

pub fn riccati_e_prime(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return Ok(-(-x).exp());
    }
    let m = imag_axis(l, x)?;
    finite_or_range(
        m.e_prime().ldexp(m.e.exp2) * (-x).exp(),
        "riccati_e_prime",
        l,
        x,
    )
}

/// `f_H(l, x) = x e_l'(x) s_l'(x)` on the positive (Euclidean) axis.
///
/// Tends to `-l(l+1)/(2l+1)` as `x -> 0` and to `-nu/2` as `l` grows.
pub fn f_h(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return Ok(-x * (-x).exp() * x.cosh());
    }
    finite_or_range(imag_axis(l, x)?.f_h(), "f_h", l, x)
}

/// `psi_l'(x) = [x j_l(x)]'`.
pub fn riccati_psi_prime(l: u32, x: f64) -> Result<f64, SpecFunError> {
    check_x(x)?;
    if l == 0 {
        return Ok(x.cos());
    }
    let r = real_axis::<f64>(l, x)?;
    let (m, _, _) = r.psi_prime();
    finite_or_range(m.ldexp(r.psi.exp2), "riccati_psi_prime", l, x)
}

fn cal_generic<R: Real>(
    mode: ModeIndex,
    x: f64,
    bound: f64,
    second_kind: bool,
) -> Result<Evaluated<f64>, SpecFunError> {
    let r = real_axis::<R>(mode.l(), x)?;
    let ((m, a, b), exp2) = if second_kind {
        (r.chi_prime(), r.chi.exp2)
    } else {
        (r.psi_prime(), r.psi.exp2)
    };
    let prefactor = -(R::from_f64(2.0 * x) / R::pi()).sqrt();
    let value = (prefactor * m).ldexp(exp2).to_f64();
    let name = if second_kind { "cal_y" } else { "cal_j" };
    let value = finite_or_range(value, name, mode.l(), x)?;
    let degraded = cancellation_ratio(a.to_f64(), b.to_f64()) > bound;
    Ok(Evaluated { value, degraded })
}

/// `J_nu(x) (nu - 1/2) - x J_{nu-1}(x) = -sqrt(2x/pi) [x j_l(x)]'`.
pub fn cal_j(mode: ModeIndex, x: f64, opts: EvalOptions) -> Result<Evaluated<f64>, SpecFunError> {
    check_x(x)?;
    match opts.precision {
        Precision::Double => cal_generic::<f64>(mode, x, opts.cancellation_bound, false),
        Precision::Extended => {
            cal_generic::<DoubleDouble>(mode, x, opts.cancellation_bound * 1e16, false)
        }
    }
}

/// `Y_nu(x) (nu - 1/2) - x Y_{nu-1}(x) = -sqrt(2x/pi) [x y_l(x)]'`.
pub fn cal_y(mode: ModeIndex, x: f64, opts: EvalOptions) -> Result<Evaluated<f64>, SpecFunError> {
    check_x(x)?;
    match opts.precision {
        Precision::Double => cal_generic::<f64>(mode, x, opts.cancellation_bound, true),
        Precision::Extended => {
            cal_generic::<DoubleDouble>(mode, x, opts.cancellation_bound * 1e16, true)
        }
    }
}

fn imag_axis_point<R: Real>(
    mode: ModeIndex,
    x: f64,
    lambda0: f64,
    bound: f64,
) -> Result<Evaluated<ComplexPoint>, SpecFunError> {
    let r = real_axis::<R>(mode.l(), x)?;
    let (dpsi, pa, pb) = r.psi_prime();
    let (dchi, ca, cb) = r.chi_prime();
    let xr = R::from_f64(x);
    let lam = R::from_f64(lambda0);
    // (pi/2) J Y = x psi' chi' and (pi/2) J^2 = x psi'^2
    let jy = (xr * dpsi * dchi).ldexp(r.psi.exp2 + r.chi.exp2);
    let jj = (xr * dpsi * dpsi).ldexp(2 * r.psi.exp2);
    let coupling_part = lam * jy;
    let x2 = xr * xr;
    let re = (coupling_part - x2).to_f64();
    let im = (lam * jj).to_f64();
    if !re.is_finite() || !im.is_finite() {
        return Err(SpecFunError::Range {
            function: "f_h_imag_axis",
            l: mode.l(),
            x,
        });
    }
    let degraded = cancellation_ratio(coupling_part.to_f64(), x2.to_f64()) > bound
        || cancellation_ratio(pa.to_f64(), pb.to_f64()) > bound
        || cancellation_ratio(ca.to_f64(), cb.to_f64()) > bound;
    Ok(Evaluated {
        value: ComplexPoint {
            re,
            im: im.max(0.0),
        },
        degraded,
    })
}

/// `-x^2 - lambda0 f_H(l, ix)`:
/// `re = -x^2 + lambda0 (pi/2) J Y`, `im = lambda0 (pi/2) J^2 >= 0`.
///
/// With `lambda0 = 0` this is exactly `(-x^2, 0)`.
pub fn f_h_imag_axis(
    mode: ModeIndex,
    x: f64,
    lambda0: f64,
    opts: EvalOptions,
) -> Result<Evaluated<ComplexPoint>, SpecFunError> {
    check_x(x)?;
    if lambda0 == 0.0 {
        return Ok(Evaluated::exact(ComplexPoint {
            re: -x * x,
            im: 0.0,
        }));
    }
    match opts.precision {
        Precision::Double => imag_axis_point::<f64>(mode, x, lambda0, opts.cancellation_bound),
        // extended precision keeps ~16 more digits before the sentinel matters
        Precision::Extended => {
            imag_axis_point::<DoubleDouble>(mode, x, lambda0, opts.cancellation_bound * 1e16)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn lowest_orders_match_elementary_forms() {
        assert!(close(riccati_s(0, 1.0).unwrap(), 1.0f64.sinh(), 1e-15));
        assert!(close(riccati_e(0, 1.0).unwrap(), (-1.0f64).exp(), 1e-15));
        assert!(close(
            riccati_e(1, 1.0).unwrap(),
            2.0 * (-1.0f64).exp(),
            1e-14
        ));
        assert!(close(
            riccati_s_prime(0, 1.0).unwrap(),
            1.0f64.cosh(),
            1e-15
        ));
        assert!(close(
            riccati_e_prime(0, 1.0).unwrap(),
            -(-1.0f64).exp(),
            1e-15
        ));
        // s_1 = cosh x - sinh x / x
        let x = 0.8f64;
        assert!(close(
            riccati_s(1, x).unwrap(),
            x.cosh() - x.sinh() / x,
            1e-14
        ));
    }

    #[test]
    fn s1_vanishes_like_x_squared_over_three() {
        for &x in &[1e-2, 1e-3, 1e-4] {
            let v = riccati_s(1, x).unwrap();
            assert!(close(v, x * x / 3.0, 2.0 * x * x), "x={x} v={v}");
        }
    }

    #[test]
    fn wronskian_sample() {
        let (l, x) = (5, 3.0);
        let w = riccati_s(l, x).unwrap() * riccati_e_prime(l, x).unwrap()
            - riccati_s_prime(l, x).unwrap() * riccati_e(l, x).unwrap();
        assert!((w + 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            riccati_e(2, 0.0),
            Err(SpecFunError::NonPositiveArgument { .. })
        ));
        assert!(matches!(
            riccati_s(2, -1.0),
            Err(SpecFunError::NonPositiveArgument { .. })
        ));
        assert!(matches!(riccati_s(3, 800.0), Err(SpecFunError::Range { x, .. }) if x == 800.0));
        assert!(ModeIndex::new(0).is_err());
        assert_eq!(ModeIndex::new(3).unwrap().nu(), 3.5);
        // e_l underflows quietly
        assert_eq!(riccati_e(2, 800.0).unwrap(), 0.0);
    }

    #[test]
    fn f_h_small_x_and_large_l() {
        assert!((f_h(1, 1e-3).unwrap() + 2.0 / 3.0).abs() < 1e-6);
        let series = -2.0 / 3.0 - 7.0 / 15.0 * 0.01 + 4.0 / 9.0 * 0.001;
        assert!((f_h(1, 0.1).unwrap() - series).abs() < 1e-3);
        assert!(close(f_h(40, 1.0).unwrap(), -20.25, 0.02));
    }

    #[test]
    fn cal_j_at_pi() {
        let m = ModeIndex::new(1).unwrap();
        let v = cal_j(m, PI, EvalOptions::default()).unwrap();
        assert!(close(v.value, 2f64.sqrt() / PI, 1e-14));
        assert!(!v.degraded);
        // J ~ c x^{3/2} near the origin
        let a = cal_j(m, 1e-3, EvalOptions::default()).unwrap().value;
        let b = cal_j(m, 2e-3, EvalOptions::default()).unwrap().value;
        assert!(((b / a).ln() / 2f64.ln() - 1.5).abs() < 1e-3);
    }

    #[test]
    fn cal_j_y_match_closed_forms_for_l_two() {
        // psi_2 = (3/x^2 - 1) sin x - 3 cos x / x, chi_2 = -(3/x^2 - 1) cos x - 3 sin x / x
        let m = ModeIndex::new(2).unwrap();
        for &x in &[0.05, 0.9, 4.0, 17.3] {
            let h = 1e-5;
            let psi = |u: f64| (3.0 / (u * u) - 1.0) * u.sin() - 3.0 * u.cos() / u;
            let chi = |u: f64| -(3.0 / (u * u) - 1.0) * u.cos() - 3.0 * u.sin() / u;
            let dpsi = (psi(x + h) - psi(x - h)) / (2.0 * h);
            let dchi = (chi(x + h) - chi(x - h)) / (2.0 * h);
            let pre = -(2.0 * x / PI).sqrt();
            let j = cal_j(m, x, EvalOptions::default()).unwrap().value;
            let y = cal_y(m, x, EvalOptions::default()).unwrap().value;
            assert!(close(j, pre * dpsi, 1e-6), "x={x}");
            assert!(close(y, pre * dchi, 1e-6), "x={x}");
        }
    }

    #[test]
    fn imag_axis_point_is_consistent_with_cal_functions() {
        let m = ModeIndex::new(3).unwrap();
        let (x, lam) = (2.7, 0.8);
        let j = cal_j(m, x, EvalOptions::default()).unwrap().value;
        let y = cal_y(m, x, EvalOptions::default()).unwrap().value;
        let p = f_h_imag_axis(m, x, lam, EvalOptions::default())
            .unwrap()
            .value;
        assert!(close(p.re, -x * x + lam * PI / 2.0 * j * y, 1e-13));
        assert!(close(p.im, lam * PI / 2.0 * j * j, 1e-13));
        let zero = f_h_imag_axis(m, x, 0.0, EvalOptions::default())
            .unwrap()
            .value;
        assert_eq!(
            zero,
            ComplexPoint {
                re: -x * x,
                im: 0.0
            }
        );
    }

    #[test]
    fn extended_precision_agrees() {
        let m = ModeIndex::new(7).unwrap();
        for &x in &[0.4, 6.0, 25.0] {
            let d = f_h_imag_axis(m, x, 1.3, EvalOptions::default())
                .unwrap()
                .value;
            let q = f_h_imag_axis(m, x, 1.3, EvalOptions::with_precision(Precision::Extended))
                .unwrap()
                .value;
            assert!((d.re - q.re).abs() < 1e-13 * x * x);
            assert!((d.im - q.im).abs() < 1e-13 * q.im.abs().max(1e-300) + 1e-300);
        }
    }
}
