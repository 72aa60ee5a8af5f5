//! Riccati-Bessel ladders in a generic working precision.
//!
//! Real axis: `psi_l = x j_l(x)`, `chi_l = x y_l(x)`.
//! Positive imaginary axis: `s_l = sqrt(pi x / 2) I_{l+1/2}(x)`,
//! `e_l = sqrt(2x / pi) K_{l+1/2}(x)`.
//!
//! `chi` and `e` are built by upward recurrence, which is their stable
//! direction. `psi` (for `x <= l`) and `s` are obtained from the continued
//! fraction for `f_l / f_{l-1}` and normalised with the Wronskians
//! `psi_l chi_{l-1} - psi_{l-1} chi_l = 1` and `s_l e_{l-1} + s_{l-1} e_l = 1`.
//! Magnitudes are carried as a mantissa pair and a power-of-two exponent so
//! that large `l` at small `x` never overflows.

use crate::real::Real;

const RESCALE_THRESHOLD: f64 = 3.273_390_607_896_142e150; // 2^500
const RESCALE_SHIFT: i32 = 500;
const LENTZ_TINY: f64 = 1e-300;
const LENTZ_MAX_ITER: u32 = 200_000;

/// Continued fraction did not settle within the iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NoConvergence;

/// `(f_{l-1}, f_l) * 2^exp2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledPair<R> {
    pub prev: R,
    pub cur: R,
    pub exp2: i32,
}

impl<R: Real> ScaledPair<R> {
    fn rescale_if_large(&mut self) {
        if self.cur.abs().to_f64() > RESCALE_THRESHOLD {
            self.prev = self.prev.ldexp(-RESCALE_SHIFT);
            self.cur = self.cur.ldexp(-RESCALE_SHIFT);
            self.exp2 += RESCALE_SHIFT;
        }
    }
}

fn order_coefficient<R: Real>(k: u32, x: R) -> R {
    R::from_f64(f64::from(2 * k + 1)) / x
}

/// Modified Lentz evaluation of `b_0 + a/(b_1 + a/(b_2 + ...))` with a
/// constant partial numerator `a`.
fn lentz<R: Real>(b0: R, a: R, b: impl Fn(u32) -> R) -> Result<R, NoConvergence> {
    let tiny = R::from_f64(LENTZ_TINY);
    let tol = 4.0 * R::EPSILON;
    let mut f = if b0.to_f64() == 0.0 { tiny } else { b0 };
    let mut c = f;
    let mut d = R::zero();
    for k in 1..LENTZ_MAX_ITER {
        let bk = b(k);
        d = bk + a * d;
        if d.to_f64() == 0.0 {
            d = tiny;
        }
        c = bk + a / c;
        if c.to_f64() == 0.0 {
            c = tiny;
        }
        d = R::one() / d;
        let delta = c * d;
        f = f * delta;
        if (delta - R::one()).abs().to_f64() < tol {
            return Ok(f);
        }
    }
    Err(NoConvergence)
}

/// Upward recurrence `f_{k+1} = (2k+1)/x f_k - f_{k-1}` from `(f_0, f_1)`
/// to `(f_{l-1}, f_l)`, `l >= 1`.
fn spherical_upward<R: Real>(l: u32, x: R, f0: R, f1: R) -> ScaledPair<R> {
    let mut pair = ScaledPair {
        prev: f0,
        cur: f1,
        exp2: 0,
    };
    for k in 1..l {
        let next = order_coefficient(k, x) * pair.cur - pair.prev;
        pair.prev = pair.cur;
        pair.cur = next;
        pair.rescale_if_large();
    }
    pair
}

/// Real-axis Riccati-Bessel data at one `(l, x)`, `l >= 1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RealAxis<R> {
    pub l: u32,
    pub x: R,
    pub psi: ScaledPair<R>,
    pub chi: ScaledPair<R>,
}

impl<R: Real> RealAxis<R> {
    pub fn new(l: u32, x: R) -> Result<Self, NoConvergence> {
        debug_assert!(l >= 1);
        let (sin, cos) = x.sin_cos();
        let chi = spherical_upward(l, x, -cos, -cos / x - sin);
        let psi = if x.to_f64() > f64::from(l) {
            spherical_upward(l, x, sin, sin / x - cos)
        } else {
            // psi_l / psi_{l-1} = 1 / ((2l+1)/x - psi_{l+1}/psi_l)
            let inv_ratio = lentz(order_coefficient(l, x), -R::one(), |k| {
                order_coefficient(l + k, x)
            })?;
            let ratio = R::one() / inv_ratio;
            let prev = R::one() / (ratio * chi.prev - chi.cur);
            ScaledPair {
                prev,
                cur: ratio * prev,
                exp2: -chi.exp2,
            }
        };
        Ok(Self { l, x, psi, chi })
    }

    fn order_over_x(&self) -> R {
        R::from_f64(f64::from(self.l)) / self.x
    }

    /// Mantissa of `psi_l'` (scale `2^psi.exp2`) and the two terms it is
    /// formed from, for the cancellation check.
    pub fn psi_prime(&self) -> (R, R, R) {
        let a = self.psi.prev;
        let b = self.order_over_x() * self.psi.cur;
        (a - b, a, b)
    }

    pub fn chi_prime(&self) -> (R, R, R) {
        let a = self.chi.prev;
        let b = self.order_over_x() * self.chi.cur;
        (a - b, a, b)
    }
}

/// Imaginary-axis (modified) Riccati-Bessel data at one `(l, x)`, `l >= 1`.
///
/// Stored mantissas satisfy `e_k = e~_k 2^exp2 e^{-x}` and
/// `s_k = s~_k 2^{-exp2} e^{x}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImagAxis<R> {
    pub l: u32,
    pub x: R,
    pub s: ScaledPair<R>,
    pub e: ScaledPair<R>,
}

impl<R: Real> ImagAxis<R> {
    pub fn new(l: u32, x: R) -> Result<Self, NoConvergence> {
        debug_assert!(l >= 1);
        // e_{k+1} = e_{k-1} + (2k+1)/x e_k
        let mut e = ScaledPair {
            prev: R::one(),
            cur: R::one() + R::one() / x,
            exp2: 0,
        };
        for k in 1..l {
            let next = order_coefficient(k, x) * e.cur + e.prev;
            e.prev = e.cur;
            e.cur = next;
            e.rescale_if_large();
        }
        // s_l / s_{l-1} = 1 / ((2l+1)/x + s_{l+1}/s_l)
        let inv_ratio = lentz(order_coefficient(l, x), R::one(), |k| {
            order_coefficient(l + k, x)
        })?;
        let ratio = R::one() / inv_ratio;
        let prev = R::one() / (ratio * e.prev + e.cur);
        let s = ScaledPair {
            prev,
            cur: ratio * prev,
            exp2: -e.exp2,
        };
        Ok(Self { l, x, s, e })
    }

    fn order_over_x(&self) -> R {
        R::from_f64(f64::from(self.l)) / self.x
    }

    /// Mantissa of `s_l' = s_{l-1} - (l/x) s_l`.
    pub fn s_prime(&self) -> R {
        self.s.prev - self.order_over_x() * self.s.cur
    }

    /// Mantissa of `e_l' = -e_{l-1} - (l/x) e_l`.
    pub fn e_prime(&self) -> R {
        -self.e.prev - self.order_over_x() * self.e.cur
    }

    /// `x e_l'(x) s_l'(x)`; the scale factors cancel.
    pub fn f_h(&self) -> R {
        self.x * self.e_prime() * self.s_prime()
    }
}
