//! Closed-form regimes.

use std::f64::consts::{LN_2, PI};

use crate::specfun::digamma_re_shifted;

use super::ShellParams;

/// `B_{2n}` for `n = 1..=8`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ln(sinh(a) / a)`, accurate from `a -> 0` to beyond the overflow of `sinh`.
pub fn ln_sinhc(a: f64) -> f64 {
    let a = a.abs();
    if a < 0.5 {
        // sum_n 2^{2n} B_{2n} a^{2n} / (2n (2n)!)
        let a2 = a * a;
        let mut pow = 1.0;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for (i, b) in BERNOULLI.iter().enumerate() {
            let n = (i + 1) as f64;
            pow *= 4.0 * a2;
            fact *= (2.0 * n - 1.0) * (2.0 * n);
            sum += b * pow / (2.0 * n * fact);
        }
        sum
    } else if a < 20.0 {
        (a.sinh() / a).ln()
    } else {
        a - LN_2 + (-(-2.0 * a).exp()).ln_1p() - a.ln()
    }
}

/// First order in the coupling: `(lambda0 / 4 pi) [ln(sinh a / a) + a^2/18]`.
pub fn weak1_af(p: &ShellParams) -> f64 {
    let a = p.alpha();
    p.lambda0 / (4.0 * PI) * (ln_sinhc(a) + a * a / 18.0)
}

/// `xi^2/12 - ln xi - Re psi(1 + i/xi)`.
pub fn lowt_bracket(xi: f64) -> f64 {
    if xi < 0.1 {
        // sum_{k >= 2} (-1)^k B_{2k} xi^{2k} / (2k); the leading terms cancel
        let x2 = xi * xi;
        let mut pow = x2;
        let mut sum = 0.0;
        for (i, b) in BERNOULLI.iter().enumerate().skip(1) {
            let k = (i + 1) as f64;
            pow *= x2;
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * b * pow / (2.0 * k);
        }
        sum
    } else {
        xi * xi / 12.0 - xi.ln() - digamma_re_shifted(xi)
    }
}

/// Low-temperature form `(2 lambda0 / 3)^2 (1/pi) bracket(xi)`.
pub fn lowt_closed_af(p: &ShellParams) -> f64 {
    let c = 2.0 * p.lambda0 / 3.0;
    c * c / PI * lowt_bracket(p.xi())
}

/// `-(2/15) pi^3 t^4`.
pub fn strong_lowt_af(t: f64) -> f64 {
    -2.0 / 15.0 * PI.powi(3) * t.powi(4)
}

/// `(2/9) lambda0 pi t^2`.
pub fn weak_lowt_af(p: &ShellParams) -> f64 {
    2.0 / 9.0 * p.lambda0 * PI * p.t * p.t
}

/// `lambda0 pi t^2 / 18`.
pub fn hight_af(p: &ShellParams) -> f64 {
    p.lambda0 * PI * p.t * p.t / 18.0
}

/// `-lambda0 alpha / 18`.
pub fn hight_as(p: &ShellParams) -> f64 {
    -p.lambda0 * p.alpha() / 18.0
}

/// Coefficients of `x^0`, `x^2`, `x^3` in `ln[x^2 - lambda0 f_H(1, x)]`.
pub fn lowt_log_series(lambda0: f64) -> (f64, f64, f64) {
    (
        (2.0 * lambda0 / 3.0).ln(),
        3.0 / (2.0 * lambda0) + 0.7,
        -2.0 / 3.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_sinhc_branches_join() {
        for a in [0.5f64 * (1.0 - 1e-12), 0.5, 20.0 * (1.0 - 1e-12), 20.0] {
            let direct = (a.sinh() / a).ln();
            assert!(
                (ln_sinhc(a) - direct).abs() < 1e-14 * direct.abs().max(1.0),
                "a={a}"
            );
        }
        assert!((ln_sinhc(0.3) - (0.3f64.sinh() / 0.3).ln()).abs() < 1e-16);
        assert!((ln_sinhc(800.0) - (800.0 - LN_2 - 800f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn bracket_branches_join() {
        let xi = 0.1;
        let series = lowt_bracket(xi * (1.0 - 1e-12));
        let direct = xi * xi / 12.0 - xi.ln() - digamma_re_shifted(xi);
        assert!((series / direct - 1.0).abs() < 1e-8);
    }
}
