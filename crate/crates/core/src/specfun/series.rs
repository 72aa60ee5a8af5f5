//! Small-argument expansion of `f_H(l, x)`.
//!
//! `f_H(l, x) = c0 + c2 x^2 + ... + c_odd x^{2l+1} + ...`, where the even
//! powers come from the regular parts of `I` and `K` and the first odd power
//! from the cross term. Only `x^0`, `x^2` and `x^{2l+1}` are known in closed
//! form; for `l >= 2` the `x^4, ..., x^{2l}` terms are not represented.

use serde::{Deserialize, Serialize};

use super::{ModeIndex, SpecFunError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub power: u32,
    pub coefficient: f64,
}

fn constant_term(l: f64) -> f64 {
    -l * (l + 1.0) / (2.0 * l + 1.0)
}

fn quadratic_term(l: f64) -> f64 {
    -(3.0 + 2.0 * l * (l + 1.0)) / ((4.0 * l * l - 1.0) * (2.0 * l + 3.0))
}

/// `-(-1)^l (l+1)^2 / ((2l+1)!!)^2`, built as a running product so that it
/// underflows gracefully rather than overflowing.
fn odd_term(l: u32) -> f64 {
    let lf = f64::from(l);
    let mut c = (lf + 1.0) * (lf + 1.0);
    for k in 0..=l {
        let d = f64::from(2 * k + 1);
        c /= d * d;
    }
    if l.is_multiple_of(2) {
        -c
    } else {
        c
    }
}

/// Terms of the expansion with `power <= order`, in increasing power.
///
/// `order` may not exceed `2l + 1`.
pub fn f_h_series(mode: ModeIndex, order: u32) -> Result<Vec<SeriesTerm>, SpecFunError> {
    let l = mode.l();
    let max = 2 * l + 1;
    if order > max {
        return Err(SpecFunError::SeriesOrder { l, order, max });
    }
    let lf = f64::from(l);
    let mut terms = vec![SeriesTerm {
        power: 0,
        coefficient: constant_term(lf),
    }];
    if order >= 2 {
        terms.push(SeriesTerm {
            power: 2,
            coefficient: quadratic_term(lf),
        });
    }
    if order == max {
        terms.push(SeriesTerm {
            power: max,
            coefficient: odd_term(l),
        });
    }
    Ok(terms)
}
