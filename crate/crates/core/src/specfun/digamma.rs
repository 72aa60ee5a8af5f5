//! `Re psi(1 + i/xi)` for real `xi > 0`.

use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const DIRECT_TERMS: u32 = 50;

/// `B_{2j}` for `j = 1..=8`.
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

/// `Re psi(1 + iy) = -gamma + sum_k y^2 / (k (k^2 + y^2))`, summed directly
/// for `k < 50` and closed with an Euler-Maclaurin tail.
pub fn digamma_re_shifted(xi: f64) -> f64 {
    if xi.is_infinite() {
        return -EULER_GAMMA;
    }
    let y = 1.0 / xi;
    let y2 = y * y;
    let mut sum = 0.0;
    for k in 1..DIRECT_TERMS {
        let k = f64::from(k);
        sum += y2 / (k * (k * k + y2));
    }
    let n = f64::from(DIRECT_TERMS);
    let z = Complex64::new(n, y);
    let g_n = y2 / (n * (n * n + y2));
    let mut tail = 0.5 * (y2 / (n * n)).ln_1p() + 0.5 * g_n;
    let inv_n2 = 1.0 / (n * n);
    let inv_z2 = (z * z).inv();
    let mut pn = 1.0;
    let mut pz = Complex64::new(1.0, 0.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        pn *= inv_n2;
        pz *= inv_z2;
        let two_j = 2.0 * (j as f64 + 1.0);
        tail += b / two_j * (pn - pz.re);
    }
    -EULER_GAMMA + sum + tail
}
