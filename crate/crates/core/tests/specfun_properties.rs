use std::f64::consts::{E, PI};

use casimir_shell::specfun::{
    cal_j, cal_y, digamma_re_shifted, f_h, f_h_imag_axis, f_h_series, riccati_e, riccati_e_prime,
    riccati_psi_prime, riccati_s, riccati_s_prime, EvalOptions, ModeIndex, EULER_GAMMA,
};
use proptest::prelude::*;

fn m(l: u32) -> ModeIndex {
    ModeIndex::new(l).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn elementary_orders() {
    assert!(rel(riccati_s(0, 1.0).unwrap(), 1.0f64.sinh()) < 1e-15);
    assert!(rel(riccati_e(0, 1.0).unwrap(), 1.0 / E) < 1e-15);
    assert!(rel(riccati_e(1, 1.0).unwrap(), 2.0 / E) < 1e-14);
    assert!(rel(riccati_s_prime(0, 1.0).unwrap(), 1.0f64.cosh()) < 1e-15);
    assert!(rel(riccati_e_prime(0, 1.0).unwrap(), -1.0 / E) < 1e-15);
}

#[test]
fn s1_small_argument() {
    for x in [1e-2, 1e-3, 1e-4] {
        let s = riccati_s(1, x).unwrap();
        assert!(rel(s, x * x / 3.0) < x * x, "x={x}");
    }
}

#[test]
fn arbitrary_precision_point_values() {
    assert!(rel(riccati_s(3, 2.5).unwrap(), 0.521_097_174_562_847_4) < 1e-13);
    assert!(rel(riccati_e(4, 0.7).unwrap(), 422.376_927_941_741_1) < 1e-13);
    let p = f_h_imag_axis(m(1), 0.3, 1.0, EvalOptions::default())
        .unwrap()
        .value;
    assert!(rel(p.re, 0.537_234_002_366_828_7) < 1e-12);
    assert!(rel(p.im, 0.011_573_928_916_243_403) < 1e-12);
}

#[test]
fn wronskian_at_l5_x3() {
    let w = riccati_s(5, 3.0).unwrap() * riccati_e_prime(5, 3.0).unwrap()
        - riccati_s_prime(5, 3.0).unwrap() * riccati_e(5, 3.0).unwrap();
    assert!((w + 1.0).abs() < 1e-13);
}

#[test]
fn f_h_small_argument_l1() {
    assert!((f_h(1, 1e-3).unwrap() + 2.0 / 3.0).abs() < 1e-6);
    let series = -2.0 / 3.0 - 7.0 / 15.0 * 0.01 + 4.0 / 9.0 * 0.001;
    assert!((f_h(1, 0.1).unwrap() - series).abs() < 1e-4);
}

#[test]
fn f_h_large_l() {
    let nu = 40.5;
    assert!(rel(f_h(40, 1.0).unwrap(), -nu / 2.0) < 0.02);
}

fn half_nu_deviation(l: u32, x: f64) -> f64 {
    (f_h(l, x).unwrap() / (-(f64::from(l) + 0.5) / 2.0) - 1.0).abs()
}

#[test]
fn f_h_approaches_half_nu_monotonically() {
    for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let mut prev = half_nu_deviation(2, x);
        for l in 3..=200 {
            let d = half_nu_deviation(l, x);
            assert!(d <= prev, "x={x} l={l}: {d} > {prev}");
            prev = d;
        }
        assert!(prev < 2e-3, "x={x}");
    }
}

#[test]
fn l1_deviation_dips_near_half() {
    // the l = 1 ratio crosses 1 close to x = 0.5, so l = 1 -> 2 is not monotone there
    assert!((half_nu_deviation(1, 0.5) - 0.008_698).abs() < 1e-5);
    assert!((half_nu_deviation(2, 0.5) - 0.012_88).abs() < 1e-4);
}

#[test]
fn cal_j_closed_form() {
    let j = cal_j(m(1), PI, EvalOptions::default()).unwrap().value;
    assert!(rel(j, 2f64.sqrt() / PI) < 1e-13);
    let small = [1e-2, 1e-3];
    let v: Vec<f64> = small
        .iter()
        .map(|&x| cal_j(m(1), x, EvalOptions::default()).unwrap().value.abs())
        .collect();
    let slope = (v[0] / v[1]).ln() / 10f64.ln();
    assert!((slope - 1.5).abs() < 1e-3);
}

fn dpsi_closed(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    match l {
        1 => c / x - s / (x * x) + s,
        2 => {
            let j = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let dj = (-9.0 / x.powi(4) + 4.0 / (x * x)) * s + (9.0 / x.powi(3) - 1.0 / x) * c;
            j + x * dj
        }
        3 => {
            let psi = |y: f64| {
                let (s, c) = y.sin_cos();
                (15.0 / y.powi(3) - 6.0 / y) * s - (15.0 / (y * y) - 1.0) * c
            };
            let h = 1e-6 * x;
            (psi(x + h) - psi(x - h)) / (2.0 * h)
        }
        _ => unreachable!(),
    }
}

#[test]
fn cal_j_matches_closed_forms() {
    for l in 1..=2 {
        for x in [0.5, 1.0, 3.0, 7.0, 20.0] {
            let got = cal_j(m(l), x, EvalOptions::default()).unwrap().value;
            let expect = -(2.0 * x / PI).sqrt() * dpsi_closed(l, x);
            assert!(rel(got, expect) < 1e-10, "l={l} x={x}");
            assert!(
                rel(
                    -(2.0 * x / PI).sqrt() * riccati_psi_prime(l, x).unwrap(),
                    expect
                ) < 1e-10
            );
        }
    }
    for x in [1.0, 3.0, 7.0] {
        let got = cal_j(m(3), x, EvalOptions::default()).unwrap().value;
        let expect = -(2.0 * x / PI).sqrt() * dpsi_closed(3, x);
        assert!(rel(got, expect) < 1e-7, "l=3 x={x}");
    }
}

#[test]
fn imag_axis_decomposition() {
    let opts = EvalOptions::default();
    for (l, x, lam) in [(1, 0.4, 2.0), (3, 2.5, 0.1), (7, 9.0, 5.0)] {
        let j = cal_j(m(l), x, opts).unwrap().value;
        let y = cal_y(m(l), x, opts).unwrap().value;
        let p = f_h_imag_axis(m(l), x, lam, opts).unwrap().value;
        let re = -x * x + lam * PI / 2.0 * j * y;
        let im = lam * PI / 2.0 * j * j;
        assert!((p.re - re).abs() < 1e-12 * (x * x).max(re.abs()));
        assert!(rel(p.im, im) < 1e-12);
    }
}

#[test]
fn zero_coupling_imag_axis() {
    for l in [1, 5, 50] {
        for x in [1e-3, 1.0, 30.0] {
            let p = f_h_imag_axis(m(l), x, 0.0, EvalOptions::default())
                .unwrap()
                .value;
            assert_eq!((p.re, p.im), (-x * x, 0.0));
        }
    }
}

#[test]
fn series_coefficients() {
    let s1 = f_h_series(m(1), 3).unwrap();
    let c: Vec<(u32, f64)> = s1.iter().map(|t| (t.power, t.coefficient)).collect();
    assert_eq!(c.len(), 3);
    assert!((c[0].1 + 2.0 / 3.0).abs() < 1e-15 && c[0].0 == 0);
    assert!((c[1].1 + 7.0 / 15.0).abs() < 1e-15 && c[1].0 == 2);
    assert!((c[2].1 - 4.0 / 9.0).abs() < 1e-15 && c[2].0 == 3);
    let s2 = f_h_series(m(2), 0).unwrap();
    assert!((s2[0].coefficient + 1.2).abs() < 1e-15);
    // Gamma(5/2) = 3 sqrt(pi) / 4
    let gamma52 = 0.75 * PI.sqrt();
    let odd = 2f64.powi(-4) * 4.0 * PI / (gamma52 * gamma52);
    assert!((c[2].1 - odd).abs() < 1e-15);
    assert!(f_h_series(m(1), 5).is_err());
}

fn slope_of_remainder(l: u32, order: u32) -> f64 {
    let series = f_h_series(m(l), order).unwrap();
    let rem = |x: f64| {
        let s: f64 = series
            .iter()
            .map(|t| t.coefficient * x.powi(t.power as i32))
            .sum();
        (f_h(l, x).unwrap() - s).abs()
    };
    let (x1, x2) = (0.02, 0.04);
    (rem(x2) / rem(x1)).ln() / (x2 / x1).ln()
}

#[test]
fn series_remainder_slopes() {
    // after x^0, x^2, x^3 the l = 1 remainder starts at x^4
    assert!((slope_of_remainder(1, 3) - 4.0).abs() < 0.05);
    // for l = 2, 3 only x^0 and x^2 are kept below x^{2l+1}
    assert!((slope_of_remainder(2, 2) - 4.0).abs() < 0.05);
    assert!((slope_of_remainder(3, 2) - 4.0).abs() < 0.05);
}

#[test]
fn digamma_values() {
    assert!((digamma_re_shifted(1e8) + EULER_GAMMA).abs() < 1e-12);
    let oracle = [
        (0.1, 2.303_419_263_671_412_5),
        (0.5, 0.714_591_515_373_977_5),
        (1.0, 0.094_650_320_622_476_98),
        (2.0, -0.328_886_357_229_459_35),
        (10.0, -0.565_297_790_217_198_6),
    ];
    for (xi, v) in oracle {
        assert!((digamma_re_shifted(xi) - v).abs() < 1e-10, "xi={xi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn wronskian_property(l in 0u32..=60, lx in -3.0f64..1.699) {
        let x = 10f64.powf(lx);
        let w = riccati_s(l, x).unwrap() * riccati_e_prime(l, x).unwrap()
            - riccati_s_prime(l, x).unwrap() * riccati_e(l, x).unwrap();
        prop_assume!(w.is_finite());
        prop_assert!((w + 1.0).abs() < 1e-12, "l={} x={} w={}", l, x, w);
    }

    #[test]
    fn imaginary_part_nonnegative(l in 1u32..=200, x in 1e-4f64..80.0, lam in 0.0f64..20.0) {
        let p = f_h_imag_axis(m(l), x, lam, EvalOptions::default()).unwrap().value;
        prop_assert!(p.im >= 0.0);
    }
}
