//! Gamma, reciprocal gamma and log-gamma for real arguments.

use std::f64::consts::PI;

use crate::dd::DoubleDouble;

/// Taylor coefficients of 1/Γ(1+z) about z = 0.
pub(crate) const RGAMMA1P: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_236,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_337,
    -0.009_621_971_527_876_973_6,
    0.007_218_943_246_663_099_5,
    -0.001_165_167_591_859_065_1,
    -0.000_215_241_674_114_950_97,
    0.000_128_050_282_388_116_19,
    -2.013_485_478_078_823_9e-5,
    -1.250_493_482_142_670_7e-6,
    1.133_027_231_981_695_9e-6,
    -2.056_338_416_977_607_1e-7,
    6.116_095_104_481_415_8e-9,
    5.002_007_644_469_222_9e-9,
    -1.181_274_570_487_020_1e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071_3e-12,
    -3.696_805_618_642_205_7e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_506_8e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
    1.186_692_254_751_600_3e-18,
];

/// 1/Γ(1+z) for |z| ≤ 1 by its Taylor series.
pub(crate) fn rgamma1p_series(z: f64) -> f64 {
    RGAMMA1P.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

fn is_int(x: f64) -> bool {
    x == x.round()
}

/// sin(πx) with exact zeros at integers.
pub fn sin_pi(x: f64) -> f64 {
    if is_int(x) {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.75 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.75 {
        -(PI * (1.0 + r)).sin()
    } else if r > 0.0 {
        (PI * (0.5 - r)).cos()
    } else {
        -(PI * (0.5 + r)).cos()
    }
}

/// Γ(x). Returns NaN at non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && is_int(x) {
        return f64::NAN;
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    let twice = 2.0 * x;
    if is_int(twice) && !is_int(x) {
        // Γ(n + 1/2) = √π Π (k + 1/2)
        let n = (x - 0.5).round() as u32;
        let mut g = std::f64::consts::PI.sqrt();
        for k in 0..n {
            g *= k as f64 + 0.5;
        }
        return g;
    }
    // reduce to [0.5, 1.5) and recur upward
    let shift = (x - 0.5).floor();
    let z = x - 1.0 - shift;
    let mut g = 1.0 / rgamma1p_series(z);
    let mut t = z + 1.0;
    for _ in 0..shift as u32 {
        g *= t;
        t += 1.0;
    }
    g
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && is_int(x) {
        return 0.0;
    }
    if x > 171.7 {
        return (-lngamma(x)).exp();
    }
    if x < 0.5 {
        return sin_pi(x) * gamma(1.0 - x) / PI;
    }
    if (x - 1.0).abs() <= 0.5 {
        return rgamma1p_series(x - 1.0);
    }
    1.0 / gamma(x)
}

/// ln Γ(x) for x > 0.
pub fn lngamma(x: f64) -> f64 {
    if x < 30.0 {
        return gamma(x).abs().ln();
    }
    // Stirling series
    let x2 = x * x;
    let corr =
        1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2) - 1.0 / (1680.0 * x * x2 * x2 * x2);
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// n! as a float.
pub fn factorial(n: u32) -> f64 {
    pochhammer(1.0, n)
}

/// Bernoulli numbers B_2, B_4, …, B_30 as (numerator, denominator).
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// ln Γ(z) in double-double by the Stirling series; needs z ≥ 40.
fn lngamma_dd_large(z: DoubleDouble) -> DoubleDouble {
    let two_pi = DoubleDouble::PI * 2.0;
    let mut s = (z - 0.5) * z.ln() - z + two_pi.ln() * 0.5;
    let zinv = z.recip();
    let zinv2 = zinv * zinv;
    let mut pw = zinv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k + 1) as f64;
        s += DoubleDouble::from_f64(num) / (den * k2 * (k2 - 1.0)) * pw;
        pw *= zinv2;
    }
    s
}

/// Γ(a) in double-double: shift to a+N ≥ 40, Stirling, divide back down.
pub fn gamma_dd(a: DoubleDouble) -> DoubleDouble {
    if a.hi <= 0.0 && is_int(a.hi) && a.lo == 0.0 {
        return DoubleDouble::from_f64(f64::NAN);
    }
    let n = (40.0 - a.hi).ceil().max(0.0) as u32;
    let mut den = DoubleDouble::ONE;
    for k in 0..n {
        den *= a + k as f64;
    }
    lngamma_dd_large(a + n as f64).exp() / den
}

/// 1/Γ(a) in double-double, zero at the poles.
pub fn rgamma_dd(a: DoubleDouble) -> DoubleDouble {
    if a.hi <= 0.0 && is_int(a.hi) && a.lo == 0.0 {
        return DoubleDouble::ZERO;
    }
    gamma_dd(a).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        // mpmath, 30 digits
        let cases = [
            (0.1, 9.513_507_698_668_732),
            (0.7, 1.298_055_332_647_557_8),
            (1.3, 0.897_470_696_306_277_2),
            (3.7, 4.170_651_783_796_603),
            (12.25, 73_711_509.046_769_95),
            (-0.3, -4.326_851_108_825_193),
            (-2.6, -0.888_685_714_646_509_7),
            (50.5, 4.290_462_912_351_96e63),
        ];
        for (x, g) in cases {
            assert!(rel(gamma(x), g) < 4e-15, "gamma({x}) = {} vs {g}", gamma(x));
        }
    }

    #[test]
    fn gamma_integers_and_halves() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert_eq!(gamma(0.5), PI.sqrt());
        assert!(rel(gamma(2.5), 0.75 * PI.sqrt()) < 1e-16);
        assert!(gamma(0.0).is_nan());
        assert!(gamma(-3.0).is_nan());
    }

    #[test]
    fn rgamma_poles_are_zero() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-4.0), 0.0);
        assert!(rel(rgamma(1.5), 2.0 / PI.sqrt()) < 1e-15);
    }

    #[test]
    fn lngamma_large() {
        // ln Γ(100) from mpmath
        assert!(rel(lngamma(100.0), 359.134_205_369_575_4) < 1e-15);
        assert!(rel(lngamma(35.5), 90.354_930_265_818_38) < 1e-14);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(7.3, 0), 1.0);
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(-0.5, 3), -0.375);
    }

    #[test]
    fn gamma_dd_reference_values() {
        // mpmath at 50 digits, split into hi + lo
        let cases = [
            (0.7, 1.298055332647558, -4.633829453496105e-17),
            (1.35, 0.8911514420243009, -5.432922899018247e-17),
            (3.25, 2.5492569667185294, -1.3394559147364056e-16),
            (0.125, 7.533941598797612, -3.3510454171475427e-17),
            (-0.3, -4.326851108825193, 1.393411982225144e-16),
            (12.5, 136843365.46556586, -3.0158040269270164e-09),
            (45.2, 5.6815661248531775e+54, -3.277211847318788e+38),
        ];
        for (a, hi, lo) in cases {
            let g = gamma_dd(DoubleDouble::from_f64(a));
            let want = DoubleDouble::new(hi, lo);
            let err = ((g - want) / want).to_f64().abs();
            assert!(err < 1e-29, "gamma_dd({a}): rel err {err:e}");
        }
        assert!(gamma_dd(DoubleDouble::from_f64(-2.0)).hi.is_nan());
        assert!(rgamma_dd(DoubleDouble::from_f64(0.0)).is_zero());
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert!((sin_pi(0.3) - (0.3 * PI).sin()).abs() < 1e-16);
    }
}
