//! Closed forms of the normalized Bessel functions at half-integer order.
//!
//! K̃_{m+1/2}(w) = e^{-w} × (Laurent polynomial in w); this is single-valued, so
//! the same coefficients serve negative and complex arguments.

use num_complex::Complex64;

use crate::dd::DoubleDouble;

use super::gamma::factorial;

/// If `alpha` is a half-odd-integer (within 1e-12), returns 2·alpha.
pub fn half_integer_twice(alpha: f64) -> Option<i32> {
    let t = 2.0 * alpha;
    let r = t.round();
    if (t - r).abs() < 1e-12 && (r as i64).rem_euclid(2) == 1 {
        Some(r as i32)
    } else {
        None
    }
}

/// Coefficients `(p, c_p)` with K̃_{two_alpha/2}(w) = √π e^{-w} Σ c_p w^p; `two_alpha` odd.
/// The c_p are dyadic rationals, exact in f64 for moderate orders.
pub fn k_half_unit_coeffs(two_alpha: i32) -> Vec<(i32, f64)> {
    debug_assert!(two_alpha.rem_euclid(2) == 1);
    let m = if two_alpha > 0 { (two_alpha - 1) / 2 } else { (-two_alpha - 1) / 2 };
    let mut out: Vec<(i32, f64)> = (0..=m)
        .map(|k| {
            let c = factorial((m + k) as u32) / (factorial(k as u32) * factorial((m - k) as u32)) * 2f64.powi(m - k);
            (-m - 1 - k, c)
        })
        .collect();
    if two_alpha < 0 {
        // K̃_{-a}(w) = (w/2)^{2a} K̃_a(w), 2a = 2m+1
        let s = 2f64.powi(-(2 * m + 1));
        for e in out.iter_mut() {
            e.0 += 2 * m + 1;
            e.1 *= s;
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

/// The coefficients of [`k_half_unit_coeffs`] in double-double, built by the
/// ratio c_{k+1}/c_k = (m+k+1)(m−k)/(2(k+1)) so they stay exact past 22!.
pub fn k_half_unit_coeffs_dd(two_alpha: i32) -> Vec<(i32, DoubleDouble)> {
    debug_assert!(two_alpha.rem_euclid(2) == 1);
    let m = if two_alpha > 0 { (two_alpha - 1) / 2 } else { (-two_alpha - 1) / 2 };
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut c = DoubleDouble::from_f64(2f64.powi(m));
    for k in 0..=m {
        out.push((-m - 1 - k, c));
        c = c * ((m + k + 1) as f64 * (m - k) as f64) / (2.0 * (k + 1) as f64);
    }
    if two_alpha < 0 {
        let s = 2f64.powi(-(2 * m + 1));
        for e in out.iter_mut() {
            e.0 += 2 * m + 1;
            e.1 = e.1 * s;
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

/// Coefficients `(p, c_p)` with K̃_{two_alpha/2}(w) = e^{-w} Σ c_p w^p; `two_alpha` odd.
pub fn k_half_coeffs(two_alpha: i32) -> Vec<(i32, f64)> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    k_half_unit_coeffs(two_alpha).into_iter().map(|(p, c)| (p, c * sqrt_pi)).collect()
}

/// K̃ at half-integer order in double-double, any nonzero real argument.
pub fn k_half_dd(two_alpha: i32, x: f64) -> DoubleDouble {
    let xd = DoubleDouble::from_f64(x);
    let mut poly = DoubleDouble::ZERO;
    for (p, c) in k_half_unit_coeffs_dd(two_alpha) {
        poly += xd.powi(p) * c;
    }
    (-xd).exp() * poly * DoubleDouble::SQRT_PI
}

/// K̃ at half-integer order for any nonzero real argument.
pub fn k_half_real(two_alpha: i32, x: f64) -> f64 {
    let poly: f64 = k_half_coeffs(two_alpha).iter().map(|&(p, c)| c * x.powi(p)).sum();
    (-x).exp() * poly
}

/// K̃ at half-integer order for a complex argument.
pub fn k_half_complex(two_alpha: i32, z: Complex64) -> Complex64 {
    let poly: Complex64 = k_half_coeffs(two_alpha).iter().map(|&(p, c)| z.powi(p) * c).sum();
    (-z).exp() * poly
}

/// Ĩ at half-integer order `two_alpha/2 ≥ -1/2` in double-double, from the
/// exponential closed form. Even in x.
pub fn i_half_dd(two_alpha: i32, x: f64) -> DoubleDouble {
    let x = x.abs();
    let xd = DoubleDouble::from_f64(x);
    if two_alpha == -1 {
        let e = xd.exp();
        return (e + e.recip()) * 0.5 / DoubleDouble::SQRT_PI;
    }
    if two_alpha < -1 {
        // downward: Ĩ_{a-1} = a Ĩ_a + (x/2)^2 Ĩ_{a+1}
        let a = (two_alpha + 2) as f64 / 2.0;
        let i0 = i_half_dd(two_alpha + 2, x);
        let i1 = i_half_dd(two_alpha + 4, x);
        return i0 * a + i1 * (x * x / 4.0);
    }
    let m = (two_alpha - 1) / 2;
    let ep = xd.exp();
    let em = ep.recip();
    let inv2x = DoubleDouble::ONE / (xd * 2.0);
    let mut s_plus = DoubleDouble::ZERO;
    let mut s_minus = DoubleDouble::ZERO;
    let mut pw = DoubleDouble::ONE;
    for k in 0..=m {
        let c = factorial((m + k) as u32) / (factorial(k as u32) * factorial((m - k) as u32));
        let term = pw * c;
        if k % 2 == 0 {
            s_plus += term;
        } else {
            s_plus -= term;
        }
        s_minus += term;
        pw *= inv2x;
    }
    let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let bracket = ep * s_plus + em * s_minus * sign;
    bracket * 2f64.powi(m) / DoubleDouble::SQRT_PI * xd.powi(-m - 1)
}

/// Ĩ_α(z) for complex z by its entire power series.
pub fn i_norm_complex(alpha: f64, z: Complex64) -> Complex64 {
    let q = z * z / 4.0;
    let mut term = Complex64::new(super::gamma::rgamma(alpha + 1.0), 0.0);
    let mut n0 = 0u32;
    if term.norm() == 0.0 {
        // negative integer order: Ĩ_{-k} = (z/2)^{2k} Ĩ_k
        let k = (-alpha).round() as i32;
        return q.powi(k) * i_norm_complex(k as f64, z);
    }
    let mut sum = term;
    loop {
        n0 += 1;
        let n = n0 as f64;
        term = term * q / (n * (n + alpha));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() || n0 > 2000 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn k_half_examples() {
        let v = k_half_real(-1, 1.0);
        assert!((v - 0.326_024_7).abs() < 1e-7);
        let v = k_half_real(1, 2.0);
        assert!((v - 0.119_937_8).abs() < 1e-7);
        assert!((k_half_real(1, 2.0) - PI.sqrt() / 2.0 * (-2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn k_half_coeffs_three_halves() {
        // K̃_{3/2}(w) = 2√π e^{-w} (w^{-2} + w^{-3})
        let c = k_half_coeffs(3);
        let s = 2.0 * PI.sqrt();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].0, -3);
        assert!((c[0].1 - s).abs() < 1e-15);
        assert_eq!(c[1].0, -2);
        assert!((c[1].1 - s).abs() < 1e-15);
    }

    #[test]
    fn i_half_small_argument() {
        // Ĩ_{5/2}(0) = 1/Γ(7/2) = 8/(15√π)
        let v = i_half_dd(5, 1e-3).to_f64();
        let at0 = 8.0 / (15.0 * PI.sqrt());
        assert!(((v - at0) / at0).abs() < 1e-6);
        let v = i_half_dd(-1, 1.0).to_f64();
        assert!((v - 1f64.cosh() / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn complex_matches_real() {
        let z = Complex64::new(1.7, 0.0);
        let a = i_norm_complex(1.5, z).re;
        let b = i_half_dd(3, 1.7).to_f64();
        assert!(((a - b) / b).abs() < 1e-15);
        let k = k_half_complex(3, z).re;
        assert!(((k - k_half_real(3, 1.7)) / k).abs() < 1e-15);
    }

    #[test]
    fn k_half_dd_matches_f64() {
        for t in [-5, -3, -1, 1, 3, 7] {
            for x in [0.3, 1.0, 4.5, -2.0] {
                let a = k_half_dd(t, x).to_f64();
                let b = k_half_real(t, x);
                assert!(((a - b) / b).abs() < 1e-14, "{t} {x}");
            }
        }
    }

    #[test]
    fn half_integer_detection() {
        assert_eq!(half_integer_twice(0.5), Some(1));
        assert_eq!(half_integer_twice(-1.5), Some(-3));
        assert_eq!(half_integer_twice(1.0), None);
        assert_eq!(half_integer_twice(0.7), None);
    }
}
