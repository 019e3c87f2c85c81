//! Normalized modified Bessel functions Ĩ_α(x) = (x/2)^{-α} I_α(x) and
//! K̃_α(x) = (x/2)^{-α} K_α(x) for real order.

use serde::{Deserialize, Serialize};

use super::elementary::{half_integer_twice, k_half_real};
use super::gamma::{rgamma, RGAMMA1P};
use crate::error::{invalid, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselKind {
    I,
    K,
}

impl BesselKind {
    /// Sign in d/dx B̃_α = ±(x/2) B̃_{α+1}.
    pub fn deriv_sign(self) -> f64 {
        match self {
            BesselKind::I => 1.0,
            BesselKind::K => -1.0,
        }
    }
}

const SERIES_CAP: u32 = 2000;
const I_ASYMPTOTIC_FROM: f64 = 500.0;

fn i_series(alpha: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = rgamma(alpha + 1.0);
    let mut sum = term;
    for n in 1..SERIES_CAP {
        let nf = n as f64;
        term *= q / (nf * (nf + alpha));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// e^{-x} Ĩ_α(x) from the large-argument expansion.
fn i_scaled_asymptotic(alpha: f64, x: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    let ln_pref = -alpha * (0.5 * x).ln() - 0.5 * (2.0 * std::f64::consts::PI * x).ln();
    ln_pref.exp() * sum
}

fn check_i_order(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return invalid("Bessel order must be finite");
    }
    Ok(())
}

/// Ĩ_α(x); even in x, equal to 1/Γ(α+1) at 0. Negative integer orders use
/// Ĩ_{-k}(x) = (x/2)^{2k} Ĩ_k(x).
pub fn bessel_i_norm(alpha: f64, x: f64) -> Result<f64> {
    check_i_order(alpha)?;
    let x = x.abs();
    if alpha < 0.0 && alpha == alpha.round() {
        let k = -alpha;
        return Ok((0.25 * x * x).powf(k) * bessel_i_norm(k, x)?);
    }
    if x > I_ASYMPTOTIC_FROM {
        return Ok(i_scaled_asymptotic(alpha, x) * x.exp());
    }
    Ok(i_series(alpha, x))
}

/// e^{-|x|} Ĩ_α(x), finite for large arguments.
pub fn bessel_i_norm_scaled(alpha: f64, x: f64) -> Result<f64> {
    check_i_order(alpha)?;
    let x = x.abs();
    if alpha < 0.0 && alpha == alpha.round() {
        let k = -alpha;
        return Ok((0.25 * x * x).powf(k) * bessel_i_norm_scaled(k, x)?);
    }
    if x > I_ASYMPTOTIC_FROM {
        return Ok(i_scaled_asymptotic(alpha, x));
    }
    Ok(i_series(alpha, x) * (-x).exp())
}

/// gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ) for |μ| ≤ 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut pw = 1.0;
    for k in 0..RGAMMA1P.len() / 2 + 1 {
        if 2 * k < RGAMMA1P.len() {
            even += RGAMMA1P[2 * k] * pw;
        }
        if 2 * k + 1 < RGAMMA1P.len() {
            odd += RGAMMA1P[2 * k + 1] * pw;
        }
        pw *= m2;
    }
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

/// Unnormalized (K_μ(x), K_{μ+1}(x)) for |μ| ≤ 1/2, x > 0 (Temme's method).
fn temme_k_pair(mu: f64, x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    let pi = std::f64::consts::PI;
    let xi = 1.0 / x;
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = pi * mu;
        let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..10_000 {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum, sum1 * 2.0 * xi)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..100_000 {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        let h = a1 * h;
        let kmu = (pi / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k1 = kmu * (mu + x + 0.5 - h) * xi;
        (kmu, k1)
    }
}

/// (K̃_α(x), K̃_{α+1}(x)) for α ≥ -1/2 by Temme plus upward recurrence.
fn k_norm_pair_nonneg(alpha: f64, x: f64) -> (f64, f64) {
    let n = (alpha + 0.5).floor();
    let mu = alpha - n;
    let (kmu, k1) = temme_k_pair(mu, x);
    let h = 0.5 * x;
    let mut a = kmu * h.powf(-mu);
    let mut b = k1 * h.powf(-mu - 1.0);
    let r = 4.0 / (x * x);
    let mut order = mu + 1.0;
    for _ in 0..n as u32 {
        let next = r * (order * b + a);
        a = b;
        b = next;
        order += 1.0;
    }
    (a, b)
}

/// K̃_α(x) by the generic (non-elementary) route; x > 0.
pub fn bessel_k_norm_temme(alpha: f64, x: f64) -> f64 {
    if alpha >= -0.5 {
        k_norm_pair_nonneg(alpha, x).0
    } else {
        // K̃_{-a}(x) = (x/2)^{2a} K̃_a(x)
        let a = -alpha;
        (0.5 * x).powf(2.0 * a) * k_norm_pair_nonneg(a, x).0
    }
}

/// K̃_α(x). Half-integer orders use the elementary form, which also accepts
/// negative x; other orders require x > 0.
pub fn bessel_k_norm(alpha: f64, x: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return invalid("Bessel order must be finite");
    }
    if let Some(t) = half_integer_twice(alpha) {
        if x == 0.0 {
            return invalid("K̃ is singular at x = 0");
        }
        return Ok(k_half_real(t, x));
    }
    if x <= 0.0 || !x.is_finite() {
        return invalid(format!("K̃ of order {alpha} needs x > 0, got {x}"));
    }
    Ok(bessel_k_norm_temme(alpha, x))
}

/// B̃_{base+m}(x), m = 0..=M.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselLadder {
    pub kind: BesselKind,
    pub base_order: f64,
    pub x: f64,
    pub values: Vec<f64>,
}

impl BesselLadder {
    /// The first `M+1` ladder values.
    pub fn new(kind: BesselKind, base_order: f64, x: f64, m: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(m + 1);
        fill_ladder(kind, base_order, x, m, &mut values)?;
        Ok(Self { kind, base_order, x, values })
    }

    /// Largest relative defect of the order recurrence along the ladder.
    pub fn recurrence_defect(&self) -> f64 {
        let q = 0.25 * self.x * self.x;
        let mut worst: f64 = 0.0;
        for w in 1..self.values.len().saturating_sub(1) {
            let a = self.base_order + w as f64;
            let (lm, l, lp) = (self.values[w - 1], self.values[w], self.values[w + 1]);
            let (lhs, rhs, scale) = match self.kind {
                BesselKind::I => (a * l, lm - q * lp, lm.abs() + (q * lp).abs()),
                BesselKind::K => (a * l, q * lp - lm, lm.abs() + (q * lp).abs()),
            };
            worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// Writes B̃_{base+m}(x), m = 0..=M into `out` (cleared first).
pub fn fill_ladder(kind: BesselKind, base: f64, x: f64, m: usize, out: &mut Vec<f64>) -> Result<()> {
    out.clear();
    match kind {
        BesselKind::I => {
            if x.abs() > I_ASYMPTOTIC_FROM {
                return Err(crate::error::QeError::Numerical(format!("I-ladder argument {x} overflows")));
            }
            for k in 0..=m {
                out.push(bessel_i_norm(base + k as f64, x)?);
            }
        }
        BesselKind::K => {
            let half = half_integer_twice(base);
            if half.is_none() && x <= 0.0 {
                return invalid(format!("K̃ of order {base} needs x > 0, got {x}"));
            }
            if x == 0.0 {
                return invalid("K̃ is singular at x = 0");
            }
            let direct = |a: f64| -> f64 {
                match half {
                    Some(t) => k_half_real(t + 2 * (a - base).round() as i32, x),
                    None => bessel_k_norm_temme(a, x),
                }
            };
            let r = 4.0 / (x * x);
            for k in 0..=m {
                let a = base + k as f64;
                // recurrence from two entries with nonnegative lower order
                let v = if k >= 2 && a - 2.0 >= 0.0 { r * ((a - 1.0) * out[k - 1] + out[k - 2]) } else { direct(a) };
                out.push(v);
            }
        }
    }
    Ok(())
}

/// Convenience wrapper matching the module's operation list.
pub fn bessel_ladder(kind: BesselKind, base_order: f64, x: f64, m: usize) -> Result<BesselLadder> {
    BesselLadder::new(kind, base_order, x, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn i_examples() {
        assert!(rel(bessel_i_norm(0.5, 0.0).unwrap(), 2.0 / PI.sqrt()) < 1e-15);
        assert!(rel(bessel_i_norm(-0.5, 1.0).unwrap(), 1f64.cosh() / PI.sqrt()) < 1e-15);
        assert_eq!(bessel_i_norm(0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn i_reference_values() {
        // mpmath: (x/2)^-a besseli(a, x)
        let cases = [
            (0.25, 0.7, 1.214_362_897_866_726),
            (0.7, 3.0, 3.303_051_921_480_124),
            (3.0, 12.0, 59.411_541_860_946_485),
            (1.35, 40.0, 2.550_489_417_978_61e14),
        ];
        for (a, x, v) in cases {
            let got = bessel_i_norm(a, x).unwrap();
            assert!(rel(got, v) < 1e-14, "I~({a},{x}) = {got} vs {v}");
        }
    }

    #[test]
    fn i_scaled_branches_agree() {
        for a in [0.0, 0.5, 2.3] {
            let x = I_ASYMPTOTIC_FROM;
            let s = i_series(a, x) * (-x).exp();
            let t = i_scaled_asymptotic(a, x);
            assert!(rel(s, t) < 1e-12, "order {a}: {s} vs {t}");
        }
    }

    #[test]
    fn k_reference_values() {
        // mpmath: (x/2)^-a besselk(a, x)
        let cases = [
            (0.0, 0.001, 7.023_688_800_562_382),
            (0.25, 0.3, 2.326_797_202_707_353),
            (0.7, 1.7, 0.208_218_226_539_613_44),
            (1.0, 5.0, 0.001_617_845_378_180_865_7),
            (4.2, 0.05, 1.111_387_533_879_851_1e14),
            (2.0, 30.0, 1.011_996_872_558_145_1e-16),
        ];
        for (a, x, v) in cases {
            let got = bessel_k_norm(a, x).unwrap();
            assert!(rel(got, v) < 1e-13, "K~({a},{x}) = {got} vs {v}");
        }
    }

    #[test]
    fn k_examples() {
        assert!((bessel_k_norm(-0.5, 1.0).unwrap() - 0.326_024_7).abs() < 1e-7);
        assert!((bessel_k_norm(0.5, 2.0).unwrap() - 0.119_937_8).abs() < 1e-7);
        assert!(bessel_k_norm(0.3, 0.0).is_err());
        assert!(bessel_k_norm(0.5, -1.0).is_ok());
    }

    #[test]
    fn k_log_divergence_at_zero() {
        let x = 1e-8;
        let v = bessel_k_norm(0.0, x).unwrap();
        let lead = -(x / 2.0).ln();
        assert!(((v - lead) / lead).abs() < 0.05);
    }

    #[test]
    fn ladder_examples() {
        let l = bessel_ladder(BesselKind::K, -0.5, 1.0, 1).unwrap();
        assert!((l.values[0] - 0.326_024_7).abs() < 1e-7);
        assert!((l.values[1] - PI.sqrt() * (-1f64).exp()).abs() < 1e-15);
        let l = bessel_ladder(BesselKind::I, 0.0, 0.0, 2).unwrap();
        assert_eq!(l.values, vec![1.0, 1.0, 0.5]);
    }

    #[test]
    fn ladder_recurrences() {
        for kind in [BesselKind::I, BesselKind::K] {
            for base in [-0.5, -0.3, 0.0, 0.7, 1.5] {
                for x in [0.1, 1.0, 7.5, 25.0] {
                    let l = bessel_ladder(kind, base, x, 12).unwrap();
                    assert!(l.recurrence_defect() < 1e-10, "{kind:?} {base} {x}: {}", l.recurrence_defect());
                }
            }
        }
    }

    #[test]
    fn generic_matches_elementary_half_integers() {
        for t in [-1, 1, 3, 5] {
            for i in 1..=100 {
                let x = 0.1 * i as f64;
                let e = k_half_real(t, x);
                let g = bessel_k_norm_temme(t as f64 / 2.0, x);
                assert!(rel(g, e) < 1e-11, "K order {t}/2 at {x}: {g} vs {e}");
                if t >= -1 {
                    let ei = super::super::elementary::i_half_dd(t, x).to_f64();
                    let gi = bessel_i_norm(t as f64 / 2.0, x).unwrap();
                    assert!(rel(gi, ei) < 1e-11, "I order {t}/2 at {x}: {gi} vs {ei}");
                }
            }
        }
    }
}
