//! Coefficient extraction that bypasses the structured engine: a discrete
//! Cauchy integral of G_i(t, x) over |t| = r, and finite differences in t.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dd::DoubleDouble;
use crate::error::{invalid, QeError, Result};
use crate::params::{ParamSet, SolutionKind};
use crate::specfun::bessel_dd::{i_norm_dd, ladder_dd};
use crate::specfun::elementary::{i_norm_complex, k_half_complex};
use crate::specfun::BesselKind;

pub const DEFAULT_RADIUS: f64 = 0.25;

/// Radii tried by [`oracle_coefficients_best`].
pub const RADII: [f64; 4] = [0.25, 0.5, 0.75, 0.9];

/// Base step of the finite-difference oracle; balances the O(h⁶) remainder
/// against rounding in the sampled values.
pub const FD_STEP: f64 = 0.02;

/// Aliased bins around N/2 must sit this far below the largest bin.
const TAIL_RATIO: f64 = 1e-13;

/// Largest number of circle samples before giving up on the tail.
pub const MAX_SAMPLES: usize = 1 << 14;

/// Coefficients below this fraction of their Cauchy bound are compared on
/// the scale of the bound rather than relatively.
pub const ZERO_FLOOR: f64 = 1e-6;

/// Laurent coefficients read off a sampled circle. `values[k]` is Λ_{first+k};
/// `below[k]` is the estimate for index first−1−k, which should vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyCoefficients {
    pub first: i64,
    pub values: Vec<f64>,
    pub below: Vec<f64>,
    pub radius: f64,
    pub samples: usize,
    /// max |G_i| (times |t|^μ for i = 3, 4) on the circle.
    pub circle_max: f64,
}

impl CauchyCoefficients {
    pub fn get(&self, j: i64) -> Option<f64> {
        if j >= self.first {
            self.values.get((j - self.first) as usize).copied()
        } else {
            self.below.get((self.first - 1 - j) as usize).copied()
        }
    }

    /// Cauchy bound max|f|/r^n on the coefficient of index j.
    pub fn bound(&self, j: i64) -> f64 {
        self.circle_max / self.radius.powi((j - self.first) as i32)
    }

    /// |oracle − value| / max(|value|, ZERO_FLOOR · bound).
    pub fn deviation(&self, j: i64, value: f64) -> Option<f64> {
        let c = self.get(j)?;
        let denom = value.abs().max(ZERO_FLOOR * self.bound(j));
        Some(if denom == 0.0 { (c - value).abs() } else { (c - value).abs() / denom })
    }
}

/// G_i^{μ,ν}(t, x) = (1−t)^{−(μ+ν+2)/2} A(tx/(1−t)) B(x/(1−t)) for complex t,
/// with A = Ĩ_{μ/2} (i = 1, 2) or K̃_{μ/2} (i = 3, 4) and B = Ĩ_{ν/2} (i odd) or
/// K̃_{ν/2} (i even). Needs odd integer μ, ν.
pub fn generating_complex(kind: SolutionKind, p: &ParamSet, t: Complex64, x: f64) -> Result<Complex64> {
    let (Some(m), Some(n)) = (p.mu_int(), p.nu_int()) else {
        return invalid("complex generating function needs integer mu and nu");
    };
    if m % 2 == 0 || n % 2 == 0 {
        return invalid(format!("complex Bessel path needs odd mu and nu, got ({m}, {n})"));
    }
    let one_minus = Complex64::new(1.0, 0.0) - t;
    let pre = one_minus.powf(-(p.mu + p.nu + 2.0) / 2.0);
    let w = t * x / one_minus;
    let z = Complex64::new(x, 0.0) / one_minus;
    let a = if kind.delta > 0 { i_norm_complex(p.mu / 2.0, w) } else { k_half_complex(m as i32, w) };
    let b = match kind.nu_kind() {
        BesselKind::I => i_norm_complex(p.nu / 2.0, z),
        BesselKind::K => k_half_complex(n as i32, z),
    };
    Ok(pre * a * b)
}

/// Λ_{i,j}(x) for j up to `j_max` from N samples of G_i on |t| = radius, where
/// N starts at 4(j_max+μ+4) rounded up to a power of two and doubles until
/// the bins around N/2 are negligible. For i = 3, 4 the samples are t^μ G_i.
pub fn oracle_coefficient_fft(
    kind: SolutionKind,
    p: &ParamSet,
    x: f64,
    j_max: u32,
    radius: f64,
) -> Result<CauchyCoefficients> {
    if !(radius > 0.0 && radius < 1.0) {
        return invalid(format!("radius must lie in (0, 1), got {radius}"));
    }
    kind.check(p)?;
    let shift = if kind.delta > 0 { 0 } else { p.mu_int().unwrap_or(0) };
    let top = j_max as i64 + shift;
    let mut n = (4 * (top.max(0) as usize + 4)).next_power_of_two();
    let mut planner = FftPlanner::new();
    loop {
        let mut buf: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64);
                generating_complex(kind, p, t, x).map(|g| g * t.powi(shift as i32))
            })
            .collect::<Result<_>>()?;
        let circle_max = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
        planner.plan_fft_forward(n).process(&mut buf);
        let peak = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tail = (n / 2 - 2..=n / 2 + 2).map(|k| buf[k].norm()).fold(0.0, f64::max);
        if !(tail <= TAIL_RATIO * peak) {
            if n >= MAX_SAMPLES || !tail.is_finite() {
                return Err(QeError::Numerical(format!(
                    "coefficient tail {tail:e} of peak {peak:e} does not decay at radius {radius}"
                )));
            }
            n *= 2;
            continue;
        }
        let coeff = |bin: usize, power: i64| buf[bin].re / (n as f64 * radius.powi(power as i32));
        let values = (0..=top).map(|k| coeff(k as usize, k)).collect();
        let below = (1..=4).map(|k| coeff(n - k, -(k as i64))).collect();
        return Ok(CauchyCoefficients { first: -shift, values, below, radius, samples: n, circle_max });
    }
}

/// Coefficient estimates from each radius in [`RADII`]; [`best_for`] picks,
/// per index, the one with the smallest Cauchy bound.
pub fn oracle_coefficients_best(
    kind: SolutionKind,
    p: &ParamSet,
    x: f64,
    j_max: u32,
) -> Result<Vec<CauchyCoefficients>> {
    let mut out = Vec::new();
    let mut last_err = None;
    for r in RADII {
        match oracle_coefficient_fft(kind, p, x, j_max, r) {
            Ok(c) => out.push(c),
            Err(e @ QeError::Numerical(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match (out.is_empty(), last_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(out),
    }
}

pub fn best_for(set: &[CauchyCoefficients], j: i64) -> Option<&CauchyCoefficients> {
    set.iter().min_by(|a, b| a.bound(j).total_cmp(&b.bound(j)))
}

/// G_i(t, x) for small real t in double-double; any (μ, ν) with i = 1, 2.
fn generating_real(kind: SolutionKind, p: &ParamSet, t: DoubleDouble, x: f64) -> Result<DoubleDouble> {
    let one_minus = DoubleDouble::ONE - t;
    let pre = (one_minus.ln() * (-(DoubleDouble::from_f64(p.mu) + p.nu + 2.0) * 0.5)).exp();
    let w = (t * x / one_minus).to_f64();
    let z = (DoubleDouble::from_f64(x) / one_minus).to_f64();
    let a = i_norm_dd(DoubleDouble::from_f64(p.mu) * 0.5, w);
    let b = ladder_dd(kind.nu_kind(), p.nu / 2.0, z, 0)?[0];
    Ok(pre * a * b)
}

/// Λ_{i,j}(x) = G^{(j)}(0)/j! by central differences of step h, h/2, h/4
/// combined by Richardson extrapolation. i ∈ {1, 2}, j ≤ 3.
pub fn oracle_coefficient_fd(kind: SolutionKind, p: &ParamSet, j: u32, x: f64, h: f64) -> Result<f64> {
    if kind.delta < 0 {
        return invalid("finite differences need a generating function analytic at t = 0 (i = 1, 2)");
    }
    if j > 3 {
        return invalid(format!("finite-difference oracle covers j <= 3, got {j}"));
    }
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let diff = |h: f64| -> Result<DoubleDouble> {
        let mut s = DoubleDouble::ZERO;
        for k in 0..=j {
            let t = (j as f64 / 2.0 - k as f64) * h;
            let c = binom[j as usize][k as usize] * if k % 2 == 0 { 1.0 } else { -1.0 };
            s += generating_real(kind, p, DoubleDouble::from_f64(t), x)? * c;
        }
        Ok(s / DoubleDouble::from_f64(h).powi(j as i32))
    };
    let d = [diff(h)?, diff(h / 2.0)?, diff(h / 4.0)?];
    let r1 = [(d[1] * 4.0 - d[0]) / 3.0, (d[2] * 4.0 - d[1]) / 3.0];
    let r2 = (r1[1] * 16.0 - r1[0]) / 15.0;
    let fact = [1.0, 1.0, 2.0, 6.0][j as usize];
    Ok(r2.to_f64() / fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(i: u8) -> SolutionKind {
        SolutionKind::new(i).unwrap()
    }

    fn ps(m: f64, n: f64) -> ParamSet {
        ParamSet::new(m, n).unwrap()
    }

    #[test]
    fn ground_state_example() {
        // Λ_{2,0}^{3,1}(1) = K̃_{1/2}(1)/Γ(5/2) = 4/(3e)
        let c = oracle_coefficient_fft(kind(2), &ps(3.0, 1.0), 1.0, 4, DEFAULT_RADIUS).unwrap();
        let want = 4.0 / (3.0 * 1f64.exp());
        assert!((c.get(0).unwrap() - want).abs() < 1e-14, "{}", c.get(0).unwrap());
        assert!(c.get(-1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negative_range_vanishes() {
        for i in 1..=4 {
            let c = oracle_coefficient_fft(kind(i), &ps(3.0, 1.0), 0.7, 3, DEFAULT_RADIUS).unwrap();
            for k in 1..=4 {
                assert!(c.get(c.first - k).unwrap().abs() < 1e-12, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn radius_independence() {
        // rounding grows like r^{−(j+shift)}, so i = 3, 4 are compared lower
        let p = ps(5.0, 3.0);
        for (i, top) in [(1, 4), (2, 4), (3, 0), (4, 0)] {
            let a = oracle_coefficient_fft(kind(i), &p, 1.0, 4, 0.2).unwrap();
            let b = oracle_coefficient_fft(kind(i), &p, 1.0, 4, 0.3).unwrap();
            for j in a.first..=top {
                let d = a.deviation(j, b.get(j).unwrap()).unwrap();
                assert!(d <= 1e-10, "i={i} j={j}: {d:e}");
            }
        }
    }

    #[test]
    fn best_radius_has_smallest_bound() {
        let set = oracle_coefficients_best(kind(3), &ps(3.0, 1.0), 0.25, 10).unwrap();
        assert_eq!(set.len(), RADII.len());
        assert!(best_for(&set, 10).unwrap().radius > 0.5);
        assert_eq!(best_for(&set, -3).unwrap().first, -3);
    }

    #[test]
    fn rejects_even_and_bad_radius() {
        assert!(oracle_coefficient_fft(kind(2), &ps(4.0, 2.0), 1.0, 2, 0.25).is_err());
        assert!(oracle_coefficient_fft(kind(2), &ps(3.0, 1.0), 1.0, 2, 1.0).is_err());
    }

    #[test]
    fn finite_differences_match_cauchy() {
        let p = ps(3.0, 1.0);
        for i in [1, 2] {
            let c = oracle_coefficient_fft(kind(i), &p, 1.5, 3, DEFAULT_RADIUS).unwrap();
            for j in 0..=3u32 {
                let fd = oracle_coefficient_fd(kind(i), &p, j, 1.5, FD_STEP).unwrap();
                let v = c.get(j as i64).unwrap();
                assert!((fd - v).abs() <= 1e-7 * v.abs(), "i={i} j={j}: {fd} {v}");
            }
        }
    }
}
