//! Evaluation entry points for Λ_{i,j}^{μ,ν}(x): the structured engine, the
//! Laguerre forms at ν = ±1, batch tabulation and the asymptotic checks.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{invalid, Result};
use crate::params::{eigenvalue, leading_asymptotic, ParamSet, SolutionKind};
use crate::specfun::bessel_dd::ladder_dd;
use crate::specfun::gamma_dd;
use crate::specfun::laguerre::laguerre_abs_scale;
use crate::structrep::StructuredEigenfunction;

/// Agreement required between engine and closed form on [0.1, 20].
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    NuMinus1,
    NuPlus1,
}

/// Which Laguerre form applies, if any: i = 1, 2 at ν = −1 and i = 2 at ν = 1.
pub fn closed_form_for(kind: SolutionKind, p: &ParamSet) -> Option<ClosedForm> {
    if p.mu <= -1.0 {
        return None;
    }
    match (kind.i, p.nu) {
        (1 | 2, n) if n == -1.0 => Some(ClosedForm::NuMinus1),
        (2, n) if n == 1.0 => Some(ClosedForm::NuPlus1),
        _ => None,
    }
}

/// One Λ_{i,j}^{μ,ν}, with its structured form built on first use.
#[derive(Debug)]
pub struct EigenfunctionHandle {
    pub kind: SolutionKind,
    pub j: i64,
    pub params: ParamSet,
    pub closed_form: Option<ClosedForm>,
    rep: OnceLock<Result<StructuredEigenfunction>>,
}

impl EigenfunctionHandle {
    pub fn new(kind: SolutionKind, p: &ParamSet, j: i64) -> Result<Self> {
        kind.check(p)?;
        Ok(Self { kind, j, params: *p, closed_form: closed_form_for(kind, p), rep: OnceLock::new() })
    }

    /// Λ ≡ 0 below the first index.
    pub fn vanishes(&self) -> bool {
        self.j < self.kind.min_j(&self.params)
    }

    pub fn structured(&self) -> Result<&StructuredEigenfunction> {
        self.rep
            .get_or_init(|| StructuredEigenfunction::build(self.kind, &self.params, self.j))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Closed form when there is one, otherwise the engine.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.vanishes() {
            return Ok(0.0);
        }
        let Some(cf) = self.closed_form else {
            return self.eval_engine(x);
        };
        let (v, scale) = closed_form_dd(cf, self.kind, &self.params, self.j, x)?;
        if cfg!(debug_assertions) && (0.1..=20.0).contains(&x) {
            if let Some(Ok(f)) = self.rep.get() {
                let (e, escale) = f.func.eval_dd_scaled(x)?;
                let dev = deviation(e, v, escale.max(scale));
                debug_assert!(dev <= CLOSED_FORM_TOL, "closed form off by {dev:e} at x={x}");
            }
        }
        Ok(v.to_f64())
    }

    /// Value from the structured representation, bypassing closed forms.
    pub fn eval_engine(&self, x: f64) -> Result<f64> {
        if self.vanishes() {
            return Ok(0.0);
        }
        self.structured()?.func.eval(x)
    }

    /// Deviation between engine and closed form at x, or None without one.
    pub fn closed_form_deviation(&self, x: f64) -> Result<Option<f64>> {
        let Some(cf) = self.closed_form else {
            return Ok(None);
        };
        if self.vanishes() {
            return Ok(Some(0.0));
        }
        let (v, scale) = closed_form_dd(cf, self.kind, &self.params, self.j, x)?;
        let (e, escale) = self.structured()?.func.eval_dd_scaled(x)?;
        Ok(Some(deviation(e, v, escale.max(scale))))
    }
}

/// |a − b| / max(|b|, ε·scale): relative, except within rounding of a zero.
fn deviation(a: DoubleDouble, b: DoubleDouble, scale: f64) -> f64 {
    let d = (a - b).to_f64().abs();
    let denom = b.to_f64().abs().max(f64::EPSILON * scale);
    if denom == 0.0 {
        d
    } else {
        d / denom
    }
}

/// L_j^α(x) in double-double by the three-term recurrence.
fn laguerre_dd(n: u32, alpha: DoubleDouble, x: DoubleDouble) -> DoubleDouble {
    let mut prev = DoubleDouble::ONE;
    if n == 0 {
        return prev;
    }
    let mut cur = alpha + 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((alpha + (2.0 * kf + 1.0) - x) * cur - (alpha + kf) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// The Laguerre forms with their absolute term scale:
/// Λ_{2,j}^{μ,−1} = 2^{μ−1}Γ(j+(μ+1)/2)/Γ(j+μ+1) · e^{−x}L_j^μ(2x),
/// Λ_{2,j}^{μ,1} = (2/x)Λ_{2,j}^{μ,−1}, and
/// Λ_{1,j}^{μ,−1} = 2^{μ−1}Γ(j+(μ+1)/2)/(πΓ(j+μ+1)) · (e^{−x}L_j^μ(2x) + e^{x}L_j^μ(−2x)).
pub fn closed_form_dd(cf: ClosedForm, kind: SolutionKind, p: &ParamSet, j: i64, x: f64) -> Result<(DoubleDouble, f64)> {
    if j < 0 {
        return Ok((DoubleDouble::ZERO, 0.0));
    }
    let n = j as u32;
    let m = DoubleDouble::from_f64(p.mu);
    let mut c = (DoubleDouble::LN_2 * (m - 1.0)).exp() * gamma_dd(m * 0.5 + 0.5) / gamma_dd(m + 1.0);
    for k in 0..n {
        c = c * (m * 0.5 + (k as f64 + 0.5)) / (m + (k as f64 + 1.0));
    }
    let xd = DoubleDouble::from_f64(x);
    let em = (-xd).exp();
    let lm = laguerre_dd(n, m, xd * 2.0);
    let sm = laguerre_abs_scale(n, p.mu, 2.0 * x);
    match (cf, kind.i) {
        (ClosedForm::NuMinus1, 2) => Ok((c * em * lm, c.to_f64().abs() * em.to_f64() * sm)),
        (ClosedForm::NuPlus1, 2) => {
            if x == 0.0 {
                return invalid("Λ_{2,j}^{μ,1} is singular at x = 0");
            }
            let f = xd.recip() * 2.0;
            Ok((f * c * em * lm, (f * c).to_f64().abs() * em.to_f64() * sm))
        }
        (ClosedForm::NuMinus1, 1) => {
            let ep = xd.exp();
            let lp = laguerre_dd(n, m, xd * -2.0);
            let sp = laguerre_abs_scale(n, p.mu, -2.0 * x);
            let c = c / DoubleDouble::PI;
            let v = c * (em * lm + ep * lp);
            let s = c.to_f64().abs() * (em.to_f64() * sm + ep.to_f64() * sp);
            Ok((v, s))
        }
        _ => invalid(format!("no closed form for i = {} at nu = {}", kind.i, p.nu)),
    }
}

/// Λ_{i,j}^{μ,ν}(x); exactly 0 below the first index.
pub fn lambda_eval(kind: SolutionKind, j: i64, p: &ParamSet, x: f64) -> Result<f64> {
    EigenfunctionHandle::new(kind, p, j)?.eval(x)
}

/// Rows j = 0..=j_max, columns xs. Entries equal [`lambda_eval`] bitwise: the
/// engine path shares one expansion across j and one ladder per x.
pub fn lambda_batch(kind: SolutionKind, p: &ParamSet, j_max: u32, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    kind.check(p)?;
    let js: Vec<i64> = (0..=j_max as i64).collect();
    let rows: Vec<Vec<f64>> = if let Some(cf) = closed_form_for(kind, p) {
        js.iter()
            .map(|&j| {
                xs.par_iter()
                    .map(|&x| closed_form_dd(cf, kind, p, j, x).map(|(v, _)| v.to_f64()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?
    } else {
        let min_j = kind.min_j(p);
        let from = min_j.max(0).min(j_max as i64);
        let fns = StructuredEigenfunction::build_range(kind, p, from, j_max as i64)?;
        let len = fns.iter().filter_map(|f| f.func.max_ladder()).max().unwrap_or(0) as usize;
        let cols: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                let needs_ladder = x != 0.0 && fns.iter().any(|f| !f.func.is_zero());
                let lad = if needs_ladder { ladder_dd(fns[0].func.kind, fns[0].func.beta, x, len).ok() } else { None };
                js.iter()
                    .map(|&j| {
                        if j < min_j {
                            return Ok(0.0);
                        }
                        let f = &fns[(j - from) as usize];
                        f.func.eval_dd_on(x, lad.as_deref()).map(DoubleDouble::to_f64)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        js.iter().enumerate().map(|(r, _)| cols.iter().map(|c| c[r]).collect()).collect()
    };
    Ok(rows)
}

/// (Λ(x0)·x0^{−exponent}, leading constant), with −log(x0/2) divided out in
/// the logarithmic rows.
pub fn small_x_check(kind: SolutionKind, p: &ParamSet, j: i64, x0: f64) -> Result<(f64, f64)> {
    let lead = leading_asymptotic(kind, p, j)?;
    let v = lambda_eval(kind, j, p, x0)?;
    let mut measured = v * x0.powf(-lead.exponent);
    if lead.log_flag {
        measured /= -(x0 / 2.0).ln();
    }
    Ok((measured, lead.constant))
}

/// Λ_{i,j}(x) / (x^{j−(ν+1)/2} e^{±x}) for i = 1 (+) and i = 2 (−); tends to a
/// nonzero constant as x → ∞.
pub fn large_x_ratio(kind: SolutionKind, p: &ParamSet, j: i64, x: f64) -> Result<f64> {
    let sign = match kind.i {
        1 => 1.0,
        2 => -1.0,
        i => return invalid(format!("large-x constant only exists for i = 1, 2, got {i}")),
    };
    let v = lambda_eval(kind, j, p, x)?;
    let e = j as f64 - (p.nu + 1.0) / 2.0;
    Ok(v / (x.powf(e) * (sign * x).exp()))
}

/// (λ_j^{μ,ν}, λ_{j+(μ−ν)/2}^{ν,μ}) when μ − ν is an even integer.
pub fn j_symmetry(p: &ParamSet, j: i64) -> Result<(f64, f64)> {
    let d = p.mu - p.nu;
    if d % 2.0 != 0.0 {
        return invalid(format!("mu - nu = {d} is not an even integer"));
    }
    let swapped = ParamSet::new(p.nu, p.mu)?;
    Ok((eigenvalue(p, j), eigenvalue(&swapped, j + (d / 2.0) as i64)))
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
    fn laguerre_dd_matches_double() {
        // mpmath
        for (n, a, x, f) in [(0, 3.0, 1.0, 1.0), (4, 2.5, 3.0, -2.4140625), (9, 5.0, 12.0, -1462.0 / 35.0)] {
            let d = laguerre_dd(n, a.into(), x.into()).to_f64();
            assert!((d - f).abs() <= 1e-15 * f.abs(), "n={n}: {d}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let v = lambda_eval(kind(2), 0, &ps(3.0, -1.0), 1.0).unwrap();
        assert!((v - 2.0 / 3.0 * (-1f64).exp()).abs() < 1e-15);
        let v = lambda_eval(kind(1), 0, &ps(3.0, -1.0), 1.0).unwrap();
        let e = 1f64.exp();
        let want = 2.0 / (3.0 * std::f64::consts::PI) * (e + 1.0 / e);
        assert!((v - want).abs() < 1e-15, "{v} {want}");
        assert!((want - 0.654903761653936).abs() < 1e-14);
    }

    #[test]
    fn negative_index_is_zero() {
        assert_eq!(lambda_eval(kind(2), -1, &ps(3.0, 1.0), 1.0).unwrap(), 0.0);
        assert_eq!(lambda_eval(kind(4), -4, &ps(3.0, 1.0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ic2_is_checked_before_index() {
        assert!(lambda_eval(kind(3), -10, &ps(2.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn dispatch() {
        assert_eq!(closed_form_for(kind(2), &ps(3.0, 1.0)), Some(ClosedForm::NuPlus1));
        assert_eq!(closed_form_for(kind(1), &ps(3.0, -1.0)), Some(ClosedForm::NuMinus1));
        assert_eq!(closed_form_for(kind(1), &ps(3.0, 1.0)), None);
        assert_eq!(closed_form_for(kind(3), &ps(3.0, -1.0)), None);
    }

    #[test]
    fn engine_agrees_with_closed_form() {
        for (i, nu) in [(2, -1.0), (2, 1.0), (1, -1.0)] {
            let h = EigenfunctionHandle::new(kind(i), &ps(3.0, nu), 3).unwrap();
            for x in [0.1, 1.0, 7.0] {
                let d = h.closed_form_deviation(x).unwrap().unwrap();
                assert!(d < 1e-13, "i={i} nu={nu} x={x}: {d:e}");
                h.eval(x).unwrap();
            }
        }
    }

    #[test]
    fn batch_is_bitwise_eval() {
        let xs = [0.3, 1.0, 2.5];
        for (i, m, n) in [(2, 3.0, 1.0), (2, 1.5, 0.5), (4, 3.0, 1.0)] {
            let p = ps(m, n);
            let b = lambda_batch(kind(i), &p, 4, &xs).unwrap();
            for (j, row) in b.iter().enumerate() {
                for (&x, &v) in xs.iter().zip(row) {
                    let e = lambda_eval(kind(i), j as i64, &p, x).unwrap();
                    assert_eq!(v.to_bits(), e.to_bits(), "i={i} ({m},{n}) j={j} x={x}");
                }
            }
        }
    }

    #[test]
    fn small_x_example() {
        let (m, e) = small_x_check(kind(2), &ps(3.0, 1.0), 0, 1e-3).unwrap();
        assert!((e - 4.0 / 3.0).abs() < 1e-14);
        assert!((m - e).abs() < 1e-2 * e);
    }

    #[test]
    fn symmetry_in_j() {
        let (a, b) = j_symmetry(&ps(5.0, 1.0), 3).unwrap();
        assert_eq!(a, b);
        assert!(j_symmetry(&ps(2.5, 1.0), 0).is_err());
    }
}
