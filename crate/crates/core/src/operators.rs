//! Exact action of θ, D_{μ,ν}, H_α and S_{μ,±1} on structured functions.

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{QeError, Result};
use crate::params::{eigenvalue_dd, ParamSet, SolutionKind};
use crate::specfun::BesselKind;
use crate::structrep::{LaurentPoly, StructuredEigenfunction, StructuredFn};

/// Relative size below which spurious negative powers are treated as
/// cancelled after multiplying an entire function by x^{-2}.
pub const CANCEL_TOL: f64 = 1e-12;

/// Floor for |Λ| in [`eigen_residual`].
pub const RESIDUAL_FLOOR: f64 = 1e-30;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorName {
    Theta,
    D,
    H,
    SMinus,
    SPlus,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub name: OperatorName,
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SSign {
    Minus,
    Plus,
}

impl SSign {
    /// ν for which S_{μ,sign} squares to D_{μ,ν} + C.
    pub fn nu(self) -> f64 {
        match self {
            SSign::Minus => -1.0,
            SSign::Plus => 1.0,
        }
    }
}

/// C_{μ,±1} with D_{μ,±1} = S_{μ,±1}² − C_{μ,±1}.
pub fn s_constant(mu: f64, sign: SSign) -> f64 {
    let c = (mu + 1.0).powi(2) / 2.0;
    match sign {
        SSign::Minus => c,
        SSign::Plus => c + 2.0,
    }
}

pub fn apply_theta(f: &StructuredFn) -> StructuredFn {
    f.theta()
}

/// x^k f.
pub fn apply_x_power(k: i32, f: &StructuredFn) -> StructuredFn {
    f.shifted(k)
}

pub fn apply_derivative(f: &StructuredFn) -> StructuredFn {
    f.derivative()
}

/// θf + c f.
fn theta_plus(f: &StructuredFn, c: impl Into<DoubleDouble>) -> StructuredFn {
    let mut out = f.theta();
    out.add_scaled(f, c);
    out
}

pub fn apply_h(alpha: f64, f: &StructuredFn) -> StructuredFn {
    theta_plus(f, (DoubleDouble::from_f64(alpha) + 2.0) * 0.5)
}

/// Removes negative powers created from an input without them, provided
/// they cancelled to `CANCEL_TOL` of the term scale; otherwise reports.
fn settle_negative_powers(input: &StructuredFn, mut out: StructuredFn) -> Result<StructuredFn> {
    if input.kind != BesselKind::I || input.min_exp().is_none_or(|m| m < 0) {
        return Ok(out);
    }
    let scale = out.terms.values().flat_map(|p| p.coeffs.values()).fold(0.0f64, |a, c| a.max(c.hi.abs()));
    for p in out.terms.values_mut() {
        let neg: Vec<(i32, f64)> = p.coeffs.range(..0).map(|(&e, c)| (e, c.to_f64())).collect();
        for (e, c) in neg {
            if c.abs() > CANCEL_TOL * scale {
                return Err(QeError::Numerical(format!("x^{e} coefficient {c:e} failed to cancel (scale {scale:e})")));
            }
            p.coeffs.remove(&e);
        }
    }
    out.terms.retain(|_, p| !p.is_zero());
    Ok(out)
}

/// D_{μ,ν} in the expanded form
/// x^{-2}θ(θ+μ)(θ+ν)(θ+μ+ν) + x² − 2(θ² + (μ+ν+2)θ + (μ+ν+2)(μ+ν+4)/4).
/// Coefficients depend on μ, ν only through μ+ν and μν.
pub fn apply_d(p: &ParamSet, f: &StructuredFn) -> Result<StructuredFn> {
    let s = DoubleDouble::from_f64(p.mu) + p.nu;
    let q = DoubleDouble::from_f64(p.mu) * p.nu;
    let t1 = f.theta();
    let t2 = t1.theta();
    let t3 = t2.theta();
    let t4 = t3.theta();
    // θ(θ+μ)(θ+ν)(θ+μ+ν) = θ⁴ + 2sθ³ + (s²+q)θ² + sqθ
    let mut quartic = t4;
    quartic.add_scaled(&t3, s * 2.0);
    quartic.add_scaled(&t2, s * s + q);
    quartic.add_scaled(&t1, s * q);
    let mut out = quartic.shifted(-2);
    out.add_assign(&f.shifted(2));
    out.add_scaled(&t2, -2.0);
    out.add_scaled(&t1, (s + 2.0) * -2.0);
    out.add_scaled(f, (s + 2.0) * (s + 4.0) * -0.5);
    settle_negative_powers(f, out)
}

/// D_{μ,ν} in the factored form
/// x^{-2}((θ+ν)(θ+μ+ν) − x²)(θ(θ+μ) − x²) − (μ−ν)(μ+ν+2)/2.
pub fn apply_d_factored(p: &ParamSet, f: &StructuredFn) -> Result<StructuredFn> {
    let mu = DoubleDouble::from_f64(p.mu);
    let nu = DoubleDouble::from_f64(p.nu);
    let inner = {
        let mut g = theta_plus(f, mu).theta();
        g.add_scaled(&f.shifted(2), -1.0);
        g
    };
    let mut outer = theta_plus(&theta_plus(&inner, mu + nu), nu);
    outer.add_scaled(&inner.shifted(2), -1.0);
    let mut out = outer.shifted(-2);
    out.add_scaled(f, (mu - nu) * (mu + nu + 2.0) * -0.5);
    settle_negative_powers(f, out)
}

/// S_{μ,−1} = x^{-1}(θ(θ+μ) − x²), S_{μ,+1} = x^{-1}(θ(θ+μ+2) + μ + 1 − x²).
pub fn apply_s(mu: f64, sign: SSign, f: &StructuredFn) -> StructuredFn {
    let mud = DoubleDouble::from_f64(mu);
    let shift = match sign {
        SSign::Minus => mud,
        SSign::Plus => mud + 2.0,
    };
    let mut g = theta_plus(f, shift).theta();
    if sign == SSign::Plus {
        g.add_scaled(f, mud + 1.0);
    }
    g.add_scaled(&f.shifted(2), -1.0);
    g.shifted(-1)
}

pub fn apply(spec: &OperatorSpec, f: &StructuredFn) -> Result<StructuredFn> {
    Ok(match spec.name {
        OperatorName::Theta => apply_theta(f),
        OperatorName::D => apply_d(&ParamSet::new(spec.mu, spec.nu)?, f)?,
        OperatorName::H => apply_h(spec.alpha, f),
        OperatorName::SMinus => apply_s(spec.mu, SSign::Minus, f),
        OperatorName::SPlus => apply_s(spec.mu, SSign::Plus, f),
    })
}

/// max over xs of |DΛ − λΛ| / (|λ| max(|Λ|, ε·S, floor)), where S is the sum of
/// the absolute values of the terms of Λ and ε the double-precision epsilon.
/// |λ| is replaced by 1 when λ = 0. Evaluated in double-double.
pub fn eigen_residual(kind: SolutionKind, p: &ParamSet, j: i64, xs: &[f64]) -> Result<f64> {
    let f = StructuredEigenfunction::build(kind, p, j)?;
    residual_of(&f, xs)
}

pub fn residual_of(f: &StructuredEigenfunction, xs: &[f64]) -> Result<f64> {
    residual_for_eigenvalue(f, eigenvalue_dd(&f.params, f.j), xs)
}

/// As [`residual_of`] against a caller-supplied eigenvalue.
pub fn residual_for_eigenvalue(f: &StructuredEigenfunction, lam: DoubleDouble, xs: &[f64]) -> Result<f64> {
    let mut r = apply_d(&f.params, &f.func)?;
    r.add_scaled(&f.func, -lam);
    let lam_scale = if lam.is_zero() { 1.0 } else { lam.hi.abs() };
    let mut worst: f64 = 0.0;
    for &x in xs {
        let v = f.func.eval_dd(x)?.to_f64();
        let (_, scale) = f.func.eval_scaled(x)?;
        let res = r.eval_dd(x)?.to_f64();
        let denom = v.abs().max(f64::EPSILON * scale).max(RESIDUAL_FLOOR);
        worst = worst.max(res.abs() / (lam_scale * denom));
    }
    Ok(worst)
}

/// Constant polynomial c, as a convenience for building test functions.
pub fn constant_term(kind: BesselKind, beta: f64, l: u32, c: f64) -> StructuredFn {
    StructuredFn::term(kind, beta, l, LaurentPoly::constant(c))
}
