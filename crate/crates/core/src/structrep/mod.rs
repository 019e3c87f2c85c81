//! Structured representation of Λ_{i,j}: finite sums Σ_l P_l(x) B̃_{β+l}(x)
//! with Laurent-polynomial coefficients, and the truncated t-series engine
//! that extracts them from the generating functions.

mod expand;
mod laurent;
mod series;
mod structured;

pub use expand::{exp_laurent_series, expand_generating, laguerre_generating, MAX_ORDER};
pub use laurent::{LaurentPoly, Monomial, PRUNE_BELOW};
pub use series::{
    binomial_coeffs, binomial_series, series_add, series_mul, series_scale, SeriesCoeff, TruncatedSeries,
};
pub use structured::{LadderTerm, StructuredFn};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::{ParamSet, SolutionKind};
use crate::specfun::BesselKind;

/// Guard terms added above the requested index when expanding.
pub const GUARD_TERMS: u32 = 2;

/// Λ_{i,j}^{μ,ν} as a structured function together with its labels.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredEigenfunction {
    pub params: ParamSet,
    pub kind: SolutionKind,
    pub j: i64,
    pub func: StructuredFn,
}

/// JSON form `{i, j, mu, nu, beta, kind, terms: [{l, poly: [{p, c}]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenfunctionJson {
    pub i: u8,
    pub j: i64,
    pub mu: f64,
    pub nu: f64,
    pub beta: f64,
    pub kind: BesselKind,
    pub terms: Vec<LadderTerm>,
}

impl StructuredEigenfunction {
    /// Expands the generating function far enough to read off Λ_{i,j}.
    pub fn build(kind: SolutionKind, p: &ParamSet, j: i64) -> Result<Self> {
        if j < kind.min_j(p) {
            kind.check(p)?;
            return Ok(Self { params: *p, kind, j, func: StructuredFn::zero(kind.nu_kind(), p.nu / 2.0) });
        }
        Ok(Self::build_range(kind, p, j, j)?.pop().expect("one entry"))
    }

    /// Λ_{i,j} for j in `from..=to`, sharing one expansion.
    pub fn build_range(kind: SolutionKind, p: &ParamSet, from: i64, to: i64) -> Result<Vec<Self>> {
        if from > to {
            return invalid(format!("empty index range {from}..={to}"));
        }
        if to > MAX_ORDER as i64 {
            return invalid(format!("index {to} exceeds the cap {MAX_ORDER}"));
        }
        let order = (to.max(0) as u32 + GUARD_TERMS).min(MAX_ORDER);
        let series = expand_generating(kind, p, order)?;
        Ok((from..=to)
            .map(|j| Self { params: *p, kind, j, func: series.coeff(j as i32).expect("within order") })
            .collect())
    }

    pub fn nu_kind(&self) -> BesselKind {
        self.func.kind
    }

    pub fn beta(&self) -> f64 {
        self.func.beta
    }

    pub fn eigenvalue(&self) -> f64 {
        crate::params::eigenvalue(&self.params, self.j)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.func.eval(x)
    }

    pub fn to_json(&self) -> EigenfunctionJson {
        EigenfunctionJson {
            i: self.kind.i,
            j: self.j,
            mu: self.params.mu,
            nu: self.params.nu,
            beta: self.func.beta,
            kind: self.func.kind,
            terms: self.func.to_terms(),
        }
    }

    pub fn from_json(w: EigenfunctionJson) -> Result<Self> {
        let params = ParamSet::new(w.mu, w.nu)?;
        let kind = SolutionKind::new(w.i)?;
        if w.beta != w.nu / 2.0 {
            return invalid(format!("beta {} is not nu/2", w.beta));
        }
        if w.kind != kind.nu_kind() {
            return invalid(format!("ladder kind {:?} does not match i = {}", w.kind, w.i));
        }
        let func = StructuredFn::from_terms(w.kind, w.beta, w.terms)?;
        Ok(Self { params, kind, j: w.j, func })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("finite coefficients serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let w: EigenfunctionJson = serde_json::from_str(s)
            .map_err(|e| crate::error::QeError::InvalidParams(format!("eigenfunction JSON: {e}")))?;
        Self::from_json(w)
    }
}

/// Value of a structured eigenfunction at x.
pub fn evaluate(f: &StructuredEigenfunction, x: f64) -> Result<f64> {
    f.evaluate(x)
}
