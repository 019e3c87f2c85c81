use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::laurent::{LaurentPoly, PRUNE_BELOW};
use crate::dd::DoubleDouble;
use crate::error::{invalid, QeError, Result};
use crate::specfun::bessel_dd::ladder_dd;
use crate::specfun::elementary::half_integer_twice;
use crate::specfun::{fill_ladder, gamma, rgamma, BesselKind};

/// Σ_l P_l(x) · B̃_{β+l}(x) for a fixed Bessel kind and base order β.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredFn {
    pub kind: BesselKind,
    pub beta: f64,
    pub terms: BTreeMap<u32, LaurentPoly>,
}

/// Wire form of one ladder term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderTerm {
    pub l: u32,
    pub poly: LaurentPoly,
}

impl StructuredFn {
    pub fn zero(kind: BesselKind, beta: f64) -> Self {
        Self { kind, beta, terms: BTreeMap::new() }
    }

    /// The single term poly · B̃_{β+l}.
    pub fn term(kind: BesselKind, beta: f64, l: u32, poly: LaurentPoly) -> Self {
        let mut out = Self::zero(kind, beta);
        out.add_poly(l, &poly, 1.0);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(self.kind, self.beta)
    }

    pub fn poly(&self, l: u32) -> Option<&LaurentPoly> {
        self.terms.get(&l)
    }

    pub fn max_ladder(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.values().filter_map(LaurentPoly::min_exp).min()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.values().filter_map(LaurentPoly::max_exp).max()
    }

    fn add_poly(&mut self, l: u32, poly: &LaurentPoly, f: impl Into<DoubleDouble>) {
        let e = self.terms.entry(l).or_default();
        e.add_scaled(poly, f);
        if e.is_zero() {
            self.terms.remove(&l);
        }
    }

    fn same_basis(&self, other: &StructuredFn) -> bool {
        self.kind == other.kind && self.beta == other.beta
    }

    pub fn add_scaled(&mut self, other: &StructuredFn, f: impl Into<DoubleDouble>) {
        debug_assert!(self.same_basis(other), "mixing ladder bases");
        let f = f.into();
        for (&l, p) in &other.terms {
            self.add_poly(l, p, f);
        }
    }

    pub fn add_assign(&mut self, other: &StructuredFn) {
        self.add_scaled(other, 1.0);
    }

    /// self − other, checked for a shared basis.
    pub fn try_sub(&self, other: &StructuredFn) -> Result<StructuredFn> {
        if !self.same_basis(other) {
            return Err(QeError::InvalidParams(format!(
                "cannot combine ladders {:?}/{} and {:?}/{}",
                self.kind, self.beta, other.kind, other.beta
            )));
        }
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        Ok(out)
    }

    pub fn scaled(&self, f: impl Into<DoubleDouble>) -> StructuredFn {
        let mut out = self.zero_like();
        out.add_scaled(self, f);
        out
    }

    pub fn mul_poly(&self, q: &LaurentPoly) -> StructuredFn {
        let mut out = self.zero_like();
        for (&l, p) in &self.terms {
            out.add_poly(l, &p.mul(q), 1.0);
        }
        out
    }

    /// x^k · self.
    pub fn shifted(&self, k: i32) -> StructuredFn {
        StructuredFn {
            kind: self.kind,
            beta: self.beta,
            terms: self.terms.iter().map(|(&l, p)| (l, p.shifted(k))).collect(),
        }
    }

    /// θ(x^p B̃_{β+l}) = p x^p B̃_{β+l} ± ½ x^{p+2} B̃_{β+l+1}.
    pub fn theta(&self) -> StructuredFn {
        let s = 0.5 * self.kind.deriv_sign();
        let mut out = self.zero_like();
        for (&l, p) in &self.terms {
            out.add_poly(l, &p.theta(), 1.0);
            out.add_poly(l + 1, &p.shifted(2), s);
        }
        out
    }

    /// d/dx(x^p B̃_{β+l}) = p x^{p-1} B̃_{β+l} ± ½ x^{p+1} B̃_{β+l+1}.
    pub fn derivative(&self) -> StructuredFn {
        self.theta().shifted(-1)
    }

    pub fn prune(&mut self) {
        for p in self.terms.values_mut() {
            p.prune(PRUNE_BELOW);
        }
        self.terms.retain(|_, p| !p.is_zero());
    }

    pub fn to_terms(&self) -> Vec<LadderTerm> {
        self.terms.iter().map(|(&l, p)| LadderTerm { l, poly: p.clone() }).collect()
    }

    pub fn from_terms(kind: BesselKind, beta: f64, terms: Vec<LadderTerm>) -> Result<Self> {
        if !beta.is_finite() {
            return invalid("beta must be finite");
        }
        let mut out = Self::zero(kind, beta);
        for t in terms {
            if out.terms.contains_key(&t.l) {
                return invalid(format!("duplicate ladder index {}", t.l));
            }
            out.add_poly(t.l, &t.poly, 1.0);
        }
        Ok(out)
    }

    fn ladder_len(&self) -> usize {
        self.max_ladder().map_or(0, |l| l as usize)
    }

    /// Whether evaluation at a negative argument is defined.
    pub fn allows_negative(&self) -> bool {
        self.kind == BesselKind::I || half_integer_twice(self.beta).is_some()
    }

    /// Ladder values B̃_{β+l}(x), l = 0..=max.
    pub fn ladder(&self, x: f64) -> Result<Vec<f64>> {
        let mut v = Vec::new();
        fill_ladder(self.kind, self.beta, x, self.ladder_len(), &mut v)?;
        Ok(v)
    }

    pub fn eval_with_ladder(&self, x: f64, ladder: &[f64]) -> f64 {
        self.terms.iter().map(|(&l, p)| p.eval(x) * ladder[l as usize]).sum()
    }

    /// Σ_l |P_l(x)|·|B̃_{β+l}(x)| with polynomials summed in absolute value.
    pub fn abs_scale_with_ladder(&self, x: f64, ladder: &[f64]) -> f64 {
        self.terms.iter().map(|(&l, p)| p.abs_eval(x) * ladder[l as usize].abs()).sum()
    }

    /// Value at x, evaluated in double-double and rounded.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_dd(x).map(DoubleDouble::to_f64)
    }

    /// Value at x with a double-precision ladder; faster, but loses digits
    /// where the terms cancel.
    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        if x == 0.0 {
            return self.eval_at_zero();
        }
        if x < 0.0 && !self.allows_negative() {
            return invalid(format!("negative argument needs the elementary K̃ path, beta = {}", self.beta));
        }
        let ladder = self.ladder(x)?;
        Ok(self.eval_with_ladder(x, &ladder))
    }

    /// Value together with the absolute term scale.
    pub fn eval_scaled(&self, x: f64) -> Result<(f64, f64)> {
        if self.is_zero() {
            return Ok((0.0, 0.0));
        }
        if x == 0.0 {
            let v = self.eval_at_zero()?;
            return Ok((v, v.abs()));
        }
        let ladder = self.ladder(x)?;
        Ok((self.eval_with_ladder(x, &ladder), self.abs_scale_with_ladder(x, &ladder)))
    }

    /// Limit at x = 0 when every term stays bounded.
    fn eval_at_zero(&self) -> Result<f64> {
        let mut sum = 0.0;
        for (&l, p) in &self.terms {
            let Some(min) = p.min_exp() else { continue };
            if min < 0 {
                return invalid("x = 0 with a negative power of x");
            }
            let a = self.beta + l as f64;
            match self.kind {
                BesselKind::I => sum += p.coeff(0) * rgamma(a + 1.0),
                BesselKind::K => {
                    if a < 0.0 {
                        // K̃_a(0) = Γ(-a)/2
                        sum += p.coeff(0) * gamma(-a) / 2.0;
                    } else if (min as f64) <= 2.0 * a {
                        return invalid(format!("K̃ of order {a} is singular at x = 0"));
                    }
                }
            }
        }
        Ok(sum)
    }

    /// Double-double evaluation with a double-double ladder where available.
    pub fn eval_dd(&self, x: f64) -> Result<DoubleDouble> {
        self.eval_dd_on(x, None)
    }

    /// As [`eval_dd`](Self::eval_dd), reusing a ladder B̃_{β+l}(x) computed by
    /// the caller when it is long enough.
    pub fn eval_dd_on(&self, x: f64, shared: Option<&[DoubleDouble]>) -> Result<DoubleDouble> {
        if self.is_zero() {
            return Ok(DoubleDouble::ZERO);
        }
        if x == 0.0 {
            return self.eval_at_zero().map(DoubleDouble::from_f64);
        }
        if x < 0.0 && !self.allows_negative() {
            return invalid(format!("negative argument needs the elementary K̃ path, beta = {}", self.beta));
        }
        let owned;
        let ladder = match shared {
            Some(l) if l.len() > self.ladder_len() => l,
            _ => {
                owned = ladder_dd(self.kind, self.beta, x, self.ladder_len())?;
                &owned[..]
            }
        };
        let mut s = DoubleDouble::ZERO;
        for (&l, p) in &self.terms {
            s += p.eval_dd(x) * ladder[l as usize];
        }
        Ok(s)
    }

    /// Double-double value together with the absolute term scale.
    pub fn eval_dd_scaled(&self, x: f64) -> Result<(DoubleDouble, f64)> {
        if self.is_zero() {
            return Ok((DoubleDouble::ZERO, 0.0));
        }
        if x == 0.0 {
            let v = self.eval_at_zero()?;
            return Ok((DoubleDouble::from_f64(v), v.abs()));
        }
        let v = self.eval_dd(x)?;
        let ladder = ladder_dd(self.kind, self.beta, x, self.ladder_len())?;
        let scale = self.terms.iter().map(|(&l, p)| p.abs_eval(x) * ladder[l as usize].to_f64().abs()).sum();
        Ok((v, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i_norm, bessel_k_norm};

    #[test]
    fn theta_of_k_term() {
        let f = StructuredFn::term(BesselKind::K, 0.5, 0, LaurentPoly::monomial(3, 1.0));
        let t = f.theta();
        assert_eq!(t.poly(0).unwrap().coeff(3), 3.0);
        assert_eq!(t.poly(1).unwrap().coeff(5), -0.5);
    }

    #[test]
    fn theta_matches_numeric_derivative() {
        for kind in [BesselKind::I, BesselKind::K] {
            let mut f = StructuredFn::term(kind, 0.3, 0, LaurentPoly::monomial(2, 1.5));
            f.add_assign(&StructuredFn::term(kind, 0.3, 2, LaurentPoly::monomial(-1, 0.7)));
            let x = 1.3;
            let h = 1e-5;
            let fd = (f.eval(x + h).unwrap() - f.eval(x - h).unwrap()) / (2.0 * h);
            let exact = f.derivative().eval(x).unwrap();
            assert!(((fd - exact) / exact).abs() < 1e-8, "{kind:?}: {fd} vs {exact}");
        }
    }

    #[test]
    fn zero_argument_limits() {
        let f = StructuredFn::term(BesselKind::I, 0.5, 0, LaurentPoly::constant(1.0));
        assert!((f.eval(0.0).unwrap() - bessel_i_norm(0.5, 0.0).unwrap()).abs() < 1e-16);
        let g = StructuredFn::term(BesselKind::K, -0.5, 0, LaurentPoly::constant(1.0));
        let want = std::f64::consts::PI.sqrt() / 2.0;
        assert!((g.eval(0.0).unwrap() - want).abs() < 1e-15);
        let mut h = g.clone();
        h.add_assign(&StructuredFn::term(BesselKind::K, -0.5, 1, LaurentPoly::monomial(2, 1.0)));
        assert!((h.eval(0.0).unwrap() - want).abs() < 1e-15);
        let k = StructuredFn::term(BesselKind::K, 0.5, 0, LaurentPoly::constant(1.0));
        assert!(k.eval(0.0).is_err());
        assert!(k.shifted(-1).eval(0.0).is_err());
    }

    #[test]
    fn negative_argument_rules() {
        let f = StructuredFn::term(BesselKind::K, 0.25, 0, LaurentPoly::constant(1.0));
        assert!(f.eval(-1.0).is_err());
        let g = StructuredFn::term(BesselKind::K, 0.5, 0, LaurentPoly::constant(1.0));
        let v = g.eval(-1.0).unwrap();
        // √π/w e^{-w} at w = -1
        assert!((v + std::f64::consts::PI.sqrt() * 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn dd_agrees_with_f64() {
        let mut f = StructuredFn::term(BesselKind::K, 1.5, 0, LaurentPoly::constant(2.0));
        f.add_assign(&StructuredFn::term(BesselKind::K, 1.5, 3, LaurentPoly::monomial(6, -0.1)));
        for x in [0.4, 2.0, 7.5] {
            let a = f.eval(x).unwrap();
            let b = f.eval_dd(x).unwrap().to_f64();
            assert!(((a - b) / b).abs() < 1e-13);
        }
        let k = bessel_k_norm(1.5, 2.0).unwrap();
        let g = StructuredFn::term(BesselKind::K, 1.5, 0, LaurentPoly::constant(1.0));
        assert!(((g.eval_dd(2.0).unwrap().to_f64() - k) / k).abs() < 1e-15);
    }

    #[test]
    fn terms_round_trip() {
        let mut f = StructuredFn::term(BesselKind::I, 0.5, 0, LaurentPoly::constant(2.0));
        f.add_assign(&StructuredFn::term(BesselKind::I, 0.5, 2, LaurentPoly::monomial(4, 1.0)));
        let g = StructuredFn::from_terms(BesselKind::I, 0.5, f.to_terms()).unwrap();
        assert_eq!(f, g);
    }
}
