use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;

/// Monomials below this magnitude are dropped.
pub const PRUNE_BELOW: f64 = 1e-300;

/// One monomial c·x^p, the wire form of a [`LaurentPoly`] entry.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub p: i32,
    pub c: f64,
    /// Low half of the double-double coefficient; omitted when zero.
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    pub lo: f64,
}

fn is_zero_f64(x: &f64) -> bool {
    *x == 0.0
}

/// Σ c_p x^p with finitely many integer exponents, possibly negative.
/// Coefficients are held in double-double.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Monomial>", try_from = "Vec<Monomial>")]
pub struct LaurentPoly {
    pub coeffs: BTreeMap<i32, DoubleDouble>,
}

impl From<LaurentPoly> for Vec<Monomial> {
    fn from(p: LaurentPoly) -> Self {
        p.coeffs.into_iter().map(|(p, c)| Monomial { p, c: c.hi, lo: c.lo }).collect()
    }
}

impl TryFrom<Vec<Monomial>> for LaurentPoly {
    type Error = String;

    fn try_from(v: Vec<Monomial>) -> Result<Self, String> {
        let mut out = LaurentPoly::zero();
        for m in v {
            if !m.c.is_finite() || !m.lo.is_finite() {
                return Err(format!("non-finite coefficient at exponent {}", m.p));
            }
            if out.coeffs.contains_key(&m.p) {
                return Err(format!("duplicate exponent {}", m.p));
            }
            out.add_term(m.p, DoubleDouble::from_f64(m.c) + m.lo);
        }
        Ok(out)
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<DoubleDouble>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(p: i32, c: impl Into<DoubleDouble>) -> Self {
        let mut out = Self::zero();
        out.add_term(p, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of x^p rounded to double.
    pub fn coeff(&self, p: i32) -> f64 {
        self.coeff_dd(p).to_f64()
    }

    pub fn coeff_dd(&self, p: i32) -> DoubleDouble {
        self.coeffs.get(&p).copied().unwrap_or(DoubleDouble::ZERO)
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Adds c·x^p; an entry that cancels to exactly zero is removed.
    pub fn add_term(&mut self, p: i32, c: impl Into<DoubleDouble>) {
        let c = c.into();
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(p).or_insert(DoubleDouble::ZERO);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&p);
        }
    }

    pub fn add_assign(&mut self, other: &LaurentPoly) {
        for (&p, &c) in &other.coeffs {
            self.add_term(p, c);
        }
    }

    pub fn add_scaled(&mut self, other: &LaurentPoly, f: impl Into<DoubleDouble>) {
        let f = f.into();
        for (&p, &c) in &other.coeffs {
            self.add_term(p, c * f);
        }
    }

    pub fn scaled(&self, f: impl Into<DoubleDouble>) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        out.add_scaled(self, f);
        out
    }

    /// x^k · self.
    pub fn shifted(&self, k: i32) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&p, &c)| (p + k, c)).collect() }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&p, &c) in &self.coeffs {
            for (&q, &d) in &other.coeffs {
                out.add_term(p + q, c * d);
            }
        }
        out
    }

    /// θ = x d/dx applied termwise.
    pub fn theta(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&p, &c) in &self.coeffs {
            out.add_term(p, c * p as f64);
        }
        out
    }

    pub fn derivative(&self) -> LaurentPoly {
        self.theta().shifted(-1)
    }

    pub fn prune(&mut self, below: f64) {
        self.coeffs.retain(|_, c| c.hi.abs() >= below);
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().map(|(&p, c)| c.to_f64() * x.powi(p)).sum()
    }

    /// Σ |c_p x^p|, the scale against which cancellation in `eval` is judged.
    pub fn abs_eval(&self, x: f64) -> f64 {
        self.coeffs.iter().map(|(&p, c)| (c.to_f64() * x.powi(p)).abs()).sum()
    }

    pub fn eval_dd(&self, x: f64) -> DoubleDouble {
        let xd = DoubleDouble::from_f64(x);
        self.coeffs.iter().map(|(&p, &c)| xd.powi(p) * c).sum()
    }

    /// Value at 0; `None` if a negative power is present.
    pub fn at_zero(&self) -> Option<f64> {
        match self.min_exp() {
            Some(p) if p < 0 => None,
            _ => Some(self.coeff(0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = LaurentPoly::constant(1.0);
        let mut b = LaurentPoly::monomial(1, 1.0);
        b.add_term(0, 1.0);
        let mut c = LaurentPoly::constant(1.0);
        c.add_term(1, -1.0);
        let prod = b.mul(&c);
        assert_eq!(prod.coeffs.len(), 2);
        assert_eq!(prod.coeff(2), -1.0);
        assert_eq!(prod.coeff(0), 1.0);
        assert_eq!(a.shifted(-2).min_exp(), Some(-2));
    }

    #[test]
    fn cancellation_removes_entry() {
        let mut a = LaurentPoly::monomial(3, 2.0);
        a.add_term(3, -2.0);
        assert!(a.is_zero());
    }

    #[test]
    fn coefficients_keep_double_double() {
        let third = DoubleDouble::ONE / 3.0;
        let a = LaurentPoly::constant(third).scaled(3.0);
        let r = a.coeff_dd(0) - 1.0;
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn theta_and_derivative() {
        let mut a = LaurentPoly::monomial(-2, 1.0);
        a.add_term(3, 2.0);
        let t = a.theta();
        assert_eq!(t.coeff(-2), -2.0);
        assert_eq!(t.coeff(3), 6.0);
        let d = a.derivative();
        assert_eq!(d.coeff(-3), -2.0);
        assert_eq!(d.coeff(2), 6.0);
        assert_eq!(a.eval(2.0), 0.25 + 16.0);
        assert_eq!(a.eval_dd(2.0).to_f64(), 16.25);
        assert_eq!(a.at_zero(), None);
    }

    #[test]
    fn json_round_trip() {
        let mut a = LaurentPoly::monomial(-1, 0.5);
        a.add_term(4, -3.25);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[{"p":-1,"c":0.5},{"p":4,"c":-3.25}]"#);
        let b: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<LaurentPoly>(r#"[{"p":1,"c":1},{"p":1,"c":2}]"#).is_err());
    }
}
