use super::laurent::LaurentPoly;
use super::structured::StructuredFn;
use crate::dd::DoubleDouble;
use crate::error::{invalid, Result};

/// Coefficient ring of a [`TruncatedSeries`]: a module over Laurent polynomials.
pub trait SeriesCoeff: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, f: DoubleDouble);
    fn mul_poly(&self, q: &LaurentPoly) -> Self;
}

impl SeriesCoeff for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero()
    }
    fn add_scaled(&mut self, other: &Self, f: DoubleDouble) {
        LaurentPoly::add_scaled(self, other, f)
    }
    fn mul_poly(&self, q: &LaurentPoly) -> Self {
        self.mul(q)
    }
}

impl SeriesCoeff for StructuredFn {
    fn zero_like(&self) -> Self {
        StructuredFn::zero_like(self)
    }
    fn add_scaled(&mut self, other: &Self, f: DoubleDouble) {
        StructuredFn::add_scaled(self, other, f)
    }
    fn mul_poly(&self, q: &LaurentPoly) -> Self {
        StructuredFn::mul_poly(self, q)
    }
}

/// Σ_{n=offset}^{order} c_n t^n, known exactly up to t^order.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    pub offset: i32,
    pub order: i32,
    pub coeffs: Vec<C>,
}

impl<C: SeriesCoeff> TruncatedSeries<C> {
    pub fn new(offset: i32, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("a truncated series needs at least one coefficient");
        }
        Ok(Self { offset, order: offset + coeffs.len() as i32 - 1, coeffs })
    }

    /// Coefficient of t^n: zero below the offset, `None` beyond the order.
    pub fn coeff(&self, n: i32) -> Option<C> {
        if n > self.order {
            None
        } else if n < self.offset {
            Some(self.coeffs[0].zero_like())
        } else {
            Some(self.coeffs[(n - self.offset) as usize].clone())
        }
    }

    pub fn get(&self, n: i32) -> Option<&C> {
        if n < self.offset || n > self.order {
            None
        } else {
            Some(&self.coeffs[(n - self.offset) as usize])
        }
    }

    /// Drops everything above t^order.
    pub fn truncate(&mut self, order: i32) {
        if order < self.order && order >= self.offset {
            self.coeffs.truncate((order - self.offset + 1) as usize);
            self.order = order;
        }
    }
}

/// (1−t)^{−α} = Σ (α)_j/j! t^j up to t^order.
pub fn binomial_series(alpha: impl Into<DoubleDouble>, order: u32) -> TruncatedSeries<LaurentPoly> {
    let coeffs = binomial_coeffs(alpha, order).into_iter().map(LaurentPoly::constant).collect();
    TruncatedSeries { offset: 0, order: order as i32, coeffs }
}

/// (α)_j/j! for j = 0..=order, each from the same running product.
pub fn binomial_coeffs(alpha: impl Into<DoubleDouble>, order: u32) -> Vec<DoubleDouble> {
    let alpha = alpha.into();
    let mut out = Vec::with_capacity(order as usize + 1);
    let mut c = DoubleDouble::ONE;
    for j in 0..=order {
        out.push(c);
        let jf = j as f64;
        c = c * (alpha + jf) / (jf + 1.0);
    }
    out
}

/// Cauchy product; offsets add and the result is exact up to
/// min(order_a + offset_b, order_b + offset_a).
pub fn series_mul<C: SeriesCoeff>(a: &TruncatedSeries<LaurentPoly>, b: &TruncatedSeries<C>) -> TruncatedSeries<C> {
    let offset = a.offset + b.offset;
    let order = (a.order + b.offset).min(b.order + a.offset);
    let zero = b.coeffs[0].zero_like();
    let coeffs = (offset..=order)
        .map(|n| {
            let mut acc = zero.clone();
            for ka in a.offset..=(n - b.offset) {
                let pa = &a.coeffs[(ka - a.offset) as usize];
                if pa.is_zero() {
                    continue;
                }
                let pb = &b.coeffs[(n - ka - b.offset) as usize];
                acc.add_scaled(&pb.mul_poly(pa), DoubleDouble::ONE);
            }
            acc
        })
        .collect();
    TruncatedSeries { offset, order, coeffs }
}

pub fn series_add<C: SeriesCoeff>(a: &TruncatedSeries<C>, b: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    if a.order != b.order {
        return invalid(format!("series orders differ: {} vs {}", a.order, b.order));
    }
    let offset = a.offset.min(b.offset);
    let coeffs = (offset..=a.order)
        .map(|n| {
            let mut c = a.coeff(n).expect("within order");
            if let Some(d) = b.get(n) {
                c.add_scaled(d, DoubleDouble::ONE);
            }
            c
        })
        .collect();
    Ok(TruncatedSeries { offset, order: a.order, coeffs })
}

pub fn series_scale<C: SeriesCoeff>(a: &TruncatedSeries<C>, f: impl Into<DoubleDouble>) -> TruncatedSeries<C> {
    let f = f.into();
    TruncatedSeries {
        offset: a.offset,
        order: a.order,
        coeffs: a
            .coeffs
            .iter()
            .map(|c| {
                let mut z = c.zero_like();
                z.add_scaled(c, f);
                z
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(s: &TruncatedSeries<LaurentPoly>) -> Vec<f64> {
        s.coeffs.iter().map(|p| p.coeff(0)).collect()
    }

    fn poly_series(offset: i32, c: &[f64]) -> TruncatedSeries<LaurentPoly> {
        TruncatedSeries::new(offset, c.iter().map(|&v| LaurentPoly::constant(v)).collect()).unwrap()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(scalars(&binomial_series(2.0, 4)), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(scalars(&binomial_series(0.0, 3)), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(scalars(&binomial_series(1.0, 3)), vec![1.0; 4]);
        assert_eq!(scalars(&binomial_series(-2.0, 3)), vec![1.0, -2.0, 1.0, 0.0]);
    }

    #[test]
    fn products() {
        let a = poly_series(0, &[1.0, 1.0, 0.0]);
        let b = poly_series(0, &[1.0, -1.0, 0.0]);
        assert_eq!(scalars(&series_mul(&a, &b)), vec![1.0, 0.0, -1.0]);
        let tinv = poly_series(-1, &[1.0, 0.0, 0.0]);
        let t = poly_series(1, &[1.0, 0.0, 0.0]);
        let p = series_mul(&tinv, &t);
        assert_eq!(p.offset, 0);
        assert_eq!(p.coeff(0).unwrap().coeff(0), 1.0);
        let g = series_mul(&binomial_series(1.0, 6), &binomial_series(1.0, 6));
        assert_eq!(g, binomial_series(2.0, 6));
    }

    #[test]
    fn add_and_scale() {
        let a = poly_series(0, &[1.0, 2.0]);
        let b = poly_series(0, &[3.0, 4.0, 5.0]);
        assert!(series_add(&a, &b).is_err());
        let c = series_add(&a, &series_scale(&a, 2.0)).unwrap();
        assert_eq!(scalars(&c), vec![3.0, 6.0]);
        assert!(c.coeff(2).is_none());
        assert!(c.coeff(-3).unwrap().is_zero());
    }
}
