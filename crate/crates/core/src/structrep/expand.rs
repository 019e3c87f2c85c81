use super::laurent::LaurentPoly;
use super::series::{binomial_coeffs, binomial_series, series_mul, TruncatedSeries};
use super::structured::StructuredFn;
use crate::dd::DoubleDouble;
use crate::error::{invalid, Result};
use crate::params::{as_integer, ParamSet, SolutionKind};
use crate::specfun::elementary::k_half_unit_coeffs_dd;
use crate::specfun::rgamma_dd;

/// Largest truncation order accepted by the engine.
pub const MAX_ORDER: u32 = 64;

/// Series in t of e^{−w} Σ_p c_p w^p with w = tx/(1−t), up to t^order.
/// The coefficient of t^J is Σ_n a_n x^n (n)_{J−n}/(J−n)!, where
/// a_n = Σ_{p≤n} c_p (−1)^{n−p}/(n−p)!.
pub fn exp_laurent_series(cs: &[(i32, DoubleDouble)], order: i32) -> Result<TruncatedSeries<LaurentPoly>> {
    let Some(lo) = cs.iter().map(|e| e.0).min() else {
        return invalid("empty coefficient list");
    };
    if order < lo {
        return invalid(format!("order {order} below lowest power {lo}"));
    }
    let inv_fact = inverse_factorials((order - lo) as u32);
    let a: Vec<DoubleDouble> = (lo..=order)
        .map(|n| {
            cs.iter()
                .filter(|e| e.0 <= n)
                .map(|&(p, c)| {
                    let k = (n - p) as usize;
                    let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                    c * inv_fact[k] * s
                })
                .sum()
        })
        .collect();
    let span = (order - lo) as u32;
    let bins: Vec<Vec<DoubleDouble>> = (lo..=order).map(|n| binomial_coeffs(n as f64, span)).collect();
    let coeffs = (lo..=order)
        .map(|big_j| {
            let mut poly = LaurentPoly::zero();
            for n in lo..=big_j {
                let idx = (n - lo) as usize;
                poly.add_term(n, a[idx] * bins[idx][(big_j - n) as usize]);
            }
            poly
        })
        .collect();
    TruncatedSeries::new(lo, coeffs)
}

/// 1/k! for k = 0..=n.
fn inverse_factorials(n: u32) -> Vec<DoubleDouble> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = DoubleDouble::ONE;
    for k in 0..=n {
        out.push(c);
        c = c / (k as f64 + 1.0);
    }
    out
}

/// (1−t)^{−α−1} e^{−tx/(1−t)}; its t^j coefficient is L_j^α(x).
pub fn laguerre_generating(alpha: f64, order: u32) -> Result<TruncatedSeries<LaurentPoly>> {
    let e = exp_laurent_series(&[(0, DoubleDouble::ONE)], order as i32)?;
    Ok(series_mul(&binomial_series(alpha + 1.0, order), &e))
}

/// Ĩ_{μ/2}(tx/(1−t)) through its series in (tx/(1−t))².
fn mu_part_i(mu: f64, order: u32) -> TruncatedSeries<LaurentPoly> {
    let mmax = order / 2;
    let inv_fact = inverse_factorials(mmax);
    let half_mu = DoubleDouble::from_f64(mu) * 0.5;
    let c: Vec<DoubleDouble> = (0..=mmax)
        .map(|m| rgamma_dd(half_mu + (m as f64 + 1.0)) * inv_fact[m as usize] * 0.25f64.powi(m as i32))
        .collect();
    let bins: Vec<Vec<DoubleDouble>> = (0..=mmax).map(|m| binomial_coeffs(2.0 * m as f64, order)).collect();
    let coeffs = (0..=order)
        .map(|big_j| {
            let mut poly = LaurentPoly::zero();
            for m in 0..=big_j / 2 {
                let k = (big_j - 2 * m) as usize;
                poly.add_term(2 * m as i32, c[m as usize] * bins[m as usize][k]);
            }
            poly
        })
        .collect();
    TruncatedSeries { offset: 0, order: order as i32, coeffs }
}

/// B̃_β(x/(1−t)) = Σ_n (xt/(1−t))^n/n! · D^n B̃_β(x).
fn nu_part(kind: SolutionKind, p: &ParamSet, order: u32) -> TruncatedSeries<StructuredFn> {
    let beta = p.nu / 2.0;
    let bkind = kind.nu_kind();
    // E_n = x^n D^n B̃_β / n!, E_{n+1} = (θ − n) E_n / (n+1)
    let mut e = Vec::with_capacity(order as usize + 1);
    e.push(StructuredFn::term(bkind, beta, 0, LaurentPoly::constant(1.0)));
    for n in 0..order {
        let prev: &StructuredFn = &e[n as usize];
        let mut next = prev.theta();
        next.add_scaled(prev, -(n as f64));
        e.push(next.scaled(DoubleDouble::ONE / (n as f64 + 1.0)));
    }
    let bins: Vec<Vec<DoubleDouble>> = (0..=order).map(|n| binomial_coeffs(n as f64, order)).collect();
    let coeffs = (0..=order)
        .map(|big_j| {
            let mut acc = StructuredFn::zero(bkind, beta);
            for n in 0..=big_j {
                let b = bins[n as usize][(big_j - n) as usize];
                if !b.is_zero() {
                    acc.add_scaled(&e[n as usize], b);
                }
            }
            acc
        })
        .collect();
    TruncatedSeries { offset: 0, order: order as i32, coeffs }
}

fn check_expand(kind: SolutionKind, p: &ParamSet, order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return invalid(format!("truncation order {order} exceeds {MAX_ORDER}"));
    }
    kind.check(p)?;
    if matches!(as_integer(p.mu), Some(m) if m <= -2) {
        return invalid(format!("mu = {} hits a pole of 1/Γ((μ+2)/2)", p.mu));
    }
    Ok(())
}

/// Laurent expansion of G_i^{μ,ν}(t, x) in t up to t^order; the t^j
/// coefficient is Λ_{i,j}^{μ,ν} in structured form.
pub fn expand_generating(kind: SolutionKind, p: &ParamSet, order: u32) -> Result<TruncatedSeries<StructuredFn>> {
    check_expand(kind, p, order)?;
    let pre_alpha = (DoubleDouble::from_f64(p.mu) + p.nu + 2.0) * 0.5;
    let (m, outer) = if kind.delta > 0 {
        (mu_part_i(p.mu, order), order)
    } else {
        let mu = p.mu_int().expect("IC2 checked") as i32;
        let cs: Vec<(i32, DoubleDouble)> =
            k_half_unit_coeffs_dd(mu).into_iter().map(|(e, c)| (e, DoubleDouble::SQRT_PI * c)).collect();
        let m = exp_laurent_series(&cs, order as i32)?;
        (m, order + mu as u32)
    };
    let am = series_mul(&binomial_series(pre_alpha, outer), &m);
    let mut g = series_mul(&am, &nu_part(kind, p, outer));
    debug_assert_eq!(g.order, order as i32);
    for c in g.coeffs.iter_mut() {
        c.prune();
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, laguerre, BesselKind};

    fn ps(m: f64, n: f64) -> ParamSet {
        ParamSet::new(m, n).unwrap()
    }

    #[test]
    fn example_low_coefficients() {
        let p = ps(3.0, 1.0);
        let k2 = SolutionKind::new(2).unwrap();
        let g = expand_generating(k2, &p, 3).unwrap();
        let c = 1.0 / gamma(2.5);
        let l0 = g.get(0).unwrap();
        assert_eq!(l0.kind, BesselKind::K);
        assert_eq!(l0.beta, 0.5);
        assert_eq!(l0.terms.len(), 1);
        assert!((l0.poly(0).unwrap().coeff(0) - c).abs() < 1e-16);
        let l1 = g.get(1).unwrap();
        assert!((l1.poly(0).unwrap().coeff(0) - 3.0 * c).abs() < 1e-15);
        assert!((l1.poly(1).unwrap().coeff(2) + 0.5 * c).abs() < 1e-16);
        assert_eq!(l1.terms.len(), 2);
    }

    #[test]
    fn laguerre_cross_check() {
        let s = laguerre_generating(2.0, 8).unwrap();
        for j in 0..=8 {
            let poly = s.get(j).unwrap();
            for x in [0.5, 1.0, 3.0] {
                let want = laguerre(j as u32, 2.0, x);
                assert!((poly.eval(x) - want).abs() < 1e-12 * want.abs().max(1.0), "j={j} x={x}");
            }
        }
    }

    #[test]
    fn lower_coefficients_stable_under_order() {
        for i in 1..=4u8 {
            let k = SolutionKind::new(i).unwrap();
            let p = ps(3.0, 1.0);
            let a = expand_generating(k, &p, 6).unwrap();
            let b = expand_generating(k, &p, 9).unwrap();
            for j in a.offset..=a.order {
                assert_eq!(a.get(j), b.get(j), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn offsets_and_rejections() {
        let p = ps(3.0, 1.0);
        let g = expand_generating(SolutionKind::new(4).unwrap(), &p, 2).unwrap();
        assert_eq!(g.offset, -3);
        assert!(g.coeff(-4).unwrap().is_zero());
        assert!(expand_generating(SolutionKind::new(3).unwrap(), &ps(2.0, 1.0), 2).is_err());
        assert!(expand_generating(SolutionKind::new(1).unwrap(), &p, 65).is_err());
        assert!(expand_generating(SolutionKind::new(1).unwrap(), &ps(-2.0, 0.0), 2).is_err());
    }

    #[test]
    fn closed_form_nu_minus_one() {
        // Λ_{2,j}^{μ,−1} = 2^{μ−1}Γ(j+(μ+1)/2)/Γ(j+μ+1) e^{−x} L_j^μ(2x)
        let p = ps(3.0, -1.0);
        let g = expand_generating(SolutionKind::new(2).unwrap(), &p, 6).unwrap();
        for j in 0..=6 {
            let f = g.get(j).unwrap();
            for x in [0.3, 1.0, 2.5, 6.0] {
                let jf = j as f64;
                let want =
                    4.0 * gamma(jf + 2.0) / gamma(jf + 4.0) * (-x as f64).exp() * laguerre(j as u32, 3.0, 2.0 * x);
                let got = f.eval(x).unwrap();
                let scale = 4.0 * gamma(jf + 2.0) / gamma(jf + 4.0)
                    * (-x as f64).exp()
                    * crate::specfun::laguerre::laguerre_abs_scale(j as u32, 3.0, 2.0 * x);
                assert!((got - want).abs() < 1e-13 * scale, "j={j} x={x}: {got} vs {want}");
            }
        }
    }
}
