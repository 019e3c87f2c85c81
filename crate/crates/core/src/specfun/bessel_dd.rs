//! Double-double versions of the normalized Bessel ladders, for evaluating
//! structured sums whose terms cancel heavily.

use super::bessel::{fill_ladder, BesselKind};
use super::elementary::{half_integer_twice, k_half_dd};
use super::gamma::{gamma_dd, rgamma_dd};
use crate::dd::DoubleDouble;
use crate::error::{invalid, Result};

/// Above this argument the K̃ series routes lose more than double precision
/// (the cancellation grows like e^{2x}) and the double-precision ladder is
/// used instead.
pub const K_REFLECT_MAX: f64 = 16.0;

const EULER_GAMMA: DoubleDouble = DoubleDouble::new(0.5772156649015329, -4.942915152430645e-18);
const I_DD_MAX: f64 = 500.0;

/// Ĩ_a(x) in double-double by its power series. The order is itself a
/// double-double so that β + l stays exact along a ladder.
pub fn i_norm_dd(ad: DoubleDouble, x: f64) -> DoubleDouble {
    let x = x.abs();
    let h = DoubleDouble::from_f64(x) * 0.5;
    let q = h * h;
    if ad.hi < 0.0 && ad.hi == ad.hi.round() && ad.lo == 0.0 {
        let k = -ad.hi;
        return q.powi(k as i32) * i_norm_dd(DoubleDouble::from_f64(k), x);
    }
    let mut term = rgamma_dd(ad + 1.0);
    let mut sum = term;
    for n in 1..4000 {
        let nf = n as f64;
        term = term * q / ((ad + nf) * nf);
        sum += term;
        if term.hi.abs() < 1e-34 * sum.hi.abs() {
            break;
        }
    }
    sum
}

/// K̃_a(x) for non-integer a from Γ(a)Γ(1−a)/2 · ((x/2)^{−2a}Ĩ_{−a} − Ĩ_a).
pub fn k_norm_dd_reflect(ad: DoubleDouble, x: f64) -> DoubleDouble {
    let g = gamma_dd(ad) * gamma_dd(DoubleDouble::ONE - ad) * 0.5;
    let lnh = (DoubleDouble::from_f64(x) * 0.5).ln();
    let pw = (lnh * ad * -2.0).exp();
    g * (pw * i_norm_dd(-ad, x) - i_norm_dd(ad, x))
}

/// K_0(x) = −(ln(x/2) + γ) I_0(x) + Σ_{k≥1} H_k (x²/4)^k/(k!)².
pub fn k0_dd(x: f64) -> DoubleDouble {
    let h = DoubleDouble::from_f64(x) * 0.5;
    let q = h * h;
    let mut term = DoubleDouble::ONE;
    let mut harmonic = DoubleDouble::ZERO;
    let mut i0 = DoubleDouble::ONE;
    let mut tail = DoubleDouble::ZERO;
    for k in 1..4000 {
        let kf = k as f64;
        term = term * q / (kf * kf);
        harmonic += DoubleDouble::ONE / kf;
        i0 += term;
        let t = term * harmonic;
        tail += t;
        if t.hi.abs() < 1e-34 * tail.hi.abs() {
            break;
        }
    }
    tail - (h.ln() + EULER_GAMMA) * i0
}

/// K̃_0 and K̃_1, the second from the Wronskian I_0K_1 + I_1K_0 = 1/x.
fn k01_dd(x: f64) -> (DoubleDouble, DoubleDouble) {
    let xd = DoubleDouble::from_f64(x);
    let k0 = k0_dd(x);
    let i0 = i_norm_dd(DoubleDouble::ZERO, x);
    let i1 = i_norm_dd(DoubleDouble::ONE, x) * xd * 0.5;
    let k1 = (xd.recip() - i1 * k0) / i0;
    (k0, k1 * 2.0 / xd)
}

/// B̃_{base+l}(x), l = 0..=m, in double-double where an accurate route
/// exists; otherwise the double-precision ladder promoted.
pub fn ladder_dd(kind: BesselKind, base: f64, x: f64, m: usize) -> Result<Vec<DoubleDouble>> {
    match kind {
        BesselKind::I => {
            if x.abs() > I_DD_MAX {
                return fallback(kind, base, x, m);
            }
            // the positive series, also at half-integer order where the
            // closed form cancels badly for x below the order
            Ok((0..=m).map(|l| i_norm_dd(DoubleDouble::from_f64(base) + l as f64, x)).collect())
        }
        BesselKind::K => {
            if let Some(t) = half_integer_twice(base) {
                if x == 0.0 {
                    return invalid("K̃ is singular at x = 0");
                }
                return Ok((0..=m).map(|l| k_half_dd(t + 2 * l as i32, x)).collect());
            }
            if x <= 0.0 {
                return invalid(format!("K̃ of order {base} needs x > 0, got {x}"));
            }
            if x > K_REFLECT_MAX || (base == base.round() && base < 0.0) {
                return fallback(kind, base, x, m);
            }
            let bd = DoubleDouble::from_f64(base);
            let mut out = Vec::with_capacity(m + 1);
            if base == base.round() {
                // integer order: climb from K̃_0, K̃_1
                let (k0, k1) = k01_dd(x);
                let xd = DoubleDouble::from_f64(x);
                let r = DoubleDouble::from_f64(4.0) / (xd * xd);
                let mut lad = vec![k0, k1];
                for l in 2..=(base as usize + m) {
                    let v = r * (lad[l - 1] * (l - 1) as f64 + lad[l - 2]);
                    lad.push(v);
                }
                return Ok(lad[base as usize..=base as usize + m].to_vec());
            }
            out.push(k_norm_dd_reflect(bd, x));
            if m >= 1 {
                out.push(k_norm_dd_reflect(bd + 1.0, x));
            }
            let xd = DoubleDouble::from_f64(x);
            let r = DoubleDouble::from_f64(4.0) / (xd * xd);
            for l in 2..=m {
                let a = bd + (l - 1) as f64;
                let v = r * (out[l - 1] * a + out[l - 2]);
                out.push(v);
            }
            Ok(out)
        }
    }
}

fn fallback(kind: BesselKind, base: f64, x: f64, m: usize) -> Result<Vec<DoubleDouble>> {
    let mut v = Vec::new();
    fill_ladder(kind, base, x, m, &mut v)?;
    Ok(v.into_iter().map(DoubleDouble::from_f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::elementary::i_half_dd;

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b) / b).to_f64().abs()
    }

    #[test]
    fn reflection_matches_elementary_half_order() {
        for x in [0.3, 1.0, 2.5, 10.0] {
            let a = k_norm_dd_reflect(DoubleDouble::from_f64(0.5), x);
            let b = k_half_dd(1, x);
            // the reflection difference loses about e^{2x}
            let tol = 1e-29 * (2.0 * x).exp();
            assert!(rel(a, b) < tol, "x={x}: {:e}", rel(a, b));
            let a = k_norm_dd_reflect(DoubleDouble::from_f64(-1.5), x);
            let b = k_half_dd(-3, x);
            assert!(rel(a, b) < tol, "x={x}");
        }
    }

    #[test]
    fn i_series_matches_elementary() {
        for x in [0.1, 1.0, 7.0, 30.0] {
            let a = i_norm_dd(DoubleDouble::from_f64(1.5), x);
            let b = i_half_dd(3, x);
            assert!(rel(a, b) < 1e-27, "x={x}: {:e}", rel(a, b));
        }
    }

    #[test]
    fn ladders_agree_with_double() {
        for kind in [BesselKind::I, BesselKind::K] {
            for base in [0.25, 0.7, -0.3] {
                for x in [0.5, 2.0, 5.0] {
                    let d = ladder_dd(kind, base, x, 6).unwrap();
                    let mut f = Vec::new();
                    fill_ladder(kind, base, x, 6, &mut f).unwrap();
                    for (a, b) in d.iter().zip(&f) {
                        assert!(((a.to_f64() - b) / b).abs() < 1e-13, "{kind:?} {base} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn integer_order_k_reference() {
        // mpmath at 50 digits: K̃_0, K̃_1, K̃_3
        let cases = [
            (
                0.5,
                (0.9244190712276659, -5.4589060988523284e-18),
                (6.625764480013204, -4.190708123908168e-17),
                (3971.7062099155364, -1.0711044101645516e-14),
            ),
            (
                2.0,
                (0.11389387274953344, -6.7706223918546385e-18),
                (0.13986588181652243, -3.1740059239940707e-18),
                (0.6473853909486341, 3.244788867556634e-17),
            ),
            (
                7.0,
                (0.0004247957418692318, 1.5136331886688096e-20),
                (0.00012976642482425628, 1.6257526392923384e-21),
                (1.798426014150181e-05, 1.8819097844215965e-22),
            ),
        ];
        for (x, k0, k1, k3) in cases {
            let lad = ladder_dd(BesselKind::K, 0.0, x, 3).unwrap();
            let tol = 1e-29 * (2.0 * x).exp();
            for (got, want) in [(lad[0], k0), (lad[1], k1), (lad[3], k3)] {
                let e = rel(got, DoubleDouble::new(want.0, want.1));
                assert!(e < tol, "x={x} want {want:?}: {e:e}");
            }
            let shifted = ladder_dd(BesselKind::K, 1.0, x, 2).unwrap();
            assert_eq!(shifted[0], lad[1]);
        }
    }

    #[test]
    fn k_recurrence_in_dd() {
        let x = 1.3;
        let d = ladder_dd(BesselKind::K, 0.7, x, 5).unwrap();
        let direct = k_norm_dd_reflect(DoubleDouble::from_f64(0.7) + 4.0, x);
        assert!(rel(d[4], direct) < 1e-27, "{:e}", rel(d[4], direct));
    }
}
