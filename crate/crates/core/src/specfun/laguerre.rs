//! Generalized Laguerre polynomials L_n^α(x).

/// L_n^α(x) by the three-term recurrence.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// L_n^α(x) from the explicit finite sum; kept as an independent check.
pub fn laguerre_explicit(n: u32, alpha: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xk_over_kfact = 1.0;
    for k in 0..=n {
        if k > 0 {
            xk_over_kfact *= -x / k as f64;
        }
        // binom(n+α, n-k) = Π_{i=1}^{n-k} (α+k+i)/i
        let binom = (1..=n - k).fold(1.0, |acc, i| acc * (alpha + (k + i) as f64) / i as f64);
        sum += xk_over_kfact * binom;
    }
    sum
}

/// Σ_k |term_k| of the explicit sum; the scale against which L_n^α(x) is
/// resolved near its zeros.
pub fn laguerre_abs_scale(n: u32, alpha: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xk_over_kfact = 1.0;
    for k in 0..=n {
        if k > 0 {
            xk_over_kfact *= x.abs() / k as f64;
        }
        let binom = (1..=n - k).fold(1.0, |acc, i| acc * (alpha + (k + i) as f64) / i as f64);
        sum += (xk_over_kfact * binom).abs();
    }
    sum
}
