//! Meijer's kernel G_{μ,ν}(t) = G^{20}_{04}(t | 0, −ν/2; −μ/2, −(μ+ν)/2), the
//! transform T_{μ,ν} built on it, and its reduction to a Hankel transform at
//! ν = −1.
//!
//! For ν/2 ∉ ℤ the kernel is the residue sum over the poles at 0 and −ν/2:
//!
//!   G(t) = π/sin(πν/2) · ( t^{−ν/2} S₂(t) − S₁(t) ),
//!   S₁ = Σ tⁿ / (n! Γ(1+ν/2+n) Γ(1+μ/2+n) Γ(1+(μ+ν)/2+n)),
//!   S₂ = Σ tⁿ / (n! Γ(1−ν/2+n) Γ(1+(μ−ν)/2+n) Γ(1+μ/2+n)).
//!
//! Both sums grow like e^{4t^{1/4}} while G stays bounded, so they are carried
//! in double-double.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{invalid, QeError, Result};
use crate::params::{as_integer, ParamSet};
use crate::quadrature::{integrate_vec, tail_cut, QuadratureResult};
use crate::specfun::{bessel_i_norm, bessel_k_norm, rgamma_dd, sin_pi};
use crate::structrep::StructuredEigenfunction;

/// Largest kernel argument accepted. At t = T_MAX the series terms exceed
/// the kernel by about e^{4T_MAX^{1/4}} ≈ 4e19, which double-double absorbs
/// with ~1e−12 left over.
pub const KERNEL_T_MAX: f64 = 16384.0;

/// Cap on series terms.
pub const KERNEL_MAX_TERMS: usize = 400;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    HypergeometricPair,
    HankelReduction,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub mu: f64,
    pub nu: f64,
    pub mode: KernelMode,
}

impl KernelSpec {
    /// Hankel reduction at ν = −1, the hypergeometric pair otherwise.
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        let mode = if nu == -1.0 { KernelMode::HankelReduction } else { KernelMode::HypergeometricPair };
        Self::with_mode(mu, nu, mode)
    }

    pub fn with_mode(mu: f64, nu: f64, mode: KernelMode) -> Result<Self> {
        if !mu.is_finite() || !nu.is_finite() {
            return invalid("kernel parameters must be finite");
        }
        match mode {
            KernelMode::HypergeometricPair => {
                if as_integer(nu / 2.0).is_some() {
                    return Err(QeError::Unsupported(format!(
                        "unsupported parity: ν = {nu} puts the kernel in the logarithmic Meijer case"
                    )));
                }
            }
            KernelMode::HankelReduction => {
                if nu != -1.0 {
                    return invalid(format!("the Hankel reduction needs ν = −1, got {nu}"));
                }
            }
        }
        Ok(Self { mu, nu, mode })
    }

    pub fn for_params(p: &ParamSet) -> Result<Self> {
        Self::new(p.mu, p.nu)
    }
}

/// A kernel with its t-independent series data computed once.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub spec: KernelSpec,
    parts: Vec<Part>,
}

/// Σ_{n≥n0} coef · t^{b} · wⁿ / (n! Π Γ(a_k+n)), w = t or −4√t.
#[derive(Clone, Debug)]
struct Part {
    coef: DoubleDouble,
    b: DoubleDouble,
    root: bool,
    a: Vec<DoubleDouble>,
    n0: usize,
    start: DoubleDouble,
}

impl Part {
    fn new(coef: DoubleDouble, b: DoubleDouble, root: bool, a: Vec<DoubleDouble>) -> Self {
        // start past any pole of the Γ denominators
        let n0 = a
            .iter()
            .filter_map(|a| if a.lo == 0.0 { as_integer(a.hi) } else { None })
            .filter(|&k| k <= 0)
            .map(|k| (1 - k) as usize)
            .max()
            .unwrap_or(0);
        let mut start = DoubleDouble::ONE;
        for k in 1..=n0 {
            start = start / k as f64;
        }
        for &ak in &a {
            start *= rgamma_dd(ak + n0 as f64);
        }
        Self { coef, b, root, a, n0, start }
    }

    /// Σ_n c_n (b+n·step)^k for k = 0..=powers, times coef.
    fn sums(&self, td: DoubleDouble, powers: usize, out: &mut [DoubleDouble]) -> Result<()> {
        let (w, step) = if self.root { (td.sqrt() * -4.0, 0.5) } else { (td, 1.0) };
        let mut pre = self.coef;
        if !self.b.is_zero() {
            let twice = self.b.hi * 2.0;
            pre *= if self.b.lo == 0.0 && twice == twice.round() {
                td.sqrt().powi(twice as i32)
            } else {
                (td.ln() * self.b).exp()
            };
        }
        let mut term = self.start * w.powi(self.n0 as i32);
        let mut acc = vec![DoubleDouble::ZERO; powers + 1];
        let mut n = self.n0;
        loop {
            let e = self.b + n as f64 * step;
            let mut v = term;
            for s in acc.iter_mut() {
                *s += v;
                v *= e;
            }
            n += 1;
            let nf = n as f64;
            let mut den = DoubleDouble::from_f64(nf);
            for &a in &self.a {
                den *= a + (nf - 1.0);
            }
            term = term * w / den;
            if term.hi.abs() <= 1e-32 * acc[0].hi.abs() || term.is_zero() {
                break;
            }
            if n - self.n0 >= KERNEL_MAX_TERMS {
                return Err(QeError::Numerical(format!(
                    "kernel series did not converge in {KERNEL_MAX_TERMS} terms (partial sum {:e}, last term {:e})",
                    acc[0].to_f64(),
                    term.to_f64()
                )));
            }
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o += pre * a;
        }
        Ok(())
    }
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Self {
        let (mu, nu) = (spec.mu, spec.nu);
        let one = DoubleDouble::ONE;
        let (hm, hn) = (DoubleDouble::from_f64(mu / 2.0), DoubleDouble::from_f64(nu / 2.0));
        let parts = match spec.mode {
            KernelMode::HypergeometricPair => {
                let c = DoubleDouble::PI / sin_pi(nu / 2.0);
                vec![
                    Part::new(-c, DoubleDouble::ZERO, false, vec![one + hn, one + hm, one + hm + hn]),
                    Part::new(c, -hn, false, vec![one - hn, one + hm - hn, one + hm]),
                ]
            }
            KernelMode::HankelReduction => {
                // t^{−μ/4} J_μ(4t^{1/4}) = 2^μ Σ (−4√t)^k / (k! Γ(k+μ+1))
                let coef = (DoubleDouble::LN_2 * mu).exp();
                vec![Part::new(coef, DoubleDouble::ZERO, true, vec![DoubleDouble::from_f64(mu) + 1.0])]
            }
        };
        Self { spec, parts }
    }

    pub fn for_params(p: &ParamSet) -> Result<Self> {
        Ok(Self::new(KernelSpec::for_params(p)?))
    }

    /// θ^k G(t) for k = 0..=powers, θ = t d/dt, taken term by term.
    pub fn theta_powers(&self, t: f64, powers: usize) -> Result<Vec<DoubleDouble>> {
        check_t(t)?;
        let td = DoubleDouble::from_f64(t);
        let mut out = vec![DoubleDouble::ZERO; powers + 1];
        for part in &self.parts {
            part.sums(td, powers, &mut out)?;
        }
        Ok(out)
    }

    pub fn eval_dd(&self, t: f64) -> Result<DoubleDouble> {
        Ok(self.theta_powers(t, 0)?[0])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_dd(t)?.to_f64())
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("kernel argument must be positive, got {t}"));
    }
    if t > KERNEL_T_MAX {
        return Err(QeError::Numerical(format!("kernel argument {t:e} beyond budget {KERNEL_T_MAX}")));
    }
    Ok(())
}

/// θ^k G(t) for k = 0..=powers.
pub fn kernel_theta_powers(k: &KernelSpec, t: f64, powers: usize) -> Result<Vec<DoubleDouble>> {
    Kernel::new(*k).theta_powers(t, powers)
}

/// G_{μ,ν}(t).
pub fn meijer_kernel(k: &KernelSpec, t: f64) -> Result<f64> {
    Kernel::new(*k).eval(t)
}

/// |θ(θ+μ/2)(θ+ν/2)(θ+(μ+ν)/2)u − t·u| / |t·u|.
pub fn kernel_ode_residual(k: &KernelSpec, t: f64) -> Result<f64> {
    let th = kernel_theta_powers(k, t, 4)?;
    let a = DoubleDouble::from_f64(k.mu / 2.0);
    let b = DoubleDouble::from_f64(k.nu / 2.0);
    let c = a + b;
    // s(s+a)(s+b)(s+c) = s⁴ + e1 s³ + e2 s² + e3 s
    let e1 = a + b + c;
    let e2 = a * b + a * c + b * c;
    let e3 = a * b * c;
    let lhs = th[4] + th[3] * e1 + th[2] * e2 + th[1] * e3;
    let tu = th[0] * t;
    Ok(((lhs - tu) / tu).to_f64().abs())
}

/// Bound on |G(t)| for t ≥ KERNEL_T_MAX: twice the largest value sampled
/// over [T_MAX/2, T_MAX]. The kernel decays algebraically there.
fn kernel_envelope(k: &Kernel) -> Result<f64> {
    let mut m: f64 = 0.0;
    for i in 0..=32 {
        let t = KERNEL_T_MAX * (0.5 + i as f64 / 64.0);
        m = m.max(k.eval(t)?.abs());
    }
    Ok(2.0 * m)
}

/// T f(x) = 2^{−(μ+ν+1)} ∫_0^∞ G((xy/4)²) f(y) y^{μ+ν+1} dy for f decaying
/// like e^{−decay·y}.
///
/// The integral stops where the kernel argument reaches KERNEL_T_MAX; what
/// lies beyond is bounded with the kernel envelope and added to the error
/// estimate.
pub fn g_transform<F>(p: &ParamSet, f: &F, decay: f64, x: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("transform point must be positive, got {x}"));
    }
    if !(decay > 0.0) {
        return invalid(format!("transform needs a decaying function, rate {decay}"));
    }
    let k = Kernel::for_params(p)?;
    let w = p.weight_exp();
    let scale = 0.5f64.powf(w);
    let y_max = 4.0 * KERNEL_T_MAX.sqrt() / x;
    let h = |y: f64| -> Result<Vec<f64>> {
        let t = (x * y / 4.0).powi(2);
        Ok(vec![k.eval(t)? * f(y)? * y.powf(w) * scale])
    };
    let env = std::cell::OnceCell::new();
    let bound = |y: f64| -> Result<Vec<f64>> {
        if y <= y_max {
            return h(y);
        }
        let e = match env.get() {
            Some(&e) => e,
            None => *env.get_or_init(|| kernel_envelope(&k).unwrap_or(f64::INFINITY)),
        };
        Ok(vec![e * f(y)?.abs() * y.powf(w) * scale])
    };
    let (cut, mut tail) = tail_cut(&bound, decay, tol / 10.0)?;
    let end = cut.min(y_max);
    if cut > y_max {
        let beyond = |y: f64| bound(y).map(|v| vec![v[0].abs()]);
        let r = integrate_vec(&beyond, 1, &[y_max, cut], tol / 10.0)?[0];
        tail += r.value + r.abs_error_estimate;
    }
    let mut r = integrate_vec(&h, 1, &transform_breaks(end), tol - tail.min(tol / 10.0))?[0];
    r.abs_error_estimate += tail;
    r.converged = r.abs_error_estimate <= tol;
    Ok(r)
}

/// 0, 1, 2, 4, 8, …, end. The transform integrands vanish like y^{μ+1} at
/// the origin, so no endpoint grading is needed.
fn transform_breaks(end: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut y = 1.0;
    while y < end {
        b.push(y);
        y *= 2.0;
    }
    b.push(end);
    b
}

/// Decay rate of a structured eigenfunction at infinity, if it decays.
fn eigen_decay(f: &StructuredEigenfunction) -> Result<f64> {
    match f.nu_kind() {
        crate::specfun::BesselKind::K => Ok(1.0),
        crate::specfun::BesselKind::I => invalid("Λ grows exponentially; T is not defined on it"),
    }
}

/// T Λ at each x, in parallel.
pub fn transform_eigenfunction(f: &StructuredEigenfunction, xs: &[f64], tol: f64) -> Result<Vec<QuadratureResult>> {
    let decay = eigen_decay(f)?;
    let g = |y: f64| f.evaluate(y);
    xs.par_iter().map(|&x| g_transform(&f.params, &g, decay, x, tol)).collect()
}

/// T(T f)(x) by nested quadrature; the inner transform is assumed to decay
/// at the same rate as f.
///
/// Far out the kernel cap leaves the inner value below its own error
/// estimate; it is then taken as 0, which the assumed decay justifies.
/// Otherwise that noise, weighted by y^{μ+ν+1}, dominates the outer tail.
pub fn double_transform<F>(p: &ParamSet, f: &F, decay: f64, x: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync + ?Sized,
{
    let inner = |y: f64| -> Result<f64> {
        let r = g_transform(p, f, decay, y, tol / 10.0)?;
        Ok(if r.value.abs() <= r.abs_error_estimate { 0.0 } else { r.value })
    };
    g_transform(p, &inner, decay, x, tol)
}

/// Both sides of the transform of Ĩ_{μ/2}((α−1)y) K̃_{ν/2}(αy):
/// lhs = ∫ G((xy/4)²) Ĩ_{μ/2}((α−1)y) K̃_{ν/2}(αy) y^{μ+ν+1} dy,
/// rhs = 2^{μ+ν+1} (β/α)^{(μ+ν+2)/2} Ĩ_{μ/2}((β−1)x) K̃_{ν/2}(βx), β = α/(2α−1).
pub fn bessel_transform_identity(p: &ParamSet, alpha: f64, x: f64, tol: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.5) || !alpha.is_finite() {
        return invalid(format!("α must lie in (1/2, ∞), got {alpha}"));
    }
    let (a, b) = (p.mu / 2.0, p.nu / 2.0);
    let f = |y: f64| -> Result<f64> { Ok(bessel_i_norm(a, (alpha - 1.0) * y)? * bessel_k_norm(b, alpha * y)?) };
    let decay = 1.0f64.min(2.0 * alpha - 1.0);
    let w = p.weight_exp();
    // g_transform carries the 2^{−(μ+ν+1)}; undo it for the bare integral
    let lhs = g_transform(p, &f, decay, x, tol)?.value * 2f64.powf(w);
    let beta = alpha / (2.0 * alpha - 1.0);
    let rhs = 2f64.powf(w)
        * (beta / alpha).powf((w + 1.0) / 2.0)
        * bessel_i_norm(a, (beta - 1.0) * x)?
        * bessel_k_norm(b, beta * x)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SolutionKind;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kernel_reference_values() {
        // mpmath meijerg at 40 digits
        let k = KernelSpec::new(3.0, 1.0).unwrap();
        let cases = [
            (0.1, 3.0403587073253611347),
            (1.0, 0.43017147387562194036),
            (5.0, 0.016096334552577893033),
            (100.0, 0.00025094062982835185332),
            (1000.0, -2.6499380245774017677e-6),
            (10000.0, -1.2614481550582080316e-6),
        ];
        for (t, g) in cases {
            let v = meijer_kernel(&k, t).unwrap();
            assert!(rel(v, g) < 1e-9, "t={t}: {v} vs {g}");
        }
        let k = KernelSpec::new(1.5, 0.5).unwrap();
        assert!(rel(meijer_kernel(&k, 2.0).unwrap(), -0.036998403987305909929) < 1e-14);
    }

    #[test]
    fn hankel_reduction_is_j_bessel() {
        let k = KernelSpec::new(1.0, -1.0).unwrap();
        assert_eq!(k.mode, KernelMode::HankelReduction);
        let v = meijer_kernel(&k, 1.0).unwrap();
        assert!(rel(v, -0.066043328023549136143) < 1e-14, "{v}");
        let k = KernelSpec::new(3.0, -1.0).unwrap();
        assert!(rel(meijer_kernel(&k, 2.0).unwrap(), 0.23823524987413377508) < 1e-14);
    }

    #[test]
    fn modes_agree_at_nu_minus_one() {
        let h = KernelSpec::with_mode(3.0, -1.0, KernelMode::HankelReduction).unwrap();
        let g = KernelSpec::with_mode(3.0, -1.0, KernelMode::HypergeometricPair).unwrap();
        for t in [0.5, 2.0, 50.0] {
            let (a, b) = (meijer_kernel(&h, t).unwrap(), meijer_kernel(&g, t).unwrap());
            assert!(rel(a, b) < 1e-12, "t={t}: {a} {b}");
        }
    }

    #[test]
    fn ode_residual_small() {
        for (mu, nu) in [(3.0, 1.0), (3.0, -1.0), (2.5, 0.7)] {
            let k = KernelSpec::new(mu, nu).unwrap();
            for t in [0.01, 0.1, 1.0, 5.0, 10.0, 300.0] {
                let r = kernel_ode_residual(&k, t).unwrap();
                assert!(r < 1e-20, "({mu},{nu}) t={t}: {r:e}");
            }
        }
    }

    #[test]
    fn even_nu_is_unsupported() {
        let e = KernelSpec::new(4.0, 2.0).unwrap_err();
        assert!(matches!(e, QeError::Unsupported(ref m) if m.contains("unsupported parity")));
        assert!(KernelSpec::new(3.0, 0.0).is_err());
        assert!(KernelSpec::with_mode(3.0, 1.0, KernelMode::HankelReduction).is_err());
    }

    #[test]
    fn beyond_budget_errors() {
        let k = KernelSpec::new(3.0, 1.0).unwrap();
        assert!(matches!(meijer_kernel(&k, 2.0 * KERNEL_T_MAX), Err(QeError::Numerical(_))));
        assert!(meijer_kernel(&k, 0.0).is_err());
    }

    #[test]
    fn ground_state_is_fixed() {
        let p = ParamSet::new(3.0, 1.0).unwrap();
        let f = StructuredEigenfunction::build(SolutionKind::new(2).unwrap(), &p, 0).unwrap();
        let xs = [0.5, 1.0, 2.0];
        let t = transform_eigenfunction(&f, &xs, 1e-10).unwrap();
        for (r, &x) in t.iter().zip(&xs) {
            let v = f.evaluate(x).unwrap();
            assert!(rel(r.value, v) < 1e-8, "x={x}: {} vs {v}", r.value);
        }
    }
}
