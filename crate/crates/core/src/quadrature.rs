//! Composite Gauss–Legendre quadrature on finite intervals and on the half
//! line, weighted inner products of eigenfunctions, Gram matrices and the
//! double integral representations of Λ_{1,j}, Λ_{2,j}.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, QeError, Result};
use crate::params::{norm_sq, ParamSet, SolutionKind};
use crate::specfun::{bessel_i_norm, bessel_k_norm, gamma, laguerre, lngamma, BesselKind};
use crate::structrep::StructuredEigenfunction;

/// Nodes per panel.
pub const PANEL_NODES: usize = 32;

/// Default budget of integrand evaluations for one integral.
pub const MAX_NODES: usize = 400_000;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

fn panel<F>(f: &F, a: f64, b: f64, dim: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let (xs, ws) = rule();
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut acc = vec![0.0; dim];
    for (x, w) in xs.iter().zip(ws) {
        let v = f(c + h * x)?;
        for (s, y) in acc.iter_mut().zip(&v) {
            *s += w * y;
        }
    }
    for s in acc.iter_mut() {
        *s *= h;
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(QeError::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(acc)
}

struct Panel {
    a: f64,
    b: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    errs: Vec<f64>,
    err: f64,
}

impl Panel {
    fn new<F>(f: &F, a: f64, b: f64, whole: Vec<f64>, dim: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let m = (a + b) / 2.0;
        let left = panel(f, a, m, dim)?;
        let right = panel(f, m, b, dim)?;
        let errs: Vec<f64> = whole.iter().zip(left.iter().zip(&right)).map(|(w, (l, r))| (w - l - r).abs()).collect();
        let err = errs.iter().copied().fold(0.0, f64::max);
        Ok(Self { a, b, left, right, errs, err })
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of a vector-valued integrand over the
/// intervals between consecutive `breaks`. Panels are bisected worst first
/// until the summed error estimate is below `tol` in every component, or the
/// node budget runs out.
pub fn integrate_vec<F>(f: &F, dim: usize, breaks: &[f64], tol: f64) -> Result<Vec<QuadratureResult>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if breaks.len() < 2 {
        return invalid("need at least two break points");
    }
    let mut heap = BinaryHeap::new();
    let mut nodes = 0usize;
    for w in breaks.windows(2) {
        let whole = panel(f, w[0], w[1], dim)?;
        heap.push(Panel::new(f, w[0], w[1], whole, dim)?);
        nodes += 3 * PANEL_NODES;
    }
    let mut total = vec![0.0; dim];
    for p in heap.iter() {
        for (t, e) in total.iter_mut().zip(&p.errs) {
            *t += e;
        }
    }
    let worst_total = |t: &[f64]| t.iter().copied().fold(0.0, f64::max);
    while worst_total(&total) > tol && nodes < MAX_NODES {
        let worst = heap.pop().expect("heap is never empty");
        let m = (worst.a + worst.b) / 2.0;
        let l = Panel::new(f, worst.a, m, worst.left, dim)?;
        let r = Panel::new(f, m, worst.b, worst.right, dim)?;
        nodes += 4 * PANEL_NODES;
        for k in 0..dim {
            total[k] += l.errs[k] + r.errs[k] - worst.errs[k];
        }
        heap.push(l);
        heap.push(r);
        if m <= worst.a || m >= worst.b {
            break;
        }
    }
    // recompute to avoid drift from the running update
    let mut values = vec![0.0; dim];
    let mut errs = vec![0.0; dim];
    for p in heap.iter() {
        for k in 0..dim {
            values[k] += p.left[k] + p.right[k];
        }
        for k in 0..dim {
            errs[k] += p.errs[k];
        }
    }
    Ok(values
        .into_iter()
        .zip(errs)
        .map(|(value, e)| QuadratureResult { value, abs_error_estimate: e, nodes_used: nodes, converged: e <= tol })
        .collect())
}

/// ∫_a^b f.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    let g = |x: f64| Ok(vec![f(x)]);
    Ok(integrate_vec(&g, 1, &[a, b], tol)?[0])
}

/// Break points 0, 2^-6, …, 1/2, 1, 2, 4, 6, …, up to `cut`.
pub(crate) fn halfline_breaks(cut: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 1.0 / 64.0;
    while x < 1.0 && x < cut {
        b.push(x);
        x *= 2.0;
    }
    let mut x = 1.0;
    while x < cut {
        b.push(x);
        x = if x < 2.0 { 2.0 } else { x + 2.0 };
    }
    b.push(cut);
    b
}

/// Finds X with the declared e^{−cx} tail of `g` below `target`; returns
/// (X, tail bound).
pub(crate) fn tail_cut<F>(g: &F, decay: f64, target: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let bound_at = |x: f64| -> Result<f64> {
        let mut m: f64 = 0.0;
        // several probes so a zero of g at X does not fake a small tail
        for d in [0.0, 0.37, 0.81] {
            let v = g(x + d)?;
            let a = v.iter().fold(0.0f64, |s, y| s.max(y.abs()));
            m = m.max(a * (decay * d).exp());
        }
        Ok(2.0 * m / decay)
    };
    let mut x = 8.0;
    let cap = 700.0 / decay;
    loop {
        let b = bound_at(x)?;
        if b < target || x >= cap {
            return Ok((x, b));
        }
        x += 4.0;
    }
}

/// ∫_0^∞ f(x) dx for a vector integrand whose components decay at least like
/// e^{−decay·x}.
pub fn integrate_halfline_vec<F>(f: &F, dim: usize, decay: f64, tol: f64) -> Result<Vec<QuadratureResult>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if !(decay > 0.0) {
        return invalid(format!("half-line integrand must decay, rate {decay}"));
    }
    let (cut, tail) = tail_cut(f, decay, tol / 10.0)?;
    let mut out = integrate_vec(f, dim, &halfline_breaks(cut), tol - tail.min(tol / 10.0))?;
    for r in out.iter_mut() {
        r.abs_error_estimate += tail;
        r.converged = r.abs_error_estimate <= tol;
    }
    Ok(out)
}

/// ∫_0^∞ f(x) x^{weight_exp} dx, for f decaying like e^{−decay·x}.
pub fn integrate_halfline<F: Fn(f64) -> f64>(f: F, weight_exp: f64, decay: f64, tol: f64) -> Result<QuadratureResult> {
    let g = |x: f64| Ok(vec![f(x) * x.powf(weight_exp)]);
    Ok(integrate_halfline_vec(&g, 1, decay, tol)?[0])
}

/// Exponential rate of Λ_{i,j} at infinity: −1 for K̃ in the ν slot, +1 for Ĩ.
fn growth(kind: SolutionKind) -> f64 {
    match kind.nu_kind() {
        BesselKind::K => -1.0,
        BesselKind::I => 1.0,
    }
}

/// ⟨f, g⟩ = ∫_0^∞ f g x^{μ+ν+1} dx.
pub fn inner_product(
    p: &ParamSet,
    f: &StructuredEigenfunction,
    g: &StructuredEigenfunction,
    tol: f64,
) -> Result<QuadratureResult> {
    let decay = -(growth(f.kind) + growth(g.kind));
    if decay <= 0.0 {
        return invalid("the product does not decay; inner product undefined");
    }
    let w = p.weight_exp();
    let h = |x: f64| Ok(vec![f.func.eval(x)? * g.func.eval(x)? * x.powf(w)]);
    Ok(integrate_halfline_vec(&h, 1, decay, tol)?[0])
}

/// Gram matrix of Λ_{2,0..=j_max} in L²(x^{μ+ν+1}dx).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub mu: f64,
    pub nu: f64,
    pub entries: Vec<Vec<f64>>,
    /// Closed-form norms, present under IC1.
    pub expected_norms: Option<Vec<f64>>,
    /// max_{j≠k} |G_jk| / √(G_jj G_kk).
    pub max_off_diagonal: f64,
    /// max_j |G_jj − norm_sq(j)| / norm_sq(j), when the closed form applies.
    pub max_diagonal_error: Option<f64>,
    pub nodes_used: usize,
    pub converged: bool,
}

pub fn gram_matrix(p: &ParamSet, j_max: u32, tol: f64) -> Result<GramMatrix> {
    let kind = SolutionKind::new(2)?;
    let fs = StructuredEigenfunction::build_range(kind, p, 0, j_max as i64)?;
    let n = fs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let w = p.weight_exp();
    let h = |x: f64| -> Result<Vec<f64>> {
        let vals = fs.iter().map(|f| f.func.eval(x)).collect::<Result<Vec<f64>>>()?;
        let xw = x.powf(w);
        Ok(pairs.iter().map(|&(j, k)| vals[j] * vals[k] * xw).collect())
    };
    let res = integrate_halfline_vec(&h, pairs.len(), 2.0, tol)?;
    let mut entries = vec![vec![0.0; n]; n];
    for (&(j, k), r) in pairs.iter().zip(&res) {
        entries[j][k] = r.value;
        entries[k][j] = r.value;
    }
    let mut max_off: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let d = (entries[j][j] * entries[k][k]).sqrt();
                max_off = max_off.max(entries[j][k].abs() / d);
            }
        }
    }
    let expected_norms =
        if p.ic1 { Some((0..n as u32).map(|j| norm_sq(p, j)).collect::<Result<Vec<f64>>>()?) } else { None };
    let max_diagonal_error = expected_norms
        .as_ref()
        .map(|e| e.iter().enumerate().map(|(j, v)| ((entries[j][j] - v) / v).abs()).fold(0.0, f64::max));
    Ok(GramMatrix {
        mu: p.mu,
        nu: p.nu,
        entries,
        expected_norms,
        max_off_diagonal: max_off,
        max_diagonal_error,
        nodes_used: res.first().map_or(0, |r| r.nodes_used),
        converged: res.iter().all(|r| r.converged),
    })
}

/// Both sides of ∫_0^∞ Ĩ_{μ/2}((α−1)x)² K̃_{ν/2}(αx)² x^{μ+ν+1} dx
/// = α^{−(μ+ν+2)} Σ_j ((α−1)/α)^{2j} ‖Λ_{2,j}‖², the norm generating function.
pub fn bessel_norm_identity(p: &ParamSet, alpha: f64, tol: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.5) {
        return invalid(format!("alpha must exceed 1/2, got {alpha}"));
    }
    let (mu, nu) = (p.mu, p.nu);
    let w = p.weight_exp();
    let h = |x: f64| -> Result<Vec<f64>> {
        let i = bessel_i_norm(mu / 2.0, (alpha - 1.0) * x)?;
        let k = bessel_k_norm(nu / 2.0, alpha * x)?;
        Ok(vec![i * i * k * k * x.powf(w)])
    };
    let lhs = integrate_halfline_vec(&h, 1, 2.0, tol)?[0];
    if !lhs.converged {
        return Err(QeError::Numerical(format!("left side did not converge (error {:e})", lhs.abs_error_estimate)));
    }
    let t2 = ((alpha - 1.0) / alpha).powi(2);
    let mut sum = 0.0;
    let mut pw = 1.0;
    for j in 0..10_000u32 {
        let term = pw * norm_sq(p, j)?;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || pw == 0.0 {
            break;
        }
        pw *= t2;
    }
    Ok((lhs.value, alpha.powf(-(mu + nu + 2.0)) * sum))
}

/// Λ_{i,j}^{μ,ν}(x) from its integral representation (i = 1, 2); the ν = −1
/// row uses the single-integral forms.
pub fn integral_rep(i: u8, p: &ParamSet, j: u32, x: f64, tol: f64) -> Result<QuadratureResult> {
    if i != 1 && i != 2 {
        return invalid(format!("integral representation needs i = 1 or 2, got {i}"));
    }
    if !(x > 0.0) {
        return invalid(format!("x must be positive, got {x}"));
    }
    let (mu, nu) = (p.mu, p.nu);
    if mu <= -1.0 {
        return invalid(format!("integral representation needs mu > -1, got {mu}"));
    }
    if nu == -1.0 {
        return integral_rep_nu_minus1(i, mu, j, x, tol);
    }
    if nu < -1.0 {
        return invalid(format!("integral representation needs nu >= -1, got {nu}"));
    }
    let alpha = (mu + nu) / 2.0;
    let c = 1.0 / (gamma((mu + 1.0) / 2.0) * gamma((nu + 1.0) / 2.0));
    let c = if i == 1 { c / PI } else { c };
    let outer_tol = tol / c;
    let inner_tol = outer_tol / (10.0 * PI);
    let inner_fail = std::cell::Cell::new(false);
    let inner = |theta: f64| -> Result<Vec<f64>> {
        let (ct, st) = (theta.cos(), theta.sin());
        let wt = st.powf(mu);
        let r = if i == 1 {
            let g = |phi: f64| {
                let cp = phi.cos();
                (-x * cp).exp() * laguerre(j, alpha, x * (ct + cp)) * phi.sin().powf(nu)
            };
            integrate(g, 0.0, PI, inner_tol)?
        } else {
            let g = |phi: f64| -> Result<Vec<f64>> {
                let ch = phi.cosh();
                Ok(vec![(-x * ch).exp() * laguerre(j, alpha, x * (ct + ch)) * phi.sinh().powf(nu)])
            };
            integrate_halfline_vec(&g, 1, 1.0, inner_tol)?[0]
        };
        if !r.converged {
            inner_fail.set(true);
        }
        Ok(vec![r.value * wt])
    };
    let mut r = integrate_vec(&inner, 1, &[0.0, PI / 2.0, PI], outer_tol)?[0];
    r.value *= c;
    r.abs_error_estimate = r.abs_error_estimate * c + tol / 10.0;
    r.converged = r.converged && !inner_fail.get();
    Ok(r)
}

fn integral_rep_nu_minus1(i: u8, mu: f64, j: u32, x: f64, tol: f64) -> Result<QuadratureResult> {
    let alpha = (mu - 1.0) / 2.0;
    let c = 1.0 / (2.0 * gamma((mu + 1.0) / 2.0));
    let c = if i == 1 { c / PI } else { c };
    let f = |theta: f64| {
        let (ct, st) = (theta.cos(), theta.sin().powf(mu));
        let plus = (-x).exp() * laguerre(j, alpha, x * (ct + 1.0));
        let minus = if i == 1 { x.exp() * laguerre(j, alpha, x * (ct - 1.0)) } else { 0.0 };
        (plus + minus) * st
    };
    let mut r = integrate(f, 0.0, PI, tol / c)?;
    r.value *= c;
    r.abs_error_estimate *= c;
    Ok(r)
}

/// Gram–Schmidt on {θ^k K̃_{ν/2}}_{k ≤ n} in L²(x^{μ+ν+1}dx). Returns the cosine
/// similarity of each orthogonalized function with Λ_{2,k}.
pub fn gram_schmidt_similarity(p: &ParamSet, n: u32, tol: f64) -> Result<Vec<f64>> {
    use crate::structrep::{LaurentPoly, StructuredFn};
    let beta = p.nu / 2.0;
    let mut seeds = vec![StructuredFn::term(BesselKind::K, beta, 0, LaurentPoly::constant(1.0))];
    for k in 1..=n as usize {
        let next = seeds[k - 1].theta();
        seeds.push(next);
    }
    // θ^k K̃ grows like x^{2k}e^{−x}; rescale to norms of order one so that an
    // absolute tolerance means the same for every seed
    let s = p.mu + p.nu;
    for (k, f) in seeds.iter_mut().enumerate() {
        let a = 4.0 * k as f64 + s + 2.0;
        let rough = (lngamma(a) - a * 2f64.ln()).exp().sqrt();
        *f = f.scaled(1.0 / rough);
    }
    let kind = SolutionKind::new(2)?;
    let lams = StructuredEigenfunction::build_range(kind, p, 0, n as i64)?;
    let m = seeds.len();
    // all pairwise products among seeds and Λ's in one pass
    let all: Vec<&StructuredFn> = seeds.iter().chain(lams.iter().map(|l| &l.func)).collect();
    let pairs: Vec<(usize, usize)> = (0..all.len()).flat_map(|a| (a..all.len()).map(move |b| (a, b))).collect();
    let w = p.weight_exp();
    let h = |x: f64| -> Result<Vec<f64>> {
        let v = all.iter().map(|f| f.eval(x)).collect::<Result<Vec<f64>>>()?;
        let xw = x.powf(w);
        Ok(pairs.iter().map(|&(a, b)| v[a] * v[b] * xw).collect())
    };
    let res = integrate_halfline_vec(&h, pairs.len(), 2.0, tol)?;
    let sz = all.len();
    let mut g = vec![vec![0.0; sz]; sz];
    for (&(a, b), r) in pairs.iter().zip(&res) {
        g[a][b] = r.value;
        g[b][a] = r.value;
    }
    // coefficients of the orthogonalized seeds in the seed basis
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += u[a] * v[b] * g[a][b];
            }
        }
        s
    };
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let mut u = e.clone();
        for q in &basis {
            let c = ip(&e, q) / ip(q, q);
            for a in 0..m {
                u[a] -= c * q[a];
            }
        }
        basis.push(u);
    }
    let mut out = Vec::with_capacity(m);
    for (k, u) in basis.iter().enumerate() {
        let lam = m + k;
        let cross: f64 = (0..m).map(|a| u[a] * g[a][lam]).sum();
        out.push(cross.abs() / (ip(u, u) * g[lam][lam]).sqrt());
    }
    Ok(out)
}

/// Weighted L² residuals of the partial sums of the expansion of `f` in
/// Λ_{2,0..N}, for each N in `ns`; `f` decays like e^{−decay·x}.
pub fn expansion_residuals<F>(p: &ParamSet, f: F, decay: f64, ns: &[u32], tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let nmax = ns.iter().copied().max().unwrap_or(0);
    let kind = SolutionKind::new(2)?;
    let lams = StructuredEigenfunction::build_range(kind, p, 0, nmax as i64)?;
    let norms = (0..=nmax).map(|j| norm_sq(p, j)).collect::<Result<Vec<f64>>>()?;
    let w = p.weight_exp();
    let h = |x: f64| -> Result<Vec<f64>> {
        let xw = x.powf(w);
        let fx = f(x);
        let mut v = vec![fx * fx * xw];
        for l in &lams {
            v.push(fx * l.func.eval(x)? * xw);
        }
        Ok(v)
    };
    let res = integrate_halfline_vec(&h, lams.len() + 1, (2.0 * decay).min(decay + 1.0), tol)?;
    let ff = res[0].value;
    let coef: Vec<f64> = (0..=nmax as usize).map(|j| res[j + 1].value).collect();
    // ‖f − Σ c_j Λ_j/‖Λ_j‖²‖² = ‖f‖² − Σ c_j²/‖Λ_j‖² by orthogonality
    Ok(ns
        .iter()
        .map(|&n| {
            let s: f64 = (0..n as usize).map(|j| coef[j] * coef[j] / norms[j]).sum();
            (ff - s).max(0.0).sqrt()
        })
        .collect())
}
