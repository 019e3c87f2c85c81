//! Recurrences in j, in x² and in the parameters, the parity relation at −x,
//! characteristic exponents at 0 and linear independence of the four
//! solutions. Every check evaluates structured functions in double-double
//! and reports |Σ terms| / Σ|terms|, floored by the absolute scale of the
//! ladder terms (see [`SCALE_FLOOR`]).

use std::ops::Mul;

use crate::dd::DoubleDouble;
use crate::error::{invalid, QeError, Result};
use crate::operators::apply_h;
use crate::params::{ParamSet, ParityCoefficients, SolutionKind};
use crate::structrep::{StructuredEigenfunction, StructuredFn};

/// Λ_{i,j} for one (i, μ, ν) over a window of indices; zero below the
/// lowest index.
#[derive(Clone, Debug)]
pub struct Family {
    pub kind: SolutionKind,
    pub params: ParamSet,
    from: i64,
    fns: Vec<StructuredEigenfunction>,
}

impl Family {
    pub fn new(kind: SolutionKind, p: &ParamSet, to: i64) -> Result<Self> {
        kind.check(p)?;
        let from = kind.min_j(p);
        let fns = if to >= from { StructuredEigenfunction::build_range(kind, p, from, to)? } else { Vec::new() };
        Ok(Self { kind, params: *p, from, fns })
    }

    pub fn max_j(&self) -> i64 {
        self.from + self.fns.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> Result<StructuredFn> {
        if j < self.from {
            return Ok(StructuredFn::zero(self.kind.nu_kind(), self.params.nu / 2.0));
        }
        match self.fns.get((j - self.from) as usize) {
            Some(f) => Ok(f.func.clone()),
            None => invalid(format!("index {j} outside the built range ..={}", self.max_j())),
        }
    }

    pub fn eval(&self, j: i64, x: f64) -> Result<Val> {
        if j < self.from {
            return Ok(Val::ZERO);
        }
        Val::of(&self.get(j)?, x)
    }
}

/// A double-double value with the absolute scale of the terms it was
/// summed from.
#[derive(Copy, Clone, Debug)]
pub struct Val {
    pub v: DoubleDouble,
    pub scale: f64,
}

impl Val {
    pub const ZERO: Val = Val { v: DoubleDouble::ZERO, scale: 0.0 };

    pub fn of(f: &StructuredFn, x: f64) -> Result<Self> {
        let (v, scale) = f.eval_dd_scaled(x)?;
        Ok(Self { v, scale })
    }
}

impl Mul<f64> for Val {
    type Output = Val;
    fn mul(self, c: f64) -> Val {
        Val { v: self.v * c, scale: self.scale * c.abs() }
    }
}

impl Mul<DoubleDouble> for Val {
    type Output = Val;
    fn mul(self, c: DoubleDouble) -> Val {
        Val { v: self.v * c, scale: self.scale * c.to_f64().abs() }
    }
}

/// Floor of the residual denominator relative to the absolute term scale.
/// Some Λ_{i,j} vanish identically (for instance Λ_{3,−1}^{3,1}, by the
/// three-term Bessel recurrence); every term of a relation can then be pure
/// rounding, and |Σ t| / Σ|t| would compare noise with noise.
pub const SCALE_FLOOR: f64 = 1e-12;

/// |Σ t| / max(Σ|t|, SCALE_FLOOR·Σ scale), zero when everything vanishes.
pub fn relative_sum(terms: &[Val]) -> f64 {
    let s: DoubleDouble = terms.iter().map(|t| t.v).sum();
    let m: f64 = terms.iter().map(|t| t.v.to_f64().abs()).sum();
    let floor: f64 = SCALE_FLOOR * terms.iter().map(|t| t.scale).sum::<f64>();
    let d = m.max(floor);
    if d == 0.0 {
        0.0
    } else {
        s.to_f64().abs() / d
    }
}

fn dd(v: f64) -> DoubleDouble {
    DoubleDouble::from_f64(v)
}

/// (2j+μ+1) H_{μ+ν}Λ_j − (j+1)(j+μ+1)Λ_{j+1} + (j+(μ+ν)/2)(j+(μ−ν)/2)Λ_{j−1}.
pub fn three_term_residual(fam: &Family, j: i64, x: f64) -> Result<f64> {
    let (m, n) = (fam.params.mu, fam.params.nu);
    let (md, jd) = (dd(m), dd(j as f64));
    let h = |s: DoubleDouble| jd + s * 0.5;
    let hv = Val::of(&apply_h(m + n, &fam.get(j)?), x)?;
    let terms = [
        hv * (jd * 2.0 + md + 1.0),
        fam.eval(j + 1, x)? * -((jd + 1.0) * (jd + md + 1.0)),
        fam.eval(j - 1, x)? * (h(md + n) * h(md - n)),
    ];
    Ok(relative_sum(&terms))
}

/// Indices where the x² recurrence degenerates (its left side vanishes).
pub fn five_term_excluded(p: &ParamSet, j: i64) -> bool {
    let jf = j as f64;
    [(p.mu - 1.0) / 2.0, (p.mu + 1.0) / 2.0, (p.mu + 3.0) / 2.0].iter().any(|&s| jf + s == 0.0)
}

/// Residual of the five-term recurrence expressing x²Λ_j through
/// Λ_{j−2}, …, Λ_{j+2}.
pub fn five_term_residual(fam: &Family, j: i64, x: f64) -> Result<f64> {
    let p = &fam.params;
    let (m, n) = (dd(p.mu), dd(p.nu));
    let jd = dd(j as f64);
    let h = |s: DoubleDouble| jd + s * 0.5;
    let x2 = dd(x) * x;
    let j1 = jd + 1.0;
    let jm1 = jd + m + 1.0;
    let terms = [
        fam.eval(j, x)? * (x2 * h(m - 1.0) * h(m + 1.0) * h(m + 3.0) * 8.0),
        fam.eval(j + 2, x)? * -(j1 * (jd + 2.0) * jm1 * (jd + m + 2.0) * h(m - 1.0) * 2.0),
        fam.eval(j + 1, x)? * (j1 * jm1 * h(m - 1.0) * h(m + 2.0) * h(m + 3.0) * 8.0),
        fam.eval(j, x)? * -(h(m + 1.0) * quartic_dd(m, n, jd) * 2.0),
        fam.eval(j - 1, x)? * (h(m - 1.0) * h(m) * h(m + 3.0) * h(m + n) * h(m - n) * 8.0),
        fam.eval(j - 2, x)? * -(h(m + 3.0) * h(m + n - 2.0) * h(m - n - 2.0) * h(m + n) * h(m - n) * 2.0),
    ];
    Ok(relative_sum(&terms))
}

/// aj⁴ + bj³ + cj² + dj + e with the constants of [`FiveTermConstants`],
/// formed in double-double.
fn quartic_dd(m: DoubleDouble, n: DoubleDouble, j: DoubleDouble) -> DoubleDouble {
    let (m2, n2) = (m * m, n * n);
    let a = dd(6.0);
    let b = (m + 1.0) * 12.0;
    let c = (m2 * 17.0 - n2 + m * 36.0 + 8.0) * 0.5;
    let d = (m + 1.0) * (m2 * 5.0 - n2 + m * 12.0 - 4.0) * 0.5;
    let e = (m - 1.0) * (m + 2.0) * (m + n + 2.0) * (m - n + 2.0) * 0.25;
    (((a * j + b) * j + c) * j + d) * j + e
}

/// The families at shifted parameters needed by the parameter recurrences.
#[derive(Clone, Debug)]
pub struct ShiftedFamilies {
    pub base: Family,
    pub mu_minus: Family,
    pub mu_plus: Family,
    pub nu_minus: Family,
    pub nu_plus: Family,
}

impl ShiftedFamilies {
    pub fn new(kind: SolutionKind, p: &ParamSet, j_max: i64) -> Result<Self> {
        let make = |dm: f64, dn: f64| -> Result<Family> {
            let q = p.shifted(dm, dn)?;
            Family::new(kind, &q, j_max).map_err(|e| match e {
                QeError::InvalidParams(m) => {
                    QeError::Unsupported(format!("shift ({dm},{dn}) of ({},{}): {m}", p.mu, p.nu))
                }
                other => other,
            })
        };
        Ok(Self {
            base: Family::new(kind, p, j_max)?,
            mu_minus: make(-2.0, 0.0)?,
            mu_plus: make(2.0, 0.0)?,
            nu_minus: make(0.0, -2.0)?,
            nu_plus: make(0.0, 2.0)?,
        })
    }

    /// μ(Λ_j − Λ_{j−1}) = 2δ(Λ_j^{μ−2,ν} − (x/2)²Λ_{j−2}^{μ+2,ν}).
    pub fn mu_residual(&self, j: i64, x: f64) -> Result<f64> {
        let b = &self.base;
        let (m, d) = (b.params.mu, b.kind.delta as f64);
        let q = dd(x / 2.0) * (x / 2.0);
        let terms = [
            b.eval(j, x)? * m,
            b.eval(j - 1, x)? * -m,
            self.mu_minus.eval(j, x)? * (-2.0 * d),
            self.mu_plus.eval(j - 2, x)? * q * (2.0 * d),
        ];
        Ok(relative_sum(&terms))
    }

    /// ν(Λ_j − Λ_{j−1}) = 2ε(Λ_j^{μ,ν−2} − (x/2)²Λ_j^{μ,ν+2}).
    pub fn nu_residual(&self, j: i64, x: f64) -> Result<f64> {
        let b = &self.base;
        let (n, e) = (b.params.nu, b.kind.epsilon as f64);
        let q = dd(x / 2.0) * (x / 2.0);
        let terms = [
            b.eval(j, x)? * n,
            b.eval(j - 1, x)? * -n,
            self.nu_minus.eval(j, x)? * (-2.0 * e),
            self.nu_plus.eval(j, x)? * q * (2.0 * e),
        ];
        Ok(relative_sum(&terms))
    }

    /// d/dx(Λ_j − Λ_{j−1}) = δ(x/2)Λ_{j−2}^{μ+2,ν} + ε(x/2)Λ_j^{μ,ν+2}.
    pub fn mixed_residual(&self, j: i64, x: f64) -> Result<f64> {
        let b = &self.base;
        let (d, e) = (b.kind.delta as f64, b.kind.epsilon as f64);
        let deriv = |k: i64| -> Result<Val> {
            if k < b.kind.min_j(&b.params) {
                return Ok(Val::ZERO);
            }
            Val::of(&b.get(k)?.derivative(), x)
        };
        let h = dd(x / 2.0);
        let terms =
            [deriv(j)?, deriv(j - 1)? * -1.0, self.mu_plus.eval(j - 2, x)? * h * -d, self.nu_plus.eval(j, x)? * h * -e];
        Ok(relative_sum(&terms))
    }
}

/// Λ_{2,j}(−x) − (b_ν Λ_{1,j}(x) + a_ν Λ_{2,j}(x)) relative to the terms, for
/// odd integer ν where both sides are real.
pub fn parity_residual(p: &ParamSet, j: i64, x: f64) -> Result<f64> {
    match p.nu_int() {
        Some(n) if n % 2 != 0 => {}
        _ => return Err(QeError::Unsupported(format!("parity check needs odd integer ν, got {}", p.nu))),
    }
    let c = ParityCoefficients::new(p)?;
    let l1 = StructuredEigenfunction::build(SolutionKind::new(1)?, p, j)?;
    let l2 = StructuredEigenfunction::build(SolutionKind::new(2)?, p, j)?;
    // b_ν = ±π exactly; carry π to double-double
    let b = DoubleDouble::PI * c.b_nu.re.signum();
    let terms = [Val::of(&l2.func, -x)?, Val::of(&l1.func, x)? * -b, Val::of(&l2.func, x)? * -c.a_nu.re];
    Ok(relative_sum(&terms))
}

/// θΛ_{i,j}/Λ_{i,j} at x for i = 1..4, the local log–log slope.
pub fn log_slopes(p: &ParamSet, j: i64, x: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, kind) in SolutionKind::all().into_iter().enumerate() {
        let f = StructuredEigenfunction::build(kind, p, j)?;
        let v = f.func.eval_dd(x)?;
        let t = f.func.theta().eval_dd(x)?;
        out[k] = (t / v).to_f64();
    }
    Ok(out)
}

/// Determinant of the 4×4 matrix (θ^k Λ_{i,j}(x)) with each row scaled to
/// unit length; 0 means dependent, 1 means orthogonal rows.
pub fn independence_measure(p: &ParamSet, j: i64, x: f64) -> Result<f64> {
    let mut rows = [[0.0f64; 4]; 4];
    for (r, kind) in SolutionKind::all().into_iter().enumerate() {
        let mut g = StructuredEigenfunction::build(kind, p, j)?.func;
        for c in 0..4 {
            rows[r][c] = g.eval_dd(x)?.to_f64();
            g = g.theta();
        }
        let norm = rows[r].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        for v in rows[r].iter_mut() {
            *v /= norm;
        }
    }
    Ok(det4(rows))
}

fn det4(mut a: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for c in 0..4 {
        let piv = (c..4).max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs())).expect("nonempty");
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}
