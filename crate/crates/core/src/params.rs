//! Parameter domain and the closed-form scalar data attached to (μ, ν):
//! eigenvalues, norms, small-x leading terms, parity and five-term constants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{invalid, Result};
use crate::specfun::{factorial, gamma, lngamma, pochhammer, sin_pi, BesselKind};

const INT_TOL: f64 = 1e-12;

/// Nearest integer if `x` is within 1e-12 of it.
pub fn as_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < INT_TOL).then_some(r as i64)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub mu: f64,
    pub nu: f64,
    pub ic1: bool,
    pub ic2: bool,
}

impl ParamSet {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !mu.is_finite() || !nu.is_finite() {
            return invalid("mu and nu must be finite");
        }
        let ic1 = match (as_integer(mu), as_integer(nu)) {
            (Some(m), Some(n)) => m >= n && n >= -1 && (m - n) % 2 == 0 && !(m == -1 && n == -1),
            _ => false,
        };
        let ic2 = matches!(as_integer(mu), Some(m) if m >= 1 && m % 2 == 1);
        Ok(Self { mu, nu, ic1, ic2 })
    }

    /// μ as an integer when it is one.
    pub fn mu_int(&self) -> Option<i64> {
        as_integer(self.mu)
    }

    pub fn nu_int(&self) -> Option<i64> {
        as_integer(self.nu)
    }

    /// Weight exponent μ+ν+1 of the Hilbert space L²(R+, x^{μ+ν+1}dx).
    pub fn weight_exp(&self) -> f64 {
        self.mu + self.nu + 1.0
    }

    /// Same pair with μ, ν shifted.
    pub fn shifted(&self, dmu: f64, dnu: f64) -> Result<Self> {
        Self::new(self.mu + dmu, self.nu + dnu)
    }
}

/// Which of the four generating functions, with its sign data.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionKind {
    pub i: u8,
    pub delta: i8,
    pub epsilon: i8,
}

impl SolutionKind {
    pub fn new(i: u8) -> Result<Self> {
        if !(1..=4).contains(&i) {
            return invalid(format!("solution index i must be in 1..=4, got {i}"));
        }
        Ok(Self { i, delta: if i <= 2 { 1 } else { -1 }, epsilon: if i % 2 == 1 { 1 } else { -1 } })
    }

    pub fn all() -> [SolutionKind; 4] {
        [1, 2, 3, 4].map(|i| SolutionKind::new(i).unwrap())
    }

    /// Bessel kind in the t-dependent factor B̃_{μ/2}(tx/(1-t)).
    pub fn mu_kind(&self) -> BesselKind {
        if self.delta > 0 {
            BesselKind::I
        } else {
            BesselKind::K
        }
    }

    /// Bessel kind in the factor B̃_{ν/2}(x/(1-t)).
    pub fn nu_kind(&self) -> BesselKind {
        if self.epsilon > 0 {
            BesselKind::I
        } else {
            BesselKind::K
        }
    }

    /// Lowest index j with a possibly nonzero coefficient.
    pub fn min_j(&self, p: &ParamSet) -> i64 {
        if self.delta > 0 {
            0
        } else {
            -p.mu_int().unwrap_or(0)
        }
    }

    /// Checks the integrality condition needed for i = 3, 4.
    pub fn check(&self, p: &ParamSet) -> Result<()> {
        if self.delta < 0 && !p.ic2 {
            return invalid(format!("IC2 requires odd mu >= 1 for i={}, got mu={}", self.i, p.mu));
        }
        Ok(())
    }
}

/// λ_j = (2j+μ+1)² − (μ+1)²/2 − (ν+1)²/2.
pub fn eigenvalue(p: &ParamSet, j: i64) -> f64 {
    let j = j as f64;
    let a = 2.0 * j + p.mu + 1.0;
    a * a - (p.mu + 1.0).powi(2) / 2.0 - (p.nu + 1.0).powi(2) / 2.0
}

/// λ_j in double-double.
pub fn eigenvalue_dd(p: &ParamSet, j: i64) -> DoubleDouble {
    let a = DoubleDouble::from_f64(p.mu) + (2 * j + 1) as f64;
    let m = DoubleDouble::from_f64(p.mu) + 1.0;
    let n = DoubleDouble::from_f64(p.nu) + 1.0;
    a * a - (m * m + n * n) * 0.5
}

/// 2j(j+μ+1) + 2(j+(μ−ν)/2)(j+(μ+ν+2)/2), equal to λ_j.
pub fn casimir_eigenvalue(p: &ParamSet, j: i64) -> f64 {
    let j = j as f64;
    2.0 * j * (j + p.mu + 1.0) + 2.0 * (j + (p.mu - p.nu) / 2.0) * (j + (p.mu + p.nu + 2.0) / 2.0)
}

/// Distance in units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

/// Squared weighted L² norm of Λ_{2,j}; valid only under IC1.
pub fn norm_sq(p: &ParamSet, j: u32) -> Result<f64> {
    if !p.ic1 {
        return invalid(format!(
            "norm formula requires IC1 (integers mu >= nu >= -1 of equal parity, not both -1), got ({}, {})",
            p.mu, p.nu
        ));
    }
    let jf = j as f64;
    let a = jf + (p.mu + p.nu + 2.0) / 2.0;
    let b = jf + (p.mu - p.nu + 2.0) / 2.0;
    let c = jf + p.mu + 1.0;
    let denom_lin = (2.0 * jf + p.mu + 1.0) * factorial(j);
    let v = if a < 160.0 && c < 160.0 {
        2f64.powf(p.mu + p.nu - 1.0) * gamma(a) * gamma(b) / (denom_lin * gamma(c))
    } else {
        ((p.mu + p.nu - 1.0) * std::f64::consts::LN_2 + lngamma(a) + lngamma(b) - lngamma(c) - lngamma(jf + 1.0)).exp()
            / (2.0 * jf + p.mu + 1.0)
    };
    Ok(v)
}

/// Leading term of Λ_{i,j} at x → 0: `constant · x^exponent`, times −log(x/2)
/// when `log_flag` is set.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingAsymptotic {
    pub exponent: f64,
    pub constant: f64,
    pub log_flag: bool,
}

pub fn leading_asymptotic(kind: SolutionKind, p: &ParamSet, j: i64) -> Result<LeadingAsymptotic> {
    let (mu, nu) = (p.mu, p.nu);
    if matches!(as_integer(mu), Some(m) if m <= -1) {
        return invalid(format!("mu must not be a negative integer, got {mu}"));
    }
    let g_mu2 = gamma((mu + 2.0) / 2.0);
    match kind.i {
        1 | 2 => {
            if j < 0 {
                return invalid("leading term needs j >= 0 for i = 1, 2");
            }
            let jf = j as u32;
            if kind.i == 1 {
                let c = pochhammer((mu + nu + 2.0) / 2.0, jf) / (factorial(jf) * g_mu2 * gamma((nu + 2.0) / 2.0));
                return Ok(LeadingAsymptotic { exponent: 0.0, constant: c, log_flag: false });
            }
            let pref = pochhammer((mu - nu.abs() + 2.0) / 2.0, jf) / (factorial(jf) * g_mu2);
            Ok(if nu > 0.0 {
                LeadingAsymptotic {
                    exponent: -nu,
                    constant: pref * 2f64.powf(nu - 1.0) * gamma(nu / 2.0),
                    log_flag: false,
                }
            } else if nu == 0.0 {
                LeadingAsymptotic { exponent: 0.0, constant: pref, log_flag: true }
            } else {
                LeadingAsymptotic { exponent: 0.0, constant: pref * 0.5 * gamma(-nu / 2.0), log_flag: false }
            })
        }
        3 | 4 => {
            let Some(m) = as_integer(mu) else {
                return invalid("i = 3, 4 need integer mu");
            };
            let n = j + m;
            if n < 0 {
                return invalid("leading term needs j >= -mu for i = 3, 4");
            }
            let n = n as u32;
            if kind.i == 3 {
                let c = 2f64.powf(mu - 1.0) * gamma(mu / 2.0) * pochhammer((-mu + nu + 2.0) / 2.0, n)
                    / (factorial(n) * gamma((nu + 2.0) / 2.0));
                return Ok(LeadingAsymptotic { exponent: -mu, constant: c, log_flag: false });
            }
            let pref = gamma(mu / 2.0) * pochhammer((-mu - nu.abs() + 2.0) / 2.0, n) / factorial(n);
            Ok(if nu > 0.0 {
                LeadingAsymptotic {
                    exponent: -mu - nu,
                    constant: pref * 2f64.powf(mu + nu - 2.0) * gamma(nu / 2.0),
                    log_flag: false,
                }
            } else if nu == 0.0 {
                LeadingAsymptotic { exponent: -mu, constant: pref * 2f64.powf(mu - 1.0), log_flag: true }
            } else {
                LeadingAsymptotic {
                    exponent: -mu,
                    constant: pref * 2f64.powf(mu - 2.0) * gamma(-nu / 2.0),
                    log_flag: false,
                }
            })
        }
        _ => unreachable!("SolutionKind validated on construction"),
    }
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// a_α = e^{−απi}, b_α = Γ(1−α/2)Γ(α/2)/2 · (e^{−απi} − 1).
fn parity_pair(alpha: f64) -> Result<(Complex64, Complex64)> {
    if matches!(as_integer(alpha), Some(k) if k % 2 == 0) {
        return invalid(format!("parity formula needs a parameter outside 2Z, got {alpha}"));
    }
    let a = Complex64::new(cos_pi(alpha), -sin_pi(alpha));
    // Γ(1−s)Γ(s) = π / sin(πs)
    let g = std::f64::consts::PI / sin_pi(alpha / 2.0);
    let b = (a - 1.0) * (g / 2.0);
    Ok((a, b))
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ParityCoefficients {
    pub a_mu: Complex64,
    pub a_nu: Complex64,
    pub b_mu: Complex64,
    pub b_nu: Complex64,
}

impl ParityCoefficients {
    pub fn new(p: &ParamSet) -> Result<Self> {
        let (a_mu, b_mu) = parity_pair(p.mu)?;
        let (a_nu, b_nu) = parity_pair(p.nu)?;
        Ok(Self { a_mu, a_nu, b_mu, b_nu })
    }
}

/// Matrix expressing Λ_{·,j}(e^{πi}x) through Λ_{·,j}(x).
pub fn parity_matrix(p: &ParamSet) -> Result<[[Complex64; 4]; 4]> {
    let c = ParityCoefficients::new(p)?;
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok([
        [one, z, z, z],
        [c.b_nu, c.a_nu, z, z],
        [c.b_mu, z, c.a_mu, z],
        [c.b_mu * c.b_nu, c.a_nu * c.b_mu, c.a_mu * c.b_nu, c.a_mu * c.a_nu],
    ])
}

/// Constants a..e of the five-term x² recurrence.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveTermConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl FiveTermConstants {
    pub fn new(p: &ParamSet) -> Self {
        let (m, n) = (p.mu, p.nu);
        Self {
            a: 6.0,
            b: 12.0 * (m + 1.0),
            c: (17.0 * m * m - n * n + 36.0 * m + 8.0) / 2.0,
            d: (m + 1.0) * (5.0 * m * m - n * n + 12.0 * m - 4.0) / 2.0,
            e: (m - 1.0) * (m + 2.0) * (m + n + 2.0) * (m - n + 2.0) / 4.0,
        }
    }

    /// a j⁴ + b j³ + c j² + d j + e.
    pub fn quartic(&self, j: f64) -> f64 {
        (((self.a * j + self.b) * j + self.c) * j + self.d) * j + self.e
    }
}
