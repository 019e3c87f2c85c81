//! Scalar special functions: Γ, normalized modified Bessel functions,
//! Laguerre polynomials and Pochhammer symbols.

pub mod bessel;
pub mod bessel_dd;
pub mod elementary;
pub mod gamma;
pub mod laguerre;

pub use bessel::{
    bessel_i_norm, bessel_i_norm_scaled, bessel_k_norm, bessel_k_norm_temme, bessel_ladder, fill_ladder, BesselKind,
    BesselLadder,
};
pub use gamma::{factorial, gamma, gamma_dd, lngamma, pochhammer, rgamma, rgamma_dd, sin_pi};
pub use laguerre::{laguerre, laguerre_explicit};
