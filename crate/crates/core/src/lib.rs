//! Eigenfunctions Λ_{i,j}^{μ,ν} of the fourth-order operator
//! D_{μ,ν} = x^{-2}θ(θ+μ)(θ+ν)(θ+μ+ν) + x² − 2(θ² + (μ+ν+2)θ + (μ+ν+2)(μ+ν+4)/4),
//! built as Laurent coefficients of Bessel-type generating functions.

pub mod dd;
pub mod error;
pub mod gtransform;
pub mod lambda;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod recurrence;
pub mod specfun;
pub mod structrep;
pub mod verify;

pub use error::{QeError, Result};
