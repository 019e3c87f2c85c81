//! Independent oracles and the verification suites.

mod oracle;
mod suites;

pub use oracle::*;
pub use suites::*;
