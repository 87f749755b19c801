//! S-spectrum, H∞ functional calculus and quadratic estimates for operators
//! on finite-dimensional Clifford modules.

pub mod calculus;
pub mod clifford;
pub mod error;
pub mod io;
pub mod linalg;
pub mod module;
pub mod quadratic;
pub mod slice;
pub mod spectrum;
pub mod verify;

#[cfg(test)]
mod testutil;

pub use clifford::{BasisIndex, CliffordNum, DoubleSector, Paravector, PolarForm};
pub use error::{Error, Result};
pub use module::{CliffordOperator, ModuleVector};
