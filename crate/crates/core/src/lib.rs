//! Finite-dimensional Hilbert C*-modules `M_{m×d}(ℂ)` over `M_d(ℂ)` and
//! instance-by-instance verification of Bessel-type operator inequalities in
//! the Loewner order.

pub mod campaign;
pub mod error;
pub mod generate;
pub mod inequality;
pub mod linalg;
pub mod module_space;
pub mod par;
pub mod search;
pub mod tolerance;

pub use error::{Error, Result};
