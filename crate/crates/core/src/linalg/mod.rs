//! Dense complex linear algebra: spectral decomposition, square roots, polar
//! factors, operator norms and the Loewner-order comparator.

mod eigen;
mod hermitian;
mod matrix;
mod order;
mod solve;
mod svd;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use hermitian::HermitianMatrix;
pub use matrix::ComplexMatrix;
pub use order::{loewner_leq, psd_sqrt, OrderReport};
pub use solve::{inverse, orthonormalize_columns};
pub use svd::{column_svd, op_norm, polar, singular_values, ColumnSvd, Polar, RANK_CUTOFF};
