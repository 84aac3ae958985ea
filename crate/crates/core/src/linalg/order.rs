use serde::{Deserialize, Serialize};

use super::eigen::{hermitian_eigen, hermitian_eigenvalues};
use super::hermitian::HermitianMatrix;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// Outcome of one Loewner comparison `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    /// Symmetrized `rhs − lhs`.
    pub gap: HermitianMatrix,
    pub min_eig_gap: f64,
    /// `max(1, ‖rhs‖_op)`.
    pub rhs_scale: f64,
    pub holds: bool,
    pub relative_slack: f64,
    pub near_equality: bool,
}

impl OrderReport {
    fn from_gap(gap: HermitianMatrix, min_eig_gap: f64, rhs_scale: f64, tol: &ToleranceConfig) -> Self {
        Self {
            gap,
            min_eig_gap,
            rhs_scale,
            holds: min_eig_gap >= -tol.psd_rel_tol * rhs_scale,
            relative_slack: min_eig_gap / rhs_scale,
            near_equality: min_eig_gap.abs() <= tol.equality_rel_tol * rhs_scale,
        }
    }
}

/// Tests `lhs ≤ rhs` through the smallest eigenvalue of the gap.
pub fn loewner_leq(lhs: &HermitianMatrix, rhs: &HermitianMatrix, tol: &ToleranceConfig) -> Result<OrderReport> {
    if lhs.dim() != rhs.dim() {
        return Err(Error::contract(format!(
            "loewner comparison of {}x{} against {}x{}",
            lhs.dim(),
            lhs.dim(),
            rhs.dim(),
            rhs.dim()
        )));
    }
    let gap = HermitianMatrix::symmetrize(&(rhs.matrix() - lhs.matrix())).0;
    let min_eig_gap = hermitian_eigenvalues(&gap)?[0];
    let rhs_scale = rhs.spectral_radius()?.max(1.0);
    Ok(OrderReport::from_gap(gap, min_eig_gap, rhs_scale, tol))
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[−psd_rel_tol·scale, 0)` are clamped to zero first;
/// anything more negative is rejected.
pub fn psd_sqrt(m: &HermitianMatrix, tol: &ToleranceConfig) -> Result<HermitianMatrix> {
    let eig = hermitian_eigen(m)?;
    let scale = eig.max().abs().max(eig.min().abs()).max(1.0);
    let bound = tol.psd_rel_tol * scale;
    if eig.min() < -bound {
        return Err(Error::NotPositive {
            eigenvalue: eig.min(),
            bound,
        });
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng::NormalStream;
    use crate::linalg::ComplexMatrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn zero_against_zero_is_equality() {
        let r = loewner_leq(&HermitianMatrix::zeros(2), &HermitianMatrix::zeros(2), &tol()).unwrap();
        assert!(r.holds && r.near_equality);
        assert_eq!(r.min_eig_gap, 0.0);
        assert_eq!(r.rhs_scale, 1.0);
    }

    #[test]
    fn identity_below_twice_identity() {
        let r = loewner_leq(
            &HermitianMatrix::identity(2),
            &HermitianMatrix::identity(2).scale(2.0),
            &tol(),
        )
        .unwrap();
        assert!(r.holds && !r.near_equality);
        assert!((r.min_eig_gap - 1.0).abs() < 1e-15);
        assert_eq!(r.rhs_scale, 2.0);
        assert!((r.relative_slack - 0.5).abs() < 1e-15);
    }

    #[test]
    fn incomparable_diagonal_pair() {
        let r = loewner_leq(
            &HermitianMatrix::from_real_diag(&[1.0, 3.0]),
            &HermitianMatrix::from_real_diag(&[2.0, 2.0]),
            &tol(),
        )
        .unwrap();
        assert!(!r.holds);
        assert!((r.min_eig_gap + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let e = loewner_leq(&HermitianMatrix::zeros(2), &HermitianMatrix::zeros(3), &tol()).unwrap_err();
        assert!(matches!(e, Error::Contract(_)));
    }

    #[test]
    fn tolerance_band_is_scale_aware() {
        let lhs = HermitianMatrix::from_real_diag(&[100.0 + 5e-8, 0.0]);
        let rhs = HermitianMatrix::from_real_diag(&[100.0, 0.0]);
        let r = loewner_leq(&lhs, &rhs, &tol()).unwrap();
        assert!(r.holds, "gap -5e-8 is inside 1e-9 * 100");
        let lhs = HermitianMatrix::from_real_diag(&[100.0 + 5e-7, 0.0]);
        assert!(!loewner_leq(&lhs, &rhs, &tol()).unwrap().holds);
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let r = psd_sqrt(&HermitianMatrix::identity(3), &tol()).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let r = psd_sqrt(&HermitianMatrix::from_real_diag(&[4.0, 9.0]), &tol()).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn sqrt_squares_back_for_gram_matrices() {
        let mut rng = NormalStream::new(3);
        for _ in 0..50 {
            let x = ComplexMatrix::from_fn(5, 3, |_, _| rng.complex(1.0));
            let m = HermitianMatrix::gram(&x);
            let r = psd_sqrt(&m, &tol()).unwrap();
            let scale = m.spectral_radius().unwrap().max(1.0);
            assert!(r.matrix().matmul(r.matrix()).max_abs_diff(m.matrix()) <= 1e-10 * scale);
            assert!(hermitian_eigenvalues(&r).unwrap()[0] >= 0.0);
        }
    }

    #[test]
    fn sqrt_clamps_tiny_negatives_and_rejects_large_ones() {
        let r = psd_sqrt(&HermitianMatrix::from_real_diag(&[-1e-12, 4.0]), &tol()).unwrap();
        assert_eq!(r.matrix()[(0, 0)].re, 0.0);
        let e = psd_sqrt(&HermitianMatrix::from_real_diag(&[-1e-3, 4.0]), &tol()).unwrap_err();
        assert!(matches!(e, Error::NotPositive { eigenvalue, .. } if eigenvalue == -1e-3));
    }
}
