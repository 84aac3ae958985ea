//! One-sided (Hestenes) Jacobi SVD, operator norm and polar decomposition.

use num_complex::Complex64;

use super::eigen::{jacobi_rotation, rotate_columns};
use super::hermitian::HermitianMatrix;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Singular directions with `σ ≤ RANK_CUTOFF · σ_max` are treated as kernel.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Column-orthogonalized factorization `A V = B` with `V` unitary and the
/// columns of `B` mutually orthogonal, so `σ_j = ‖b_j‖` and `A = B V*`.
#[derive(Clone, Debug)]
pub struct ColumnSvd {
    pub scaled_left: ComplexMatrix,
    pub right: ComplexMatrix,
    pub singular_values: Vec<f64>,
}

fn column_norm_sq(a: &ComplexMatrix, j: usize) -> f64 {
    (0..a.rows()).map(|k| a[(k, j)].norm_sqr()).sum()
}

fn column_inner(a: &ComplexMatrix, p: usize, q: usize) -> Complex64 {
    (0..a.rows()).map(|k| a[(k, p)].conj() * a[(k, q)]).sum()
}

/// One-sided Jacobi on the columns of `a`. Intended for `rows ≥ cols`.
pub fn column_svd(a: &ComplexMatrix) -> Result<ColumnSvd> {
    let n = a.cols();
    let mut b = a.clone();
    let mut v = ComplexMatrix::identity(n);
    // a pair counts as orthogonal at the roundoff level of a column sum
    let threshold = f64::EPSILON * (a.rows().max(1) as f64);
    // columns this small relative to the whole matrix are left alone
    let floor = {
        let fro_sq: f64 = (0..n).map(|j| column_norm_sq(&b, j)).sum();
        (f64::EPSILON * f64::EPSILON * fro_sq).max(f64::MIN_POSITIVE)
    };
    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = column_norm_sq(&b, p);
                let beta = column_norm_sq(&b, q);
                let gamma = column_inner(&b, p, q);
                let gabs = gamma.norm();
                if gabs <= floor || gabs <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut b, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::numerical(format!(
            "jacobi SVD did not converge for a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let singular_values = (0..n).map(|j| column_norm_sq(&b, j).sqrt()).collect();
    Ok(ColumnSvd {
        scaled_left: b,
        right: v,
        singular_values,
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut s = if m.rows() >= m.cols() {
        column_svd(m)?.singular_values
    } else {
        column_svd(&m.adjoint())?.singular_values
    };
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value; zero for the zero matrix.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.cols() == 1 || m.rows() == 1 {
        return Ok(m.frobenius_norm());
    }
    if m.is_zero() {
        return Ok(0.0);
    }
    Ok(singular_values(m)?[0])
}

/// Polar factors `R = U·P` with `P = (R*R)^{1/2}` and `U` a partial isometry
/// vanishing on `ker P`.
#[derive(Clone, Debug)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: HermitianMatrix,
}

/// Polar decomposition through the SVD; rank-deficient inputs are fine.
pub fn polar(r: &ComplexMatrix) -> Result<Polar> {
    let (m, n) = r.shape();
    let mut u = ComplexMatrix::zeros(m, n);
    let mut p = ComplexMatrix::zeros(n, n);
    if m >= n {
        // R V = B, σ_j = ‖b_j‖: P = Σ σ_j v_j v_j*, U = Σ_{σ_j kept} (b_j/σ_j) v_j*.
        let svd = column_svd(r)?;
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        for (j, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma == 0.0 {
                continue;
            }
            let vj = svd.right.column(j);
            let bj: Vec<Complex64> = svd.scaled_left.column(j).iter().map(|z| z / sigma).collect();
            for a in 0..n {
                for b in 0..n {
                    p[(a, b)] += vj[a] * sigma * vj[b].conj();
                }
            }
            if sigma > RANK_CUTOFF * smax {
                for a in 0..m {
                    for b in 0..n {
                        u[(a, b)] += bj[a] * vj[b].conj();
                    }
                }
            }
        }
    } else {
        // R* Z = B with Z unitary (m×m): R = Z Σ W* where w_j = b_j/σ_j.
        let svd = column_svd(&r.adjoint())?;
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        for (j, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma == 0.0 {
                continue;
            }
            let zj = svd.right.column(j);
            let wj: Vec<Complex64> = svd.scaled_left.column(j).iter().map(|z| z / sigma).collect();
            for a in 0..n {
                for b in 0..n {
                    p[(a, b)] += wj[a] * sigma * wj[b].conj();
                }
            }
            if sigma > RANK_CUTOFF * smax {
                for a in 0..m {
                    for b in 0..n {
                        u[(a, b)] += zj[a] * wj[b].conj();
                    }
                }
            }
        }
    }
    Ok(Polar {
        unitary: u,
        positive: HermitianMatrix::symmetrize(&p).0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng::NormalStream;
    use crate::linalg::eigen::hermitian_eigenvalues;

    fn random(seed: u64, m: usize, n: usize) -> ComplexMatrix {
        let mut rng = NormalStream::new(seed);
        ComplexMatrix::from_fn(m, n, |_, _| rng.complex(1.0))
    }

    #[test]
    fn op_norm_simple_cases() {
        assert_eq!(op_norm(&ComplexMatrix::identity(3)).unwrap(), 1.0);
        assert!((op_norm(&ComplexMatrix::from_real_diag(&[2.0, -5.0])).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(op_norm(&ComplexMatrix::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn op_norm_matches_gram_eigenvalue() {
        for seed in 0..25 {
            let m = random(seed, 4, 2);
            let gram = HermitianMatrix::gram(&m);
            let lmax = *hermitian_eigenvalues(&gram).unwrap().last().unwrap();
            let norm = op_norm(&m).unwrap();
            assert!((norm - lmax.sqrt()).abs() <= 1e-12 * norm.max(1.0));
            // wide orientation goes through the adjoint
            assert!((op_norm(&m.adjoint()).unwrap() - norm).abs() <= 1e-13 * norm);
        }
    }

    #[test]
    fn polar_of_identity() {
        let pol = polar(&ComplexMatrix::identity(2)).unwrap();
        assert!(pol.unitary.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(pol.positive.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn polar_of_nilpotent_shift() {
        let r = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let pol = polar(&r).unwrap();
        assert!(
            pol.positive
                .matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diag(&[0.0, 1.0]))
                < 1e-15
        );
        assert!(pol.unitary.max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn polar_reconstructs_random_and_rectangular() {
        for seed in 0..20 {
            for (m, n) in [(3, 3), (5, 2), (2, 5)] {
                let r = random(seed, m, n);
                let pol = polar(&r).unwrap();
                let scale = op_norm(&r).unwrap().max(1.0);
                assert!(op_norm(&(&pol.unitary.matmul(pol.positive.matrix()) - &r)).unwrap() <= 1e-10 * scale);
                let u = &pol.unitary;
                let uuu = u.matmul(&u.adjoint_mul(u));
                assert!(op_norm(&(&uuu - u)).unwrap() <= 1e-10);
                let rr = HermitianMatrix::gram(&r);
                let p2 = pol.positive.matrix().matmul(pol.positive.matrix());
                assert!(p2.max_abs_diff(rr.matrix()) <= 1e-10 * scale * scale);
            }
        }
    }

    #[test]
    fn polar_zero_matrix() {
        let pol = polar(&ComplexMatrix::zeros(3, 2)).unwrap();
        assert!(pol.unitary.is_zero());
        assert!(pol.positive.matrix().is_zero());
    }
}
