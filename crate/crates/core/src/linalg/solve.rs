use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Inverse by LU with partial pivoting.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::contract(format!(
            "cannot invert a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()).then(j.cmp(&i)))
            .expect("non-empty range");
        if lu[(pivot, k)].norm() == 0.0 {
            return Err(Error::numerical(format!("singular {n}x{n} matrix at pivot {k}")));
        }
        if pivot != k {
            perm.swap(pivot, k);
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut y = vec![ZERO; n];
    for col in 0..n {
        for i in 0..n {
            let mut v = if perm[i] == col { ONE } else { ZERO };
            for j in 0..i {
                v -= lu[(i, j)] * y[j];
            }
            y[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for j in (i + 1)..n {
                v -= lu[(i, j)] * inv[(j, col)];
            }
            inv[(i, col)] = v / lu[(i, i)];
        }
    }
    Ok(inv)
}

/// Orthonormalizes the columns of `a` (rows ≥ cols) by modified Gram–Schmidt
/// with one reorthogonalization pass. The phase convention makes the implied
/// triangular factor have a positive diagonal, so for a Gaussian input the
/// result is Haar-distributed.
///
/// A column that vanishes numerically is replaced by the first standard basis
/// vector orthogonal to the previous ones.
pub fn orthonormalize_columns(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (m, n) = a.shape();
    if n > m {
        return Err(Error::contract(format!(
            "cannot orthonormalize {n} columns in dimension {m}"
        )));
    }
    let mut q = a.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for j in 0..n {
        let original_norm = (0..m).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..m).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..m {
                    let qik = q[(i, k)];
                    q[(i, j)] -= proj * qik;
                }
            }
        }
        let norm = (0..m).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-13 * original_norm.max(scale) {
            let fallback = (0..m)
                .find_map(|e| {
                    let mut col = vec![ZERO; m];
                    col[e] = ONE;
                    for k in 0..j {
                        let proj = q[(e, k)].conj();
                        for (i, c) in col.iter_mut().enumerate() {
                            *c -= proj * q[(i, k)];
                        }
                    }
                    let nn = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    (nn > 0.5).then(|| col.into_iter().map(|z| z / nn).collect::<Vec<_>>())
                })
                .ok_or_else(|| Error::numerical("orthonormalization ran out of directions"))?;
            for (i, z) in fallback.into_iter().enumerate() {
                q[(i, j)] = z;
            }
            continue;
        }
        for i in 0..m {
            q[(i, j)] /= norm;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng::NormalStream;

    #[test]
    fn inverse_residual_is_small() {
        let mut rng = NormalStream::new(17);
        for n in 1..6 {
            let a = ComplexMatrix::from_fn(n, n, |_, _| rng.complex(1.0));
            let inv = inverse(&a).unwrap();
            assert!(a.matmul(&inv).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_fails() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(inverse(&a).is_err() || inverse(&a).unwrap().max_abs() > 1e12);
        assert!(matches!(inverse(&ComplexMatrix::zeros(2, 2)), Err(Error::Numerical(_))));
    }

    #[test]
    fn orthonormal_columns() {
        let mut rng = NormalStream::new(5);
        let a = ComplexMatrix::from_fn(6, 4, |_, _| rng.complex(1.0));
        let q = orthonormalize_columns(&a).unwrap();
        assert!(q.adjoint_mul(&q).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
        // positive diagonal of R = Q* A
        let r = q.adjoint_mul(&a);
        for i in 0..4 {
            assert!(r[(i, i)].re > 0.0 && r[(i, i)].im.abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_columns_are_completed() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let q = orthonormalize_columns(&a).unwrap();
        assert!(q.adjoint_mul(&q).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }
}
