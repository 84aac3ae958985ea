//! Cyclic complex Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the real symmetric Jacobi rotation, so the
//! combined transform is
//!
//! ```text
//! J = | c              s |
//!     | -s·e^{-iφ}   c·e^{-iφ} |      (on rows/cols p, q), a_pq = |a_pq| e^{iφ}
//! ```
//!
//! Jacobi is slower than tridiagonal QR but accurate to a few ulps relative
//! to `‖M‖`, which is what the order comparisons need.

use num_complex::Complex64;

use super::hermitian::HermitianMatrix;
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V diag(λ) V*` with `λ` ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Rebuilds `V f(Λ) V*` for a real spectral function.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for (j, &w) in fv.iter().enumerate() {
                scaled[(i, j)] *= w;
            }
        }
        HermitianMatrix::symmetrize(&scaled.mul_adjoint(&self.vectors)).0
    }
}

/// Rotation coefficients `(c, s, phase)` annihilating the off-diagonal entry
/// `g` of the Hermitian 2×2 block `[[app, g], [conj g, aqq]]`.
#[inline]
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, g: Complex64) -> (f64, f64, Complex64) {
    let gabs = g.norm();
    let phase = g / gabs;
    let zeta = (aqq - app) / (2.0 * gabs);
    let t = if zeta.abs() > 1e150 {
        0.5 / zeta
    } else {
        let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
        sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Applies `M ← M J` on columns `p`, `q`.
#[inline]
pub(crate) fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let pc = phase.conj();
    let (jpp, jpq, jqp, jqq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0), -pc * s, pc * c);
    for k in 0..m.rows() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
}

/// Applies `M ← J* M` on rows `p`, `q`.
#[inline]
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    // J* rows: [c, -s·e^{iφ}] and [s, c·e^{iφ}]
    let (kpp, kpq, kqp, kqq) = (Complex64::new(c, 0.0), -phase * s, Complex64::new(s, 0.0), phase * c);
    for k in 0..m.cols() {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = kpp * mpk + kpq * mqk;
        m[(q, k)] = kqp * mpk + kqq * mqk;
    }
}

fn jacobi(h: &HermitianMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    if n == 1 {
        return Ok((vec![a[(0, 0)].re], v));
    }
    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    // off-diagonal roundoff after a rotation sweep is a few n·eps·‖A‖
    let threshold = f64::EPSILON * n as f64 * total;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                if g.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, g);
                rotate_columns(&mut a, p, q, c, s, phase);
                rotate_rows(&mut a, p, q, c, s, phase);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, c, s, phase);
                }
            }
        }
    }
    if !converged {
        return Err(Error::numerical(format!(
            "hermitian eigensolver did not converge for a {n}x{n} matrix"
        )));
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

/// Full eigen-decomposition with ascending eigenvalues and unitary `V`.
pub fn hermitian_eigen(h: &HermitianMatrix) -> Result<HermitianEigen> {
    let (values, vectors) = jacobi(h, true)?;
    let vectors = vectors.expect("vectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok(HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(h, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng::NormalStream;

    fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
        let mut rng = NormalStream::new(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex(1.0));
        HermitianMatrix::symmetrize(&(&g + &g.adjoint())).0
    }

    // Independent check: V diag(λ) V* rebuilt by explicit triple loops.
    fn rebuild(e: &HermitianEigen) -> ComplexMatrix {
        let n = e.values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                acc += e.vectors[(i, k)] * e.values[k] * e.vectors[(j, k)].conj();
            }
            acc
        })
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eigen(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(
            e.vectors
                .adjoint_mul(&e.vectors)
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );
    }

    #[test]
    fn diagonal_is_sorted_ascending() {
        let e = hermitian_eigen(&HermitianMatrix::from_real_diag(&[3.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
    }

    #[test]
    fn seeded_random_reconstructs() {
        for seed in 0..20 {
            for n in [2, 4, 7] {
                let h = random_hermitian(seed, n);
                let e = hermitian_eigen(&h).unwrap();
                let scale = e.max().abs().max(e.min().abs()).max(1.0);
                assert!(rebuild(&e).max_abs_diff(h.matrix()) <= 1e-12 * scale);
                let vv = e.vectors.adjoint_mul(&e.vectors);
                assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
                assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
                let only = hermitian_eigenvalues(&h).unwrap();
                for (a, b) in only.iter().zip(&e.values) {
                    assert!((a - b).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn handles_zero_and_one_by_one() {
        assert_eq!(hermitian_eigenvalues(&HermitianMatrix::zeros(3)).unwrap(), vec![0.0; 3]);
        assert_eq!(
            hermitian_eigenvalues(&HermitianMatrix::from_real_diag(&[-2.5])).unwrap(),
            vec![-2.5]
        );
    }

    #[test]
    fn trace_is_preserved_at_larger_size() {
        let h = random_hermitian(99, 40);
        let e = hermitian_eigen(&h).unwrap();
        let tr: f64 = e.values.iter().sum();
        assert!((tr - h.matrix().trace().re).abs() < 1e-11);
        assert!(rebuild(&e).max_abs_diff(h.matrix()) <= 1e-12 * e.max().abs().max(1.0));
    }
}
