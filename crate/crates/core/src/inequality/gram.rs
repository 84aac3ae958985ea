use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::module_space::{abs_sq, inner, ModuleVector};

/// Scalar Gram data `‖⟨y_i, y_j⟩‖` and the aggregates the bounds use.
///
/// Maxima break ties toward the lowest index; the winning indices are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSummary {
    pub gram_norms: Vec<Vec<f64>>,
    pub row_sums: Vec<f64>,
    /// `max_i Σ_j ‖⟨y_i,y_j⟩‖`.
    pub max_row_sum: f64,
    pub max_row_sum_index: usize,
    /// `max_i ‖y_i‖²`.
    pub max_norm_sq: f64,
    pub max_norm_sq_index: usize,
    /// `Σ_{i≠j} ‖⟨y_i,y_j⟩‖²`.
    pub offdiag_sq_sum: f64,
    /// `max_{i≠j} ‖⟨y_i,y_j⟩‖`, zero when `n = 1`.
    pub max_offdiag: f64,
    /// `max_i Σ_{j≠i} ‖⟨y_i,y_j⟩‖²`.
    pub max_offdiag_row_sq_sum: f64,
    pub max_offdiag_row_sq_sum_index: usize,
}

/// First index of the maximum.
fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
    )
}

impl GramSummary {
    pub fn compute(y: &[ModuleVector]) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::contract("gram summary of an empty family"));
        }
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            g[i][i] = abs_sq(&y[i]).spectral_radius()?;
            for j in (i + 1)..n {
                let v = inner(&y[i], &y[j])?.norm()?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        let row_sums: Vec<f64> = g.iter().map(|r| r.iter().sum()).collect();
        let diag: Vec<f64> = (0..n).map(|i| g[i][i]).collect();
        let off_rows: Vec<f64> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| g[i][j] * g[i][j]).sum())
            .collect();
        let (max_row_sum_index, max_row_sum) = argmax(&row_sums);
        let (max_norm_sq_index, max_norm_sq) = argmax(&diag);
        let (max_offdiag_row_sq_sum_index, max_offdiag_row_sq_sum) = argmax(&off_rows);
        let max_offdiag = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| g[i][j])
            .fold(0.0, f64::max);
        Ok(Self {
            offdiag_sq_sum: off_rows.iter().sum(),
            gram_norms: g,
            row_sums,
            max_row_sum,
            max_row_sum_index,
            max_norm_sq,
            max_norm_sq_index,
            max_offdiag,
            max_offdiag_row_sq_sum,
            max_offdiag_row_sq_sum_index,
        })
    }

    pub fn n(&self) -> usize {
        self.gram_norms.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng::NormalStream;
    use crate::linalg::ComplexMatrix;
    use crate::module_space::module_norm;

    fn family(seed: u64, n: usize, m: usize, d: usize) -> Vec<ModuleVector> {
        let mut rng = NormalStream::new(seed);
        (0..n)
            .map(|_| ModuleVector::from_matrix(ComplexMatrix::from_fn(m, d, |_, _| rng.complex(1.0))))
            .collect()
    }

    #[test]
    fn symmetric_with_squared_norm_diagonal() {
        for seed in 0..10 {
            let y = family(seed, 4, 6, 2);
            let s = GramSummary::compute(&y).unwrap();
            for (i, yi) in y.iter().enumerate() {
                let norm = module_norm(yi).unwrap();
                assert!((s.gram_norms[i][i] - norm * norm).abs() <= 1e-12 * norm * norm);
                for j in 0..4 {
                    assert_eq!(s.gram_norms[i][j], s.gram_norms[j][i]);
                    assert!(s.gram_norms[i][j] >= 0.0);
                }
            }
            let best = s.row_sums.iter().cloned().fold(0.0, f64::max);
            assert_eq!(s.max_row_sum, best);
        }
    }

    #[test]
    fn singleton_has_no_offdiagonal_terms() {
        let s = GramSummary::compute(&family(1, 1, 3, 1)).unwrap();
        assert_eq!(s.max_offdiag, 0.0);
        assert_eq!(s.offdiag_sq_sum, 0.0);
        assert_eq!(s.max_offdiag_row_sq_sum, 0.0);
        assert_eq!(s.max_row_sum, s.gram_norms[0][0]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let y = family(2, 1, 3, 2);
        let twice = vec![y[0].clone(), y[0].clone()];
        let s = GramSummary::compute(&twice).unwrap();
        assert_eq!(s.max_row_sum_index, 0);
        assert_eq!(s.max_norm_sq_index, 0);
        assert_eq!(s.max_offdiag_row_sq_sum_index, 0);
    }

    #[test]
    fn empty_family_is_rejected() {
        assert!(GramSummary::compute(&[]).is_err());
    }
}
