//! Subspace-recovery metrics: vector and trace correlation coefficients.

use nalgebra::DMatrix;

use crate::{linalg, Error, Result};

/// A p x d matrix whose columns span a subspace; full column rank is
/// checked on construction (after scaling each column to unit norm).
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    columns: DMatrix<f64>,
}

impl SubspaceBasis {
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        assert!(columns.ncols() >= 1 && columns.nrows() >= columns.ncols());
        let mut scaled = columns.clone();
        for mut col in scaled.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        let svd = scaled.svd(false, false);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(smin > 1e-10) {
            return Err(Error::RankDeficientBasis(smin));
        }
        Ok(Self { columns })
    }

    pub fn from_columns(p: usize, cols: &[&[f64]]) -> Result<Self> {
        let d = cols.len();
        let m = DMatrix::from_fn(p, d, |i, j| cols[j][i]);
        Self::new(m)
    }

    pub fn p(&self) -> usize {
        self.columns.nrows()
    }

    pub fn d(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    /// Orthonormalized copy (column-pivoted QR).
    pub fn orthonormalized(&self) -> DMatrix<f64> {
        linalg::orthonormalize(&self.columns)
    }
}

fn principal_cosine_squares(estimate: &SubspaceBasis, truth: &SubspaceBasis) -> Result<Vec<f64>> {
    if estimate.p() != truth.p() || estimate.d() != truth.d() {
        return Err(Error::DimensionMismatch(
            estimate.p(),
            estimate.d(),
            truth.p(),
            truth.d(),
        ));
    }
    let q_est = estimate.orthonormalized();
    let q_tru = truth.orthonormalized();
    let cross = q_tru.transpose() * q_est;
    let svd = cross.svd(false, false);
    // eigenvalues of B_o^T Bhat_o Bhat_o^T B_o are the squared singular
    // values; clip round-off outside [0, 1]
    Ok(svd
        .singular_values
        .iter()
        .map(|&s| (s * s).clamp(0.0, 1.0))
        .collect())
}

/// Vector correlation coefficient: the square root of the product of
/// squared principal-angle cosines. 1 iff the spans agree, 0 when any
/// direction of one span is orthogonal to the other.
pub fn vcc(estimate: &SubspaceBasis, truth: &SubspaceBasis) -> Result<f64> {
    let phi2 = principal_cosine_squares(estimate, truth)?;
    Ok(phi2.iter().product::<f64>().sqrt())
}

/// Trace correlation coefficient: the root mean of squared
/// principal-angle cosines.
pub fn tcc(estimate: &SubspaceBasis, truth: &SubspaceBasis) -> Result<f64> {
    let phi2 = principal_cosine_squares(estimate, truth)?;
    let d = phi2.len() as f64;
    Ok((phi2.iter().sum::<f64>() / d).sqrt())
}
