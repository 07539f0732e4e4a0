//! Penalized-spline scatterplot smoother with generalized
//! cross-validation, used for the plot-data curves.

use nalgebra::{DMatrix, DVector};

use crate::transforms::SplineBasis;
use crate::{Error, Result};

/// A fitted cubic smoothing spline.
#[derive(Debug, Clone)]
pub struct SmoothingSpline {
    basis: SplineBasis,
    coeffs: DVector<f64>,
    pub lambda: f64,
}

impl SmoothingSpline {
    /// Fit by minimizing ||y - g(x)||^2 + lambda * curvature(g), with
    /// lambda picked by generalized cross-validation over a log grid.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        assert_eq!(x.len(), y.len());
        let n = x.len();
        if n < 8 {
            return Err(Error::TooFewObservations { needed: 8, got: n });
        }
        let m = (n / 4).clamp(4, 20);
        let basis = SplineBasis::from_sample(x, m, 3)?;
        let size = basis.len();
        let design = DMatrix::from_fn(n, size, |i, k| basis.eval(x[i])[k]);
        let penalty = basis.penalty_matrix();
        let gram = design.transpose() * &design;
        let rhs = design.transpose() * DVector::from_column_slice(y);

        let scale = gram.trace() / penalty.trace().max(1e-12);
        let mut best: Option<(f64, f64, DVector<f64>)> = None;
        for k in 0..40 {
            let lambda = scale * 10f64.powf(-8.0 + 14.0 * k as f64 / 39.0);
            let mut a = &gram + lambda * &penalty;
            for i in 0..size {
                a[(i, i)] += 1e-10 * scale;
            }
            let Some(chol) = a.clone().cholesky() else {
                continue;
            };
            let coeffs = chol.solve(&rhs);
            // effective degrees of freedom: trace of the smoother matrix
            let edf: f64 = chol.solve(&gram).diagonal().sum();
            let fitted = &design * &coeffs;
            let rss: f64 = (0..n).map(|i| (y[i] - fitted[i]).powi(2)).sum();
            let denom = (n as f64 - edf).max(1e-6);
            let gcv = n as f64 * rss / (denom * denom);
            if best.as_ref().map(|(g, _, _)| gcv < *g).unwrap_or(true) {
                best = Some((gcv, lambda, coeffs));
            }
        }
        let (_, lambda, coeffs) = best.ok_or(Error::SingularNormalEquations)?;
        Ok(Self {
            basis,
            coeffs,
            lambda,
        })
    }

    /// Evaluate the fitted curve (flat beyond the data range).
    pub fn eval(&self, t: f64) -> f64 {
        self.basis.eval(t).dot(&self.coeffs)
    }

    pub fn span(&self) -> (f64, f64) {
        self.basis.span()
    }
}
