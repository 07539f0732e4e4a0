//! Per-predictor transformations: rescaled empirical CDF and normal
//! scores, Yeo-Johnson with likelihood-fitted exponent, and the
//! penalized monotone-spline representation.

mod monotone;
mod spline;
mod yeo_johnson;

pub use monotone::MonotoneTransform;
pub use spline::SplineBasis;
pub use yeo_johnson::{yeo_johnson_apply, yeo_johnson_fit, YeoJohnson};

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{linalg, Error, Result};

const SQRT_2PI: f64 = 2.5066282746310002;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal quantile, Newton-polished against the CDF.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = std_normal().inverse_cdf(p);
    for _ in 0..2 {
        let pdf = norm_pdf(x);
        if pdf < 1e-300 {
            break;
        }
        x -= (norm_cdf(x) - p) / pdf;
    }
    x
}

/// Rescaled empirical distribution function of one predictor's sample,
/// with denominator n + 1 so evaluations stay below 1.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// count(values <= t) / (n + 1); ties share a value.
    pub fn eval(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= t);
        count as f64 / (self.n() + 1) as f64
    }
}

/// Normal scores of every column: entry (i, j) is the standard normal
/// quantile of column j's rescaled empirical CDF at x_ij.
///
/// A strictly increasing marginal map of any input column leaves its
/// score column unchanged.
pub fn normal_scores(data: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = data.shape();
    let mut out = DMatrix::zeros(n, p);
    for j in 0..p {
        let col: Vec<f64> = data.column(j).iter().copied().collect();
        if n >= 2 && linalg::variance_n(&col) == 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        let cdf = EmpiricalCdf::new(&col)?;
        for i in 0..n {
            out[(i, j)] = norm_quantile(cdf.eval(data[(i, j)]));
        }
    }
    Ok(out)
}

/// Center and scale to sample mean 0 and variance 1 (denominator n).
///
/// Returns the standardized values with the applied shift and scale.
pub fn standardize_transform(values: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let var = linalg::variance_n(values);
    if var <= 0.0 {
        return Err(Error::ConstantColumn(0));
    }
    let shift = linalg::mean(values);
    let scale = var.sqrt();
    let out = values.iter().map(|v| (v - shift) / scale).collect();
    Ok((out, shift, scale))
}
