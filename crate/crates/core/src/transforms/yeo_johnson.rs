//! Yeo-Johnson power transformation with profile-likelihood exponent.

use crate::{linalg, Error, Result};

/// A fitted Yeo-Johnson transformation, strictly increasing for every
/// exponent.
#[derive(Debug, Clone, Copy)]
pub struct YeoJohnson {
    pub lambda: f64,
}

/// Four-branch Yeo-Johnson value; continuous in both arguments.
pub fn yeo_johnson_apply(x: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        if lambda == 0.0 {
            x.ln_1p()
        } else {
            (lambda * x.ln_1p()).exp_m1() / lambda
        }
    } else if lambda == 2.0 {
        -(-x).ln_1p()
    } else {
        -((2.0 - lambda) * (-x).ln_1p()).exp_m1() / (2.0 - lambda)
    }
}

fn profile_log_likelihood(sample: &[f64], lambda: f64) -> f64 {
    let n = sample.len() as f64;
    let transformed: Vec<f64> = sample
        .iter()
        .map(|&x| yeo_johnson_apply(x, lambda))
        .collect();
    let var = linalg::variance_n(&transformed);
    if !(var > 0.0) || !var.is_finite() {
        return f64::NEG_INFINITY;
    }
    let jacobian: f64 = sample.iter().map(|&x| x.signum() * x.abs().ln_1p()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * jacobian
}

/// Fit the exponent by profile maximum likelihood over [-2, 2]
/// (golden-section search).
///
/// Falls back to lambda = 1 (identity) when the fitted transform does
/// not reduce the absolute skewness of the sample.
pub fn yeo_johnson_fit(sample: &[f64]) -> Result<YeoJohnson> {
    if sample.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: sample.len(),
        });
    }
    if linalg::variance_n(sample) <= 0.0 {
        return Err(Error::DegenerateSample);
    }

    const INV_PHI: f64 = 0.6180339887498949;
    let (mut a, mut b) = (-2.0_f64, 2.0_f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = profile_log_likelihood(sample, c);
    let mut fd = profile_log_likelihood(sample, d);
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = profile_log_likelihood(sample, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = profile_log_likelihood(sample, d);
        }
    }
    let mut lambda = 0.5 * (a + b);

    let transformed: Vec<f64> = sample
        .iter()
        .map(|&x| yeo_johnson_apply(x, lambda))
        .collect();
    if linalg::skewness(&transformed).abs() > linalg::skewness(sample).abs() {
        lambda = 1.0;
    }
    Ok(YeoJohnson { lambda })
}

impl YeoJohnson {
    pub fn apply(&self, x: f64) -> f64 {
        yeo_johnson_apply(x, self.lambda)
    }
}
