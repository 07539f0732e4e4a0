//! Structural-dimension selection for (transformed) MAVE by the
//! penalized residual-sum-of-squares criterion.

use nalgebra::{DMatrix, DVector};

use crate::Result;

use super::{mave_fit, tmave_fit, MaveFit, MaveOptions};

/// Outcome of the dimension sweep: the chosen dimension plus the
/// per-dimension residual sums of squares and criterion values (None
/// where the fit at that dimension failed and was skipped).
#[derive(Debug, Clone)]
pub struct DimensionSelection {
    pub k: usize,
    pub evaluations: Vec<Option<DimensionEvaluation>>,
}

#[derive(Debug, Clone, Copy)]
pub struct DimensionEvaluation {
    pub rss: f64,
    pub criterion: f64,
}

/// Minimize log(RSS_k / n) + log(n) k / (n h_k^k) over k = 1..=k_max,
/// where RSS_k comes from a full fit at dimension k and h_k is that
/// fit's bandwidth rule. A failed dimension is skipped and excluded
/// from the argmin; the error surfaces only if every dimension fails.
pub fn rss_dimension(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: Option<f64>,
    k_max: usize,
    opts: &MaveOptions,
) -> Result<DimensionSelection> {
    assert!(k_max >= 1 && k_max <= x.ncols());
    let n = x.nrows() as f64;
    let mut evaluations = Vec::with_capacity(k_max);
    let mut best: Option<(usize, f64)> = None;
    let mut first_error = None;
    for k in 1..=k_max {
        let fit: Result<MaveFit> = match lambda {
            Some(l) => tmave_fit(x, y, k, l, opts),
            None => mave_fit(x, y, k, opts),
        };
        match fit {
            Ok(fit) => {
                let h = fit.bandwidth_rule;
                let rss = fit.rss.max(1e-300);
                let criterion = (rss / n).ln() + n.ln() / (n * h.powi(k as i32)) * k as f64;
                evaluations.push(Some(DimensionEvaluation { rss, criterion }));
                if best.map(|(_, c)| criterion < c).unwrap_or(true) {
                    best = Some((k, criterion));
                }
            }
            Err(err) => {
                if first_error.is_none() {
                    first_error = Some(err);
                }
                evaluations.push(None);
            }
        }
    }
    match best {
        Some((k, _)) => Ok(DimensionSelection { k, evaluations }),
        None => Err(first_error.expect("at least one dimension attempted")),
    }
}
