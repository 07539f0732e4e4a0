//! Sliced inverse regression with the sequential rank test and the
//! BIC-type criterion for the structural dimension.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{linalg, Error, Result, SubspaceBasis};

/// Assignment of observations to response slices.
#[derive(Debug, Clone)]
pub struct SliceAssignment {
    /// Slice index (0-based) per observation.
    pub slice_of: Vec<usize>,
    /// Observation count per slice.
    pub counts: Vec<usize>,
}

/// Equal-count slicing by order statistics of y. Boundary positions sit
/// at ceil(n h / H); a tie run crossing a boundary belongs wholly to the
/// lower slice.
pub fn slice_response(y: &DVector<f64>, h_slices: usize) -> Result<SliceAssignment> {
    let n = y.len();
    assert!(h_slices >= 2, "need at least two slices");
    if n < h_slices {
        return Err(Error::TooFewObservations {
            needed: h_slices,
            got: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));

    // nominal slice per sorted position
    let boundary = |h: usize| (n * h).div_ceil(h_slices);
    let mut nominal = vec![0usize; n];
    let mut h = 0;
    for (pos, slot) in nominal.iter_mut().enumerate() {
        while pos + 1 > boundary(h + 1) {
            h += 1;
        }
        *slot = h;
    }
    // collapse tie runs onto the first member's slice
    let mut slice_sorted = nominal;
    let mut run_start = 0;
    for pos in 1..n {
        if y[order[pos]] != y[order[run_start]] {
            run_start = pos;
        } else {
            slice_sorted[pos] = slice_sorted[run_start];
        }
    }

    let mut counts = vec![0usize; h_slices];
    let mut slice_of = vec![0usize; n];
    for (pos, &idx) in order.iter().enumerate() {
        slice_of[idx] = slice_sorted[pos];
        counts[slice_sorted[pos]] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::DegenerateResponse(h_slices));
    }
    Ok(SliceAssignment { slice_of, counts })
}

/// A fitted sliced inverse regression.
#[derive(Debug, Clone)]
pub struct SirFit {
    /// Eigenvalues of the candidate matrix, nonincreasing.
    pub eigenvalues: DVector<f64>,
    /// Back-transformed directions (columns), one per eigenvalue.
    pub directions: DMatrix<f64>,
    /// Inverse square root of the predictor covariance.
    pub sigma_half_inv: DMatrix<f64>,
    /// Slice means of the standardized predictors (columns).
    pub slice_means: DMatrix<f64>,
    /// Observations per slice.
    pub slice_counts: Vec<usize>,
    pub n: usize,
    pub p: usize,
    pub h_slices: usize,
}

/// Fit SIR: standardize the predictors, average them within response
/// slices, and eigendecompose the weighted covariance of slice means.
pub fn sir_fit(x: &DMatrix<f64>, y: &DVector<f64>, h_slices: usize) -> Result<SirFit> {
    let (n, p) = x.shape();
    assert_eq!(n, y.len());
    let slices = slice_response(y, h_slices)?;

    let xbar = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &xbar;
    }
    let sigma = centered.transpose() * &centered / n as f64;
    for j in 0..p {
        if sigma[(j, j)] <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
    }
    let sigma_half_inv = linalg::inv_sqrt_spd(&sigma, 1e-12, 1e12)?;
    let z = &centered * &sigma_half_inv;

    let mut slice_means = DMatrix::zeros(p, h_slices);
    for i in 0..n {
        let h = slices.slice_of[i];
        for j in 0..p {
            slice_means[(j, h)] += z[(i, j)];
        }
    }
    for (h, mut col) in slice_means.column_iter_mut().enumerate() {
        col /= slices.counts[h] as f64;
    }

    let mut candidate = DMatrix::zeros(p, p);
    for h in 0..h_slices {
        let mean = slice_means.column(h);
        candidate.syger(slices.counts[h] as f64 / n as f64, &mean, &mean, 1.0);
    }
    for i in 0..p {
        for j in (i + 1)..p {
            candidate[(i, j)] = candidate[(j, i)];
        }
    }

    let (eigenvalues, vectors) = linalg::sym_eigen_desc(&candidate);
    let directions = &sigma_half_inv * vectors;
    Ok(SirFit {
        eigenvalues,
        directions,
        sigma_half_inv,
        slice_means,
        slice_counts: slices.counts,
        n,
        p,
        h_slices,
    })
}

impl SirFit {
    /// Leading d directions as a subspace basis.
    pub fn leading_basis(&self, d: usize) -> Result<SubspaceBasis> {
        SubspaceBasis::new(self.directions.columns(0, d).into_owned())
    }

    /// Candidate matrix rebuilt from the stored slice bookkeeping.
    pub fn candidate_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.p);
        for h in 0..self.h_slices {
            let mean = self.slice_means.column(h);
            m += (self.slice_counts[h] as f64 / self.n as f64) * mean * mean.transpose();
        }
        m
    }
}

/// Sequential chi-square test for the structural dimension: starting at
/// d = 0, accept the first d whose tail statistic n * sum of trailing
/// eigenvalues stays below the chi-square quantile with
/// (p - d)(H - d - 1) degrees of freedom.
pub fn sequential_test(fit: &SirFit, alpha: f64) -> usize {
    assert!((0.0..1.0).contains(&alpha) && alpha > 0.0);
    let p = fit.p;
    let max_testable = p.min(fit.h_slices.saturating_sub(2) + 1);
    for d in 0..max_testable {
        let tail: f64 = fit.eigenvalues.iter().skip(d).sum();
        let stat = fit.n as f64 * tail;
        let dof = ((p - d) * (fit.h_slices - d - 1)) as f64;
        let critical = ChiSquared::new(dof)
            .expect("dof > 0")
            .inverse_cdf(1.0 - alpha);
        if stat <= critical {
            return d;
        }
    }
    p
}

/// BIC-type criterion: maximize the normalized cumulative squared
/// spectrum minus kappa/n * d(d+1)/2 over 1 <= d <= p; ties break to
/// the smaller d.
pub fn bic_dimension(fit: &SirFit, kappa: f64) -> Result<usize> {
    let total: f64 = fit.eigenvalues.iter().map(|l| l * l).sum();
    if total <= 0.0 {
        return Err(Error::AllZeroSpectrum);
    }
    let n = fit.n as f64;
    let mut best_d = 1;
    let mut best = f64::NEG_INFINITY;
    let mut cum = 0.0;
    for d in 1..=fit.p {
        let lam = fit.eigenvalues[d - 1];
        cum += lam * lam;
        let value = cum / total - kappa / n * (d * (d + 1)) as f64 / 2.0;
        if value > best {
            best = value;
            best_d = d;
        }
    }
    Ok(best_d)
}
