//! Blockwise Gauss-Jordan update of one predictor's transform
//! coefficients: a Newton-type solve on the penalized least-squares
//! criterion, with step halving so the criterion never increases.

use nalgebra::{DMatrix, DVector};

use crate::transforms::{MonotoneTransform, SplineBasis};
use crate::{linalg, Error, Result};

/// Everything the block update for predictor l needs, with the rest of
/// the fit held fixed: partial residuals, per-anchor projection
/// coefficients, weights, the raw predictor column, basis and penalty.
pub struct BlockProblem<'a> {
    /// r0[(i, j)] = y_i - a_j - (model terms of the other predictors).
    pub partial_residuals: &'a DMatrix<f64>,
    /// gamma_j = b_j . (row l of B) / scale_l: the coefficient the
    /// transform difference enters the model with, per anchor.
    pub gamma: &'a DVector<f64>,
    pub weights: &'a DMatrix<f64>,
    /// Raw values of predictor l (transform arguments).
    pub x_col: &'a [f64],
    pub basis: &'a SplineBasis,
    pub penalty: &'a DMatrix<f64>,
    pub lambda: f64,
}

/// The assembled linear system of one Gauss-Jordan step.
pub struct GaussJordanState {
    pub coeffs: DVector<f64>,
    /// Curvature matrix (1/n) X*^T X* + lambda P.
    pub curvature: DMatrix<f64>,
    /// Gradient vector -(1/n) X*^T r* + lambda P c.
    pub gradient: DVector<f64>,
}

impl<'a> BlockProblem<'a> {
    fn n(&self) -> usize {
        self.x_col.len()
    }

    /// Transform values and coefficient gradients at every observation.
    fn profile(&self, coeffs: &DVector<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
        let tr = MonotoneTransform::new(coeffs.clone(), self.basis.clone(), 0.0);
        let mut values = Vec::with_capacity(self.n());
        let mut grads = Vec::with_capacity(self.n());
        for &t in self.x_col {
            let (v, g) = tr.eval_with_gradient(t);
            values.push(v);
            grads.push(g);
        }
        (values, grads)
    }

    /// The parts of the penalized criterion that depend on this block:
    /// (1/n) sum w_ij (r0_ij - gamma_j (phi_i - phi_j))^2
    /// + lambda c^T P c.
    pub fn objective(&self, coeffs: &DVector<f64>) -> f64 {
        let (phi, _) = self.profile(coeffs);
        self.objective_with_values(coeffs, &phi)
    }

    fn objective_with_values(&self, coeffs: &DVector<f64>, phi: &[f64]) -> f64 {
        let n = self.n();
        let mut sse = 0.0;
        for j in 0..n {
            let g = self.gamma[j];
            for i in 0..n {
                let w = self.weights[(i, j)];
                if w == 0.0 {
                    continue;
                }
                let r = self.partial_residuals[(i, j)] - g * (phi[i] - phi[j]);
                sse += w * r * r;
            }
        }
        sse / n as f64 + self.lambda * (coeffs.transpose() * self.penalty * coeffs)[(0, 0)]
    }

    /// Assemble the curvature matrix and gradient at the given
    /// coefficients.
    pub fn assemble(&self, coeffs: &DVector<f64>) -> GaussJordanState {
        let n = self.n();
        let size = self.basis.len();
        let (phi, grads) = self.profile(coeffs);
        let mut curvature = DMatrix::zeros(size, size);
        let mut gradient = DVector::zeros(size);
        let mut row = DVector::zeros(size);
        for j in 0..n {
            let g = self.gamma[j];
            if g == 0.0 {
                continue;
            }
            for i in 0..n {
                let w = self.weights[(i, j)];
                if w == 0.0 {
                    continue;
                }
                // X* row (without the sqrt(w), which cancels when paired):
                // gamma_j (grad_i - grad_j), weighted by w
                for k in 0..size {
                    row[k] = g * (grads[i][k] - grads[j][k]);
                }
                let resid = self.partial_residuals[(i, j)] - g * (phi[i] - phi[j]);
                curvature.syger(w / n as f64, &row, &row, 1.0);
                gradient.axpy(-w * resid / n as f64, &row, 1.0);
            }
        }
        for c in 0..size {
            for r in (c + 1)..size {
                curvature[(c, r)] = curvature[(r, c)];
            }
        }
        curvature += self.lambda * self.penalty;
        gradient += self.lambda * self.penalty * coeffs;
        GaussJordanState {
            coeffs: coeffs.clone(),
            curvature,
            gradient,
        }
    }

    /// Dense design matrix X* and residual vector r* over the unpruned
    /// pairs (row order: anchor-major). Exposes the assembled system for
    /// verification; the solver itself streams these quantities.
    pub fn dense_design(&self, coeffs: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.n();
        let size = self.basis.len();
        let (phi, grads) = self.profile(coeffs);
        let mut rows = Vec::new();
        let mut resids = Vec::new();
        for j in 0..n {
            let g = self.gamma[j];
            for i in 0..n {
                let w = self.weights[(i, j)];
                if w == 0.0 {
                    continue;
                }
                let sw = w.sqrt();
                let mut row = vec![0.0; size];
                for k in 0..size {
                    row[k] = g * (grads[i][k] - grads[j][k]) * sw;
                }
                rows.push(row);
                resids.push((self.partial_residuals[(i, j)] - g * (phi[i] - phi[j])) * sw);
            }
        }
        let xstar = DMatrix::from_fn(rows.len(), size, |r, c| rows[r][c]);
        let rstar = DVector::from_vec(resids);
        (xstar, rstar)
    }

    /// Run the damped Newton iteration from `start`: solve
    /// curvature * delta = -gradient, halve the step until the block
    /// objective strictly decreases, stop when the step is tiny.
    ///
    /// The curvature gets a small Tikhonov floor and the step an
    /// infinity-norm cap; directions the data and penalty leave flat
    /// (noise predictors with near-zero projection coefficients) would
    /// otherwise admit unbounded do-nothing steps that underflow the
    /// transform's derivative.
    pub fn solve(
        &self,
        start: &DVector<f64>,
        max_iter: usize,
        tol: f64,
        predictor: usize,
    ) -> Result<DVector<f64>> {
        const STEP_CAP: f64 = 2.0;
        let mut coeffs = start.clone();
        let mut best = self.objective(&coeffs);
        for _ in 0..max_iter {
            let state = self.assemble(&coeffs);
            let mut curvature = state.curvature;
            let floor = 1e-9 * curvature.diagonal().amax().max(1e-12);
            for i in 0..curvature.nrows() {
                curvature[(i, i)] += floor;
            }
            let mut delta = linalg::solve_sym_ridge(&curvature, &(-&state.gradient), 1e-10)
                .ok_or(Error::PenaltySingular(predictor))?;
            if delta.amax() < tol {
                break;
            }
            if delta.amax() > STEP_CAP {
                delta *= STEP_CAP / delta.amax();
            }
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..20 {
                let trial = &coeffs + step * &delta;
                let value = self.objective(&trial);
                if value.is_finite() && value <= best - 1e-12 * (1.0 + best.abs()) {
                    coeffs = trial;
                    best = value;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            if (step * &delta).amax() < tol {
                break;
            }
        }
        Ok(coeffs)
    }
}
