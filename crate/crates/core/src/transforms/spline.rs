//! B-spline basis over a data range, plus its curvature penalty matrix.

use nalgebra::{DMatrix, DVector};

use crate::{linalg, Error, Result};

/// Basis {1, theta_1, .., theta_M} on [t1, t2], where the theta_m are
/// B-splines of the given degree with the first one dropped so the set
/// stays linearly independent of the constant.
#[derive(Debug, Clone)]
pub struct SplineBasis {
    /// Clamped knot vector (boundary knots repeated degree + 1 times).
    /// Empty for the constant-only basis.
    knots: Vec<f64>,
    /// Distinct breakpoints t1 = k_0 < .. < k_L = t2.
    breaks: Vec<f64>,
    degree: usize,
    /// Number of non-constant basis functions.
    m: usize,
}

impl SplineBasis {
    /// Basis with interior knots at equally spaced sample quantiles of
    /// `values` over [min, max]; `m` non-constant functions.
    pub fn from_sample(values: &[f64], m: usize, degree: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewObservations {
                needed: 2,
                got: values.len(),
            });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (t1, t2) = (sorted[0], sorted[sorted.len() - 1]);
        if !(t2 > t1) {
            return Err(Error::ConstantColumn(0));
        }
        if m == 0 {
            return Ok(Self::constant(t1, t2));
        }
        if m < degree {
            return Err(Error::Config(format!(
                "spline basis needs m >= degree, got m = {m}, degree = {degree}"
            )));
        }
        let n_interior = m - degree;
        let mut interior = Vec::with_capacity(n_interior);
        for k in 1..=n_interior {
            let q = k as f64 / (n_interior + 1) as f64;
            let knot = linalg::sample_quantile(&sorted, q);
            // duplicate interior knots from heavy ties would degenerate
            // the basis; keep strictly increasing ones only
            if knot > *interior.last().unwrap_or(&t1) && knot < t2 {
                interior.push(knot);
            }
        }
        Ok(Self::with_knots(t1, t2, &interior, degree))
    }

    /// Explicit construction from boundaries and interior knots.
    pub fn with_knots(t1: f64, t2: f64, interior: &[f64], degree: usize) -> Self {
        assert!(t2 > t1, "empty spline range");
        let mut knots = Vec::with_capacity(interior.len() + 2 * (degree + 1));
        knots.extend(std::iter::repeat_n(t1, degree + 1));
        knots.extend_from_slice(interior);
        knots.extend(std::iter::repeat_n(t2, degree + 1));
        let mut breaks = vec![t1];
        breaks.extend_from_slice(interior);
        breaks.push(t2);
        // K B-splines, first dropped in favor of the explicit constant
        let num_bsplines = knots.len() - degree - 1;
        Self {
            knots,
            breaks,
            degree,
            m: num_bsplines - 1,
        }
    }

    /// The constant-only basis (M = 0).
    pub fn constant(t1: f64, t2: f64) -> Self {
        assert!(t2 > t1, "empty spline range");
        Self {
            knots: Vec::new(),
            breaks: vec![t1, t2],
            degree: 0,
            m: 0,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Length of the evaluated vector Theta = (1, theta_1, .., theta_M).
    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn span(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Distinct breakpoints, for per-interval quadrature.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Values of all degree-`deg` B-splines at t (t clamped to the range).
    fn bspline_values(&self, t: f64, deg: usize) -> Vec<f64> {
        let n0 = self.knots.len() - 1;
        let mut vals = vec![0.0; n0];
        // degree 0: half-open spans, the last one closed
        let (t1, t2) = self.span();
        let t = t.clamp(t1, t2);
        for i in 0..n0 {
            let closed_right = self.knots[(i + 1)..]
                .iter()
                .all(|&k| k == self.knots[i + 1]);
            if self.knots[i] < self.knots[i + 1]
                && self.knots[i] <= t
                && (t < self.knots[i + 1] || (closed_right && t <= self.knots[i + 1]))
            {
                vals[i] = 1.0;
            }
        }
        for k in 1..=deg {
            for i in 0..(self.knots.len() - k - 1) {
                let mut v = 0.0;
                let d1 = self.knots[i + k] - self.knots[i];
                if d1 > 0.0 {
                    v += (t - self.knots[i]) / d1 * vals[i];
                }
                let d2 = self.knots[i + k + 1] - self.knots[i + 1];
                if d2 > 0.0 {
                    v += (self.knots[i + k + 1] - t) / d2 * vals[i + 1];
                }
                vals[i] = v;
            }
        }
        vals.truncate(self.knots.len() - deg - 1);
        vals
    }

    /// `order`-th derivative of all degree-`deg` B-splines at t.
    fn bspline_derivs(&self, t: f64, deg: usize, order: usize) -> Vec<f64> {
        if order == 0 {
            return self.bspline_values(t, deg);
        }
        let count = self.knots.len() - deg - 1;
        if order > deg {
            return vec![0.0; count];
        }
        let lower = self.bspline_derivs(t, deg - 1, order - 1);
        let mut out = vec![0.0; count];
        for (i, o) in out.iter_mut().enumerate() {
            let d1 = self.knots[i + deg] - self.knots[i];
            if d1 > 0.0 {
                *o += deg as f64 * lower[i] / d1;
            }
            let d2 = self.knots[i + deg + 1] - self.knots[i + 1];
            if d2 > 0.0 {
                *o -= deg as f64 * lower[i + 1] / d2;
            }
        }
        out
    }

    fn theta(&self, t: f64, order: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.len());
        out[0] = if order == 0 { 1.0 } else { 0.0 };
        if self.m > 0 {
            let b = self.bspline_derivs(t, self.degree, order);
            for (j, v) in b.into_iter().skip(1).enumerate() {
                out[j + 1] = v;
            }
        }
        out
    }

    /// Theta(t) = (1, theta_1(t), .., theta_M(t)).
    pub fn eval(&self, t: f64) -> DVector<f64> {
        self.theta(t, 0)
    }

    /// First derivatives of Theta at t.
    pub fn eval_d1(&self, t: f64) -> DVector<f64> {
        self.theta(t, 1)
    }

    /// Second derivatives of Theta at t.
    pub fn eval_d2(&self, t: f64) -> DVector<f64> {
        self.theta(t, 2)
    }

    /// Curvature penalty matrix: P_ab = Int D2(Theta_a) D2(Theta_b) dt
    /// over [t1, t2]. Symmetric PSD; the constant's row and column are
    /// zero. A basis of degree <= 1 yields the zero matrix.
    pub fn penalty_matrix(&self) -> DMatrix<f64> {
        let size = self.len();
        let mut p = DMatrix::zeros(size, size);
        if self.degree < 2 || self.m == 0 {
            return p;
        }
        for w in self.breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for &(node, weight) in &linalg::GL10 {
                let d2 = self.eval_d2(mid + half * node);
                p.syger(weight * half, &d2, &d2, 1.0);
            }
        }
        // syger fills the lower triangle; mirror it
        for i in 0..size {
            for j in (i + 1)..size {
                p[(i, j)] = p[(j, i)];
            }
        }
        p
    }
}
