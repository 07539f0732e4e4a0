//! Strictly increasing transform f(t) = C + Int_{t1}^{t} exp{s(u)} du,
//! with s a spline in the log-derivative scale.

use nalgebra::DVector;

use crate::linalg::GL10;
use crate::transforms::SplineBasis;

/// A monotone transform represented through the exponential of a spline.
///
/// Immutable after construction; evaluation is thread-safe. Outside the
/// knot range the transform continues linearly with the boundary
/// derivative.
#[derive(Debug, Clone)]
pub struct MonotoneTransform {
    coeffs: DVector<f64>,
    basis: SplineBasis,
    constant: f64,
    /// Cumulative integral of exp{s} at each breakpoint.
    cum: Vec<f64>,
    /// Cumulative integral of Theta * exp{s} at each breakpoint.
    cum_grad: Vec<DVector<f64>>,
}

impl MonotoneTransform {
    pub fn new(coeffs: DVector<f64>, basis: SplineBasis, constant: f64) -> Self {
        assert_eq!(coeffs.len(), basis.len(), "coefficient/basis size mismatch");
        let breaks = basis.breaks().to_vec();
        let mut cum = Vec::with_capacity(breaks.len());
        let mut cum_grad = Vec::with_capacity(breaks.len());
        cum.push(0.0);
        cum_grad.push(DVector::zeros(basis.len()));
        for w in breaks.windows(2) {
            let (mut acc, mut acc_g) = (0.0, DVector::zeros(basis.len()));
            let mid = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            for &(node, weight) in &GL10 {
                let t = mid + half * node;
                let theta = basis.eval(t);
                let d = coeffs.dot(&theta).exp();
                acc += weight * half * d;
                acc_g.axpy(weight * half * d, &theta, 1.0);
            }
            cum.push(cum.last().unwrap() + acc);
            let prev = cum_grad.last().unwrap().clone();
            cum_grad.push(prev + acc_g);
        }
        Self {
            coeffs,
            basis,
            constant,
            cum,
            cum_grad,
        }
    }

    /// The identity map written in this representation: zero spline
    /// coefficients with the constant chosen so f(t) = t on [t1, t2].
    pub fn identity(t1: f64, t2: f64) -> Self {
        let basis = SplineBasis::constant(t1, t2);
        Self::new(DVector::zeros(1), basis, t1)
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn origin(&self) -> f64 {
        self.basis.breaks()[0]
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Log-derivative s(t) (clamped to the knot range).
    pub fn log_derivative(&self, t: f64) -> f64 {
        self.coeffs.dot(&self.basis.eval(t))
    }

    /// Derivative exp{s(t)}; constant beyond the knot range.
    pub fn derivative(&self, t: f64) -> f64 {
        self.log_derivative(t).exp()
    }

    /// f(t), linearly extrapolated with the boundary derivative outside
    /// [t1, t2].
    pub fn eval(&self, t: f64) -> f64 {
        let breaks = self.basis.breaks();
        let (t1, t2) = self.basis.span();
        if t < t1 {
            return self.constant + (t - t1) * self.derivative(t1);
        }
        if t > t2 {
            return self.constant + self.cum.last().unwrap() + (t - t2) * self.derivative(t2);
        }
        let idx = interval_index(breaks, t);
        self.constant + self.cum[idx] + self.partial(breaks[idx], t)
    }

    /// f(t) together with its gradient in the spline coefficients,
    /// d f(t) / d c = Int_{t1}^{t} Theta(u) exp{s(u)} du.
    pub fn eval_with_gradient(&self, t: f64) -> (f64, DVector<f64>) {
        let breaks = self.basis.breaks();
        let (t1, t2) = self.basis.span();
        let t_in = t.clamp(t1, t2);
        let idx = interval_index(breaks, t_in);
        let mut grad = self.cum_grad[idx].clone();
        let mut value = self.constant + self.cum[idx];
        let (a, b) = (breaks[idx], t_in);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        if half > 0.0 {
            for &(node, weight) in &GL10 {
                let u = mid + half * node;
                let theta = self.basis.eval(u);
                let d = self.coeffs.dot(&theta).exp();
                value += weight * half * d;
                grad.axpy(weight * half * d, &theta, 1.0);
            }
        }
        if t < t1 {
            let d = self.derivative(t1);
            value += (t - t1) * d;
            grad.axpy((t - t1) * d, &self.basis.eval(t1), 1.0);
        } else if t > t2 {
            let d = self.derivative(t2);
            value += (t - t2) * d;
            grad.axpy((t - t2) * d, &self.basis.eval(t2), 1.0);
        }
        (value, grad)
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        GL10.iter()
            .map(|&(node, weight)| {
                weight * self.coeffs.dot(&self.basis.eval(mid + half * node)).exp()
            })
            .sum::<f64>()
            * half
    }
}

fn interval_index(breaks: &[f64], t: f64) -> usize {
    let idx = breaks.partition_point(|&b| b <= t);
    idx.saturating_sub(1).min(breaks.len() - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cubic_basis() -> SplineBasis {
        SplineBasis::with_knots(0.0, 3.0, &[1.0, 2.0], 3)
    }

    #[test]
    fn zero_coefficients_give_identity_slope() {
        let basis = cubic_basis();
        let tr = MonotoneTransform::new(DVector::zeros(basis.len()), basis, 0.0);
        for k in 0..=30 {
            let t = 0.1 * k as f64;
            assert_abs_diff_eq!(tr.eval(t), t, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_log_derivative_scales_linearly() {
        let basis = cubic_basis();
        let mut coeffs = DVector::zeros(basis.len());
        coeffs[0] = 2.0_f64.ln();
        let tr = MonotoneTransform::new(coeffs, basis, 0.0);
        assert_abs_diff_eq!(tr.eval(1.5), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tr.eval(3.0), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_adaptive_simpson_oracle_on_cubic_spline() {
        // independent quadrature route: adaptive Simpson on exp{s}
        let basis = cubic_basis();
        let coeffs = DVector::from_fn(basis.len(), |i, _| 0.3 * (i as f64 + 1.0).sin());
        let tr = MonotoneTransform::new(coeffs.clone(), basis.clone(), 0.7);

        fn simpson<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            fa: f64,
            fb: f64,
            fm: f64,
            eps: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1)
                    + simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1)
            }
        }

        let integrand = |u: f64| coeffs.dot(&basis.eval(u)).exp();
        for &t in &[0.3, 0.9, 1.4, 2.1, 2.9] {
            let oracle = 0.7
                + simpson(
                    &integrand,
                    0.0,
                    t,
                    integrand(0.0),
                    integrand(t),
                    integrand(0.5 * t),
                    1e-12,
                    30,
                );
            assert_abs_diff_eq!(tr.eval(t), oracle, epsilon = 1e-8);
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        let basis = cubic_basis();
        let coeffs = DVector::from_fn(basis.len(), |i, _| if i % 2 == 0 { -0.8 } else { 0.9 });
        let tr = MonotoneTransform::new(coeffs, basis, -2.0);
        let grid: Vec<f64> = (0..1000).map(|k| -0.5 + 4.0 * k as f64 / 999.0).collect();
        let mut min_slope = f64::INFINITY;
        for w in grid.windows(2) {
            let slope = (tr.eval(w[1]) - tr.eval(w[0])) / (w[1] - w[0]);
            min_slope = min_slope.min(slope);
        }
        assert!(min_slope > 0.0, "numerical derivative dips to {min_slope}");
    }

    #[test]
    fn linear_extrapolation_uses_boundary_derivative() {
        let basis = cubic_basis();
        let coeffs = DVector::from_fn(basis.len(), |i, _| 0.1 * i as f64);
        let tr = MonotoneTransform::new(coeffs, basis, 0.0);
        let d2 = tr.derivative(3.0);
        assert_abs_diff_eq!(tr.eval(4.0), tr.eval(3.0) + d2, epsilon = 1e-12);
        let d1 = tr.derivative(0.0);
        assert_abs_diff_eq!(tr.eval(-1.0), tr.eval(0.0) - d1, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = cubic_basis();
        let coeffs = DVector::from_fn(basis.len(), |i, _| 0.2 * ((i * i) as f64).cos());
        let tr = MonotoneTransform::new(coeffs.clone(), basis.clone(), 0.0);
        let h = 1e-6;
        for &t in &[0.4, 1.7, 2.8] {
            let (value, grad) = tr.eval_with_gradient(t);
            assert_abs_diff_eq!(value, tr.eval(t), epsilon = 1e-12);
            for k in 0..coeffs.len() {
                let mut up = coeffs.clone();
                up[k] += h;
                let mut dn = coeffs.clone();
                dn[k] -= h;
                let fd = (MonotoneTransform::new(up, basis.clone(), 0.0).eval(t)
                    - MonotoneTransform::new(dn, basis.clone(), 0.0).eval(t))
                    / (2.0 * h);
                assert_abs_diff_eq!(grad[k], fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn identity_constructor() {
        let tr = MonotoneTransform::identity(-2.0, 5.0);
        for &t in &[-2.0, 0.0, 1.3, 5.0, 7.0, -4.0] {
            assert_abs_diff_eq!(tr.eval(t), t, epsilon = 1e-12);
        }
    }
}
