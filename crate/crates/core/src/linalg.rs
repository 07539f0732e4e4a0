//! Shared dense linear-algebra helpers.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Nodes and weights of the 10-point Gauss-Legendre rule on [-1, 1].
pub const GL10: [(f64, f64); 10] = [
    (-0.9739065285171717, 0.0666713443086881),
    (-0.8650633666889845, 0.1494513491505806),
    (-0.6794095682990244, 0.219086362515982),
    (-0.4333953941292472, 0.2692667193099963),
    (-0.1488743389816312, 0.2955242247147529),
    (0.1488743389816312, 0.2955242247147529),
    (0.4333953941292472, 0.2692667193099963),
    (0.6794095682990244, 0.219086362515982),
    (0.8650633666889845, 0.1494513491505806),
    (0.9739065285171717, 0.0666713443086881),
];

/// Integrate `f` over [a, b] with the fixed 10-node Gauss-Legendre rule.
pub fn gauss_legendre_10<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL10.iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Eigenvalues (descending) and matching eigenvectors of a symmetric matrix.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Inverse symmetric square root of a covariance matrix.
///
/// Eigenvalues are floored at `floor`; errors if the condition number of
/// the raw spectrum exceeds `max_cond`.
pub fn inv_sqrt_spd(m: &DMatrix<f64>, floor: f64, max_cond: f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen_desc(m);
    let lmax = values[0];
    let lmin = values[values.len() - 1];
    if !(lmax > 0.0) || lmin <= lmax / max_cond {
        return Err(Error::SingularCovariance(max_cond));
    }
    let scale = DVector::from_fn(values.len(), |i, _| 1.0 / values[i].max(floor).sqrt());
    let mut out = vectors.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= scale[j];
    }
    Ok(&out * vectors.transpose())
}

/// Orthonormal basis for the column span of `m`, via column-pivoted QR.
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = m.ncols();
    let qr = m.clone().col_piv_qr();
    let q = qr.q();
    q.columns(0, d.min(q.ncols())).into_owned()
}

/// Solve the symmetric system `a x = b`, retrying with a ridge on failure.
///
/// Returns `None` when even the ridged system fails to factor.
pub fn solve_sym_ridge(a: &DMatrix<f64>, b: &DVector<f64>, ridge: f64) -> Option<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Some(chol.solve(b));
    }
    let n = a.nrows();
    let mut a2 = a.clone();
    let scale = a.diagonal().amax().max(1.0);
    for i in 0..n {
        a2[(i, i)] += ridge * scale;
    }
    a2.clone()
        .cholesky()
        .map(|c| c.solve(b))
        .or_else(|| a2.lu().solve(b))
}

/// Sample mean of a slice.
pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with denominator n.
pub fn variance_n(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Sample skewness (third standardized moment, denominator n).
pub fn skewness(v: &[f64]) -> f64 {
    let m = mean(v);
    let n = v.len() as f64;
    let s2 = variance_n(v);
    if s2 <= 0.0 {
        return 0.0;
    }
    v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / (n * s2.powf(1.5))
}

/// Order-statistic sample quantile with linear interpolation.
///
/// `sorted` must be ascending; `q` in [0, 1].
pub fn sample_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gl10_integrates_polynomials_exactly() {
        // degree 19 is the rule's exactness limit
        let got = gauss_legendre_10(0.0, 1.0, |x| x.powi(19));
        assert_abs_diff_eq!(got, 1.0 / 20.0, epsilon = 1e-14);
        let got = gauss_legendre_10(-2.0, 3.0, |x| 4.0 * x.powi(3) - x + 2.0);
        assert_abs_diff_eq!(got, 65.0 - 2.5 + 10.0, epsilon = 1e-12);
    }

    #[test]
    fn inv_sqrt_recovers_inverse() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = inv_sqrt_spd(&m, 1e-12, 1e12).unwrap();
        let inv = &s * &s;
        let prod = &inv * &m;
        assert_abs_diff_eq!(prod[(0, 0)], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(prod[(0, 1)], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(prod[(1, 1)], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn inv_sqrt_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(inv_sqrt_spd(&m, 1e-12, 1e12).is_err());
    }

    #[test]
    fn eigen_sorted_descending() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 3.0]);
        let (vals, vecs) = sym_eigen_desc(&m);
        assert_eq!(vals.as_slice(), &[5.0, 3.0, 1.0]);
        assert_abs_diff_eq!(vecs[(1, 0)].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(sample_quantile(&v, 0.0), 1.0);
        assert_abs_diff_eq!(sample_quantile(&v, 1.0), 4.0);
        assert_abs_diff_eq!(sample_quantile(&v, 0.5), 2.5);
    }
}
