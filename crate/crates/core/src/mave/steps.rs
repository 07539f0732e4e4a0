//! The alternation steps shared by classical and transformed MAVE:
//! kernel weights, per-anchor local linear fits, and the vectorized
//! weighted least-squares subspace update.

use nalgebra::{DMatrix, DVector};

use crate::{linalg, Error, Result};

/// Relative kernel cutoff: unnormalized weights below this are exact
/// zeros, so pruned pairs are skipped consistently everywhere.
pub const WEIGHT_PRUNE: f64 = 1e-12;

/// Gaussian product-kernel weights on the rows of `proj` (one row per
/// observation), column-normalized per anchor: w[(i, j)] weights
/// observation i in the fit anchored at j. Each column sums to one.
///
/// Bandwidths are per coordinate: h_r = sd_r * rule, the sd taken over
/// the current projected sample.
pub fn kernel_weights(proj: &DMatrix<f64>, rule: f64) -> DMatrix<f64> {
    let (n, d) = proj.shape();
    let mut inv_h2 = vec![0.0; d];
    for r in 0..d {
        let col: Vec<f64> = proj.column(r).iter().copied().collect();
        let sd = linalg::variance_n(&col).sqrt();
        let h = (sd * rule).max(1e-12);
        inv_h2[r] = 1.0 / (h * h);
    }
    let mut w = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut sum = 0.0;
        for i in 0..n {
            let mut q = 0.0;
            for r in 0..d {
                let diff = proj[(i, r)] - proj[(j, r)];
                q += diff * diff * inv_h2[r];
            }
            let k = (-0.5 * q).exp();
            let k = if k < WEIGHT_PRUNE { 0.0 } else { k };
            w[(i, j)] = k;
            sum += k;
        }
        for i in 0..n {
            w[(i, j)] /= sum;
        }
    }
    w
}

/// Local linear fits anchored at every observation: for each j solve
/// the weighted normal equations of y_i on (1, u_i - u_j), returning
/// intercepts a and slopes (one row per anchor).
pub fn update_local(
    proj: &DMatrix<f64>,
    y: &DVector<f64>,
    weights: &DMatrix<f64>,
    ridge: f64,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let (n, d) = proj.shape();
    let mut a = DVector::zeros(n);
    let mut slopes = DMatrix::zeros(n, d);
    let mut design = DVector::zeros(d + 1);
    for j in 0..n {
        let mut m = DMatrix::zeros(d + 1, d + 1);
        let mut rhs = DVector::zeros(d + 1);
        for i in 0..n {
            let w = weights[(i, j)];
            if w == 0.0 {
                continue;
            }
            design[0] = 1.0;
            for r in 0..d {
                design[r + 1] = proj[(i, r)] - proj[(j, r)];
            }
            m.syger(w, &design, &design, 1.0);
            rhs.axpy(w * y[i], &design, 1.0);
        }
        for c in 0..=d {
            for r in (c + 1)..=d {
                m[(c, r)] = m[(r, c)];
            }
        }
        let sol = linalg::solve_sym_ridge(&m, &rhs, ridge).ok_or(Error::SingularLocalFit(j))?;
        a[j] = sol[0];
        for r in 0..d {
            slopes[(j, r)] = sol[r + 1];
        }
    }
    Ok((a, slopes))
}

/// Full-dimensional local linear fits (slopes over all p predictors),
/// used to seed the subspace by the outer product of gradients.
pub fn opg_direction(
    f_work: &DMatrix<f64>,
    y: &DVector<f64>,
    weights: &DMatrix<f64>,
    d: usize,
    ridge: f64,
) -> Result<DMatrix<f64>> {
    let (n, p) = f_work.shape();
    let (_, gradients) = update_local(f_work, y, weights, ridge)?;
    let mut avg = DMatrix::zeros(p, p);
    for j in 0..n {
        let g = gradients.row(j).transpose();
        avg.syger(1.0 / n as f64, &g, &g, 1.0);
    }
    for c in 0..p {
        for r in (c + 1)..p {
            avg[(c, r)] = avg[(r, c)];
        }
    }
    let (_, vectors) = linalg::sym_eigen_desc(&avg);
    Ok(vectors.columns(0, d).into_owned())
}

/// Solve the vectorized weighted normal equations for the subspace
/// matrix: the Kronecker-structured system with regressors
/// (delta_f x b_j) and responses (y_i - a_j). Returns the raw p x d
/// solution, not yet orthonormalized.
pub fn solve_subspace(
    f_work: &DMatrix<f64>,
    y: &DVector<f64>,
    a: &DVector<f64>,
    slopes: &DMatrix<f64>,
    weights: &DMatrix<f64>,
    ridge: f64,
) -> Result<DMatrix<f64>> {
    let (n, p) = f_work.shape();
    let d = slopes.ncols();
    let dim = p * d;
    let mut gram = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    let mut s_j = DMatrix::zeros(p, p);
    let mut v_j = DVector::zeros(p);
    let mut delta = DVector::zeros(p);
    for j in 0..n {
        s_j.fill(0.0);
        v_j.fill(0.0);
        for i in 0..n {
            let w = weights[(i, j)];
            if w == 0.0 {
                continue;
            }
            for k in 0..p {
                delta[k] = f_work[(i, k)] - f_work[(j, k)];
            }
            s_j.syger(w, &delta, &delta, 1.0);
            v_j.axpy(w * (y[i] - a[j]), &delta, 1.0);
        }
        for c in 0..p {
            for r in (c + 1)..p {
                s_j[(c, r)] = s_j[(r, c)];
            }
        }
        let b_j = slopes.row(j);
        // gram += s_j kron (b_j b_j^T); rhs += v_j kron b_j
        for k1 in 0..p {
            for k2 in 0..p {
                let s = s_j[(k1, k2)];
                if s == 0.0 {
                    continue;
                }
                for r1 in 0..d {
                    let base = s * b_j[r1];
                    for r2 in 0..d {
                        gram[(k1 * d + r1, k2 * d + r2)] += base * b_j[r2];
                    }
                }
            }
            for r1 in 0..d {
                rhs[k1 * d + r1] += v_j[k1] * b_j[r1];
            }
        }
    }
    let sol = linalg::solve_sym_ridge(&gram, &rhs, ridge).ok_or(Error::SingularNormalEquations)?;
    Ok(DMatrix::from_fn(p, d, |k, r| sol[k * d + r]))
}

/// Subspace update with re-orthonormalized output.
pub fn update_b(
    f_work: &DMatrix<f64>,
    y: &DVector<f64>,
    a: &DVector<f64>,
    slopes: &DMatrix<f64>,
    weights: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let raw = solve_subspace(f_work, y, a, slopes, weights, 1e-8)?;
    Ok(linalg::orthonormalize(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, p, |_, _| rng.random_range(-2.0..2.0))
    }

    #[test]
    fn weight_columns_sum_to_one() {
        let proj = random_matrix(40, 2, 8);
        let w = kernel_weights(&proj, 0.5);
        for j in 0..40 {
            let sum: f64 = w.column(j).iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_response_gives_flat_local_fits() {
        let proj = random_matrix(30, 2, 9);
        let w = kernel_weights(&proj, 0.6);
        let y = DVector::from_element(30, 4.2);
        let (a, slopes) = update_local(&proj, &y, &w, 1e-8).unwrap();
        for j in 0..30 {
            assert_abs_diff_eq!(a[j], 4.2, epsilon = 1e-9);
            assert_abs_diff_eq!(slopes.row(j).norm(), 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn local_fit_matches_three_point_hand_solution() {
        // anchor 0 with three neighbors on a line, hand-computed
        // weighted simple regression
        let proj = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 2.0]);
        let y = DVector::from_column_slice(&[1.0, 2.0, 5.0]);
        let mut w = DMatrix::from_element(3, 3, 1.0 / 3.0);
        // column 0: weights 0.5, 0.3, 0.2
        w[(0, 0)] = 0.5;
        w[(1, 0)] = 0.3;
        w[(2, 0)] = 0.2;
        let (a, slopes) = update_local(&proj, &y, &w, 0.0).unwrap();
        // weighted least squares on deltas 0,1,2:
        // sums: Sw=1, Swx=0.7, Swxx=1.1, Swy=2.1, Swxy=2.6
        // slope = (1*2.6 - 0.7*2.1)/(1*1.1 - 0.49) = 1.13/0.61
        // intercept = 2.1 - slope*0.7
        let slope = 1.13 / 0.61;
        assert_abs_diff_eq!(slopes[(0, 0)], slope, epsilon = 1e-10);
        assert_abs_diff_eq!(a[0], 2.1 - slope * 0.7, epsilon = 1e-10);
    }

    #[test]
    fn subspace_update_reduces_to_ols_with_unit_slopes() {
        // d = 1, b_j = 1, uniform weights: the normal equations are OLS
        // of (y_i - a_j) on the predictor differences
        let n = 25;
        let f = random_matrix(n, 3, 10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let y = DVector::from_fn(n, |i, _| {
            2.0 * f[(i, 0)] - f[(i, 2)] + 0.01 * rng.random_range(-1.0..1.0)
        });
        let a = DVector::zeros(n);
        let slopes = DMatrix::from_element(n, 1, 1.0);
        let w = DMatrix::from_element(n, n, 1.0 / n as f64);

        let raw = solve_subspace(&f, &y, &a, &slopes, &w, 0.0).unwrap();

        // OLS oracle on the n^2 stacked differences
        let mut xtx = DMatrix::zeros(3, 3);
        let mut xty = DVector::zeros(3);
        for j in 0..n {
            for i in 0..n {
                let delta = DVector::from_fn(3, |k, _| f[(i, k)] - f[(j, k)]);
                xtx.syger(1.0 / (n * n) as f64, &delta, &delta, 1.0);
                xty.axpy(y[i] / (n * n) as f64, &delta, 1.0);
            }
        }
        for c in 0..3 {
            for r in (c + 1)..3 {
                xtx[(c, r)] = xtx[(r, c)];
            }
        }
        let oracle = xtx.lu().solve(&xty).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(raw[(k, 0)], oracle[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn exact_low_rank_model_recovered() {
        // piecewise-linear response in the planted projections, with
        // weights confined to each piece: zero-residual least squares
        // must return exactly the planted span
        let n = 40;
        let half = n / 2;
        let f = random_matrix(n, 4, 12);
        let b0 = linalg::orthonormalize(&random_matrix(4, 2, 13));
        let u = &f * &b0;
        let betas = [
            DVector::from_column_slice(&[1.4, -0.8]),
            DVector::from_column_slice(&[0.3, 2.1]),
        ];
        let group = |i: usize| usize::from(i >= half);
        let y = DVector::from_fn(n, |i, _| u.row(i).transpose().dot(&betas[group(i)]));
        let a_true = y.clone();
        let slopes_true = DMatrix::from_fn(n, 2, |j, r| betas[group(j)][r]);
        let w = DMatrix::from_fn(n, n, |i, j| {
            if group(i) == group(j) {
                1.0 / half as f64
            } else {
                0.0
            }
        });
        let b = update_b(&f, &y, &a_true, &slopes_true, &w).unwrap();
        assert_abs_diff_eq!(
            (b.transpose() * &b - DMatrix::identity(2, 2)).norm(),
            0.0,
            epsilon = 1e-10
        );
        let est = crate::SubspaceBasis::new(b).unwrap();
        let truth = crate::SubspaceBasis::new(b0).unwrap();
        assert!(crate::vcc(&est, &truth).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn orthonormal_output_for_random_inputs() {
        let n = 30;
        let f = random_matrix(n, 5, 20);
        let y = DVector::from_fn(n, |i, _| f[(i, 0)] + 0.1 * f[(i, 1)]);
        let w = kernel_weights(&f, 0.8);
        let (a, _) = update_local(&f, &y, &w, 1e-8).unwrap();
        let slopes = random_matrix(n, 2, 21);
        let b = update_b(&f, &y, &a, &slopes, &w).unwrap();
        let gram = b.transpose() * &b;
        assert_abs_diff_eq!(
            (gram - DMatrix::identity(2, 2)).norm(),
            0.0,
            epsilon = 1e-10
        );
    }
}
