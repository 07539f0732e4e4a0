//! Seeded data generators for the simulation designs: the inverse
//! regression model under eight sampling cases, and four forward
//! regression examples with known monotone transforms.

mod marginals;

pub use marginals::{Marginal, MwDensity};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal, Uniform};

use crate::transforms::norm_cdf;
use crate::{linalg, Error, Result, SubspaceBasis};

/// Simulation scenario identifier with its scenario-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Signed-square power map of Gaussian scores.
    Case1,
    /// Skew-Laplace marginals via probability integral transform.
    Case2,
    /// Beta(3, 0.5) and unit-mean exponential marginals.
    Case3,
    /// Student t marginals with 2, 3 and 4 degrees of freedom.
    Case4,
    /// Marron-Wand outlier-density marginals.
    Case5,
    /// Standard Cauchy marginals.
    Case6,
    /// Multivariate t scores (normality of the scores violated).
    Case7 {
        df: u32,
    },
    /// Scores uniform on a scaled cube (normality seriously violated).
    Case8,
    Example1 {
        rho: f64,
    },
    Example2 {
        rho: f64,
    },
    Example3 {
        rho: f64,
    },
    Example4 {
        rho: f64,
    },
}

impl Scenario {
    pub const VALID_NAMES: &'static str =
        "case1, case2, case3, case4, case5, case6, case7, case8, example1, example2, example3, example4";

    /// Build a scenario from its name and the parameter flags that apply
    /// to it (`rho` for examples, `df` for case7).
    pub fn from_parts(name: &str, rho: f64, df: u32) -> Result<Self> {
        let scenario = match name.to_ascii_lowercase().as_str() {
            "case1" => Scenario::Case1,
            "case2" => Scenario::Case2,
            "case3" => Scenario::Case3,
            "case4" => Scenario::Case4,
            "case5" => Scenario::Case5,
            "case6" => Scenario::Case6,
            "case7" => Scenario::Case7 { df },
            "case8" => Scenario::Case8,
            "example1" => Scenario::Example1 { rho },
            "example2" => Scenario::Example2 { rho },
            "example3" => Scenario::Example3 { rho },
            "example4" => Scenario::Example4 { rho },
            other => {
                return Err(Error::UnknownScenario(
                    other.to_string(),
                    Self::VALID_NAMES.to_string(),
                ))
            }
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Scenario::Case7 { df } => {
                if ![5, 10, 20].contains(&df) {
                    return Err(Error::InvalidScenarioParameter(format!(
                        "case7 degrees of freedom must be 5, 10 or 20, got {df}"
                    )));
                }
            }
            Scenario::Example1 { rho }
            | Scenario::Example2 { rho }
            | Scenario::Example3 { rho }
            | Scenario::Example4 { rho } => {
                if !((rho - 0.0).abs() < 1e-12 || (rho - 0.5).abs() < 1e-12) {
                    return Err(Error::InvalidScenarioParameter(format!(
                        "rho must be 0 or 0.5, got {rho}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        match self {
            Scenario::Example1 { .. }
            | Scenario::Example2 { .. }
            | Scenario::Example3 { .. }
            | Scenario::Example4 { .. } => 6,
            _ => 10,
        }
    }

    pub fn is_example(&self) -> bool {
        self.p() == 6
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn rho_tag(rho: f64) -> String {
            if rho == 0.0 {
                "0".to_string()
            } else {
                format!("{rho}")
            }
        }
        match self {
            Scenario::Case1 => write!(f, "case1"),
            Scenario::Case2 => write!(f, "case2"),
            Scenario::Case3 => write!(f, "case3"),
            Scenario::Case4 => write!(f, "case4"),
            Scenario::Case5 => write!(f, "case5"),
            Scenario::Case6 => write!(f, "case6"),
            Scenario::Case7 { df } => write!(f, "case7-k{df}"),
            Scenario::Case8 => write!(f, "case8"),
            Scenario::Example1 { rho } => write!(f, "example1-rho{}", rho_tag(*rho)),
            Scenario::Example2 { rho } => write!(f, "example2-rho{}", rho_tag(*rho)),
            Scenario::Example3 { rho } => write!(f, "example3-rho{}", rho_tag(*rho)),
            Scenario::Example4 { rho } => write!(f, "example4-rho{}", rho_tag(*rho)),
        }
    }
}

/// A fully specified generator call: scenario, sample size, master seed
/// and replication index. Each replication draws from its own RNG
/// stream, so parallel sweeps reproduce serial ones.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    pub replication: u64,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, n: usize, seed: u64) -> Self {
        Self {
            scenario,
            n,
            seed,
            replication: 0,
        }
    }

    pub fn with_replication(mut self, replication: u64) -> Self {
        self.replication = replication;
        self
    }

    fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.n < 10 {
            return Err(Error::InvalidScenarioParameter(format!(
                "sample size must be at least 10, got {}",
                self.n
            )));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.replication);
        rng
    }
}

/// The strictly increasing map from a raw predictor to its score.
#[derive(Debug, Clone, Copy)]
pub enum TrueTransform {
    Identity,
    /// Inverse of x = sign(f) f^2.
    SignedSqrt,
    /// Normal score of a known marginal: f = Phi^{-1}(F(x)).
    NormalScore(Marginal),
    /// f = 2 exp(x/3).
    TwoExpThird,
    /// f = x^3 / 3.
    CubeThird,
    /// f = sign(x) x^2 / 2.
    SignedSquareHalf,
    /// f = 3 exp(2x) / {1 + exp(2x)}.
    Logistic3,
}

impl TrueTransform {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TrueTransform::Identity => x,
            TrueTransform::SignedSqrt => x.signum() * x.abs().sqrt(),
            TrueTransform::NormalScore(m) => crate::transforms::norm_quantile(m.cdf(x)),
            TrueTransform::TwoExpThird => 2.0 * (x / 3.0).exp(),
            TrueTransform::CubeThird => x.powi(3) / 3.0,
            TrueTransform::SignedSquareHalf => x.signum() * x * x / 2.0,
            TrueTransform::Logistic3 => 3.0 / (1.0 + (-2.0 * x).exp()),
        }
    }

    /// Population standard deviation of the transform of a standard
    /// normal variable (composite Simpson over [-12, 12]).
    pub fn normal_sd(&self) -> f64 {
        let steps = 4800;
        let (a, b) = (-12.0, 12.0);
        let h = (b - a) / steps as f64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for k in 0..=steps {
            let t = a + k as f64 * h;
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let g = self.eval(t) * crate::transforms::norm_pdf(t);
            m1 += w * g;
            m2 += w * g * self.eval(t);
        }
        m1 *= h / 3.0;
        m2 *= h / 3.0;
        (m2 - m1 * m1).sqrt()
    }
}

/// One generated dataset with everything needed to score an estimator.
#[derive(Debug, Clone)]
pub struct GeneratedData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// The true scores f(X), exactly as drawn by the generator.
    pub f: DMatrix<f64>,
    /// Basis of the central subspace in the transformed scale.
    pub true_basis: SubspaceBasis,
    pub true_d: usize,
    /// Basis of the central subspace of the raw regression of y on x.
    pub raw_basis: SubspaceBasis,
    pub raw_d: usize,
    pub transforms: Vec<TrueTransform>,
}

fn ar1(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = linalg::sym_eigen_desc(m);
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= values[j].max(0.0).sqrt();
    }
    scaled * vectors.transpose()
}

fn basis(p: usize, cols: &[Vec<f64>]) -> SubspaceBasis {
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    SubspaceBasis::from_columns(p, &refs).expect("scenario basis is full rank")
}

fn unit(p: usize, idx: usize) -> Vec<f64> {
    let mut v = vec![0.0; p];
    v[idx] = 1.0;
    v
}

/// Inverse regression response: the score pair (f1 + f2) damped by
/// (f3 + f4 + 1.5)^2 + 0.5, plus noise 0.5 eps.
fn model_response(f: &DMatrix<f64>, eps: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(f.nrows(), |i, _| {
        (f[(i, 0)] + f[(i, 1)]) / ((f[(i, 2)] + f[(i, 3)] + 1.5).powi(2) + 0.5) + 0.5 * eps[i]
    })
}

/// Generate one dataset for the given spec; identical specs yield
/// bit-identical data.
pub fn generate(spec: &ScenarioSpec) -> Result<GeneratedData> {
    spec.validate()?;
    let mut rng = spec.rng();
    let n = spec.n;
    let p = spec.scenario.p();
    let normal = Normal::new(0.0, 1.0).unwrap();

    match spec.scenario {
        Scenario::Case1
        | Scenario::Case2
        | Scenario::Case3
        | Scenario::Case4
        | Scenario::Case5
        | Scenario::Case6
        | Scenario::Case7 { .. }
        | Scenario::Case8 => {
            let sqrt_sigma = sym_sqrt(&ar1(p, 0.5));
            let mut f = DMatrix::zeros(n, p);
            match spec.scenario {
                Scenario::Case7 { df } => {
                    let chi = ChiSquared::new(df as f64).unwrap();
                    for i in 0..n {
                        let z = DVector::from_fn(p, |_, _| normal.sample(&mut rng));
                        let w: f64 = chi.sample(&mut rng);
                        let row = &sqrt_sigma * z / (w / df as f64).sqrt();
                        f.row_mut(i).copy_from(&row.transpose());
                    }
                }
                Scenario::Case8 => {
                    let cube = Uniform::new(-(3.0_f64.sqrt()), 3.0_f64.sqrt()).unwrap();
                    for i in 0..n {
                        let u = DVector::from_fn(p, |_, _| cube.sample(&mut rng));
                        let row = &sqrt_sigma * u;
                        f.row_mut(i).copy_from(&row.transpose());
                    }
                }
                _ => {
                    for i in 0..n {
                        let z = DVector::from_fn(p, |_, _| normal.sample(&mut rng));
                        let row = &sqrt_sigma * z;
                        f.row_mut(i).copy_from(&row.transpose());
                    }
                }
            }
            let eps = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
            let y = model_response(&f, &eps);

            let transforms: Vec<TrueTransform> = match spec.scenario {
                Scenario::Case1 => vec![TrueTransform::SignedSqrt; p],
                Scenario::Case2 => vec![TrueTransform::NormalScore(Marginal::SkewLaplace); p],
                Scenario::Case3 => (0..p)
                    .map(|j| {
                        TrueTransform::NormalScore(if j < 3 {
                            Marginal::Beta3Half
                        } else {
                            Marginal::ExponentialUnit
                        })
                    })
                    .collect(),
                Scenario::Case4 => (0..p)
                    .map(|j| {
                        let k = if j < 3 {
                            2.0
                        } else if j < 6 {
                            3.0
                        } else {
                            4.0
                        };
                        TrueTransform::NormalScore(Marginal::StudentT(k))
                    })
                    .collect(),
                Scenario::Case5 => {
                    vec![TrueTransform::NormalScore(Marginal::MarronWand(MwDensity::Outlier)); p]
                }
                Scenario::Case6 => vec![TrueTransform::NormalScore(Marginal::Cauchy); p],
                _ => vec![TrueTransform::Identity; p],
            };

            let x = match spec.scenario {
                Scenario::Case1 => DMatrix::from_fn(n, p, |i, j| {
                    let v = f[(i, j)];
                    v.signum() * v * v
                }),
                Scenario::Case7 { .. } | Scenario::Case8 => f.clone(),
                _ => {
                    let mut x = DMatrix::zeros(n, p);
                    for j in 0..p {
                        let marginal = match transforms[j] {
                            TrueTransform::NormalScore(m) => m,
                            _ => unreachable!(),
                        };
                        for i in 0..n {
                            x[(i, j)] = marginal.quantile(norm_cdf(f[(i, j)]))?;
                        }
                    }
                    x
                }
            };

            let mut eta1 = vec![0.0; p];
            eta1[0] = 1.0;
            eta1[1] = 1.0;
            let mut eta2 = vec![0.0; p];
            eta2[2] = 1.0;
            eta2[3] = 1.0;
            let true_basis = basis(p, &[eta1, eta2]);
            let (raw_basis, raw_d) = match spec.scenario {
                // x equals the scores here, so the raw subspace is the
                // transformed one
                Scenario::Case7 { .. } | Scenario::Case8 => (true_basis.clone(), 2),
                _ => (
                    basis(p, &[unit(p, 0), unit(p, 1), unit(p, 2), unit(p, 3)]),
                    4,
                ),
            };
            Ok(GeneratedData {
                x,
                y,
                f,
                true_basis,
                true_d: 2,
                raw_basis,
                raw_d,
                transforms,
            })
        }

        Scenario::Example1 { rho } => {
            let sqrt_sigma = sym_sqrt(&ar1(p, rho));
            let mut f = DMatrix::zeros(n, p);
            for i in 0..n {
                let z = DVector::from_fn(p, |_, _| normal.sample(&mut rng));
                let row = &sqrt_sigma * z;
                f.row_mut(i).copy_from(&row.transpose());
            }
            let eps = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
            let y = DVector::from_fn(n, |i, _| {
                ((f[(i, 0)] + f[(i, 1)]).powi(2) + 1.0).ln() * (f[(i, 2)] + f[(i, 3)])
                    + 0.5 * eps[i]
            });
            let mixtures = [
                MwDensity::SkewedUnimodal,
                MwDensity::StronglySkewed,
                MwDensity::KurtoticUnimodal,
                MwDensity::Bimodal,
            ];
            let transforms: Vec<TrueTransform> = (0..p)
                .map(|j| {
                    if j < 4 {
                        TrueTransform::NormalScore(Marginal::MarronWand(mixtures[j]))
                    } else {
                        TrueTransform::Identity
                    }
                })
                .collect();
            let mut x = DMatrix::zeros(n, p);
            for j in 0..p {
                match transforms[j] {
                    TrueTransform::NormalScore(m) => {
                        for i in 0..n {
                            x[(i, j)] = m.quantile(norm_cdf(f[(i, j)]))?;
                        }
                    }
                    _ => {
                        for i in 0..n {
                            x[(i, j)] = f[(i, j)];
                        }
                    }
                }
            }
            let true_basis = basis(
                p,
                &[
                    vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                    vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
                ],
            );
            let raw_basis = basis(p, &[unit(p, 0), unit(p, 1), unit(p, 2), unit(p, 3)]);
            Ok(GeneratedData {
                x,
                y,
                f,
                true_basis,
                true_d: 2,
                raw_basis,
                raw_d: 4,
                transforms,
            })
        }

        Scenario::Example2 { rho } | Scenario::Example3 { rho } | Scenario::Example4 { rho } => {
            let sqrt_sigma = sym_sqrt(&ar1(p, rho));
            let mut x = DMatrix::zeros(n, p);
            for i in 0..n {
                let z = DVector::from_fn(p, |_, _| normal.sample(&mut rng));
                let row = &sqrt_sigma * z;
                x.row_mut(i).copy_from(&row.transpose());
            }
            let eps = DVector::from_fn(n, |_, _| normal.sample(&mut rng));

            let (transforms, noise): (Vec<TrueTransform>, f64) = match spec.scenario {
                Scenario::Example2 { .. } => (
                    vec![
                        TrueTransform::TwoExpThird,
                        TrueTransform::Identity,
                        TrueTransform::CubeThird,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                    ],
                    0.5,
                ),
                Scenario::Example3 { .. } => (
                    vec![
                        TrueTransform::TwoExpThird,
                        TrueTransform::Identity,
                        TrueTransform::SignedSquareHalf,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                    ],
                    0.5,
                ),
                _ => (
                    vec![
                        TrueTransform::CubeThird,
                        TrueTransform::Identity,
                        TrueTransform::Logistic3,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                        TrueTransform::Identity,
                    ],
                    0.3,
                ),
            };
            let f = DMatrix::from_fn(n, p, |i, j| transforms[j].eval(x[(i, j)]));
            let y = match spec.scenario {
                Scenario::Example2 { .. } => DVector::from_fn(n, |i, _| {
                    f[(i, 0)]
                        + f[(i, 1)].powi(2)
                        + f[(i, 2)]
                        + f[(i, 3)]
                        + f[(i, 4)]
                        + noise * eps[i]
                }),
                Scenario::Example3 { .. } => DVector::from_fn(n, |i, _| {
                    (f[(i, 0)] + f[(i, 1)]) * (f[(i, 2)] + f[(i, 3)] + f[(i, 4)] + 1.0)
                        + noise * eps[i]
                }),
                _ => DVector::from_fn(n, |i, _| {
                    f[(i, 0)] + (f[(i, 1)] + f[(i, 2)]) * (f[(i, 3)] + f[(i, 4)]) + noise * eps[i]
                }),
            };

            let sd: Vec<f64> = transforms.iter().map(|t| t.normal_sd()).collect();
            let (true_basis, true_d) = match spec.scenario {
                Scenario::Example2 { .. } => (
                    basis(p, &[vec![sd[0], 0.0, sd[2], sd[3], sd[4], 0.0], unit(p, 1)]),
                    2,
                ),
                Scenario::Example3 { .. } => (
                    basis(
                        p,
                        &[
                            vec![sd[0], sd[1], 0.0, 0.0, 0.0, 0.0],
                            vec![0.0, 0.0, sd[2], sd[3], sd[4], 0.0],
                        ],
                    ),
                    2,
                ),
                _ => (
                    basis(
                        p,
                        &[
                            unit(p, 0),
                            vec![0.0, sd[1], sd[2], 0.0, 0.0, 0.0],
                            vec![0.0, 0.0, 0.0, sd[3], sd[4], 0.0],
                        ],
                    ),
                    3,
                ),
            };
            let raw_basis = basis(
                p,
                &[
                    unit(p, 0),
                    unit(p, 1),
                    unit(p, 2),
                    vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
                ],
            );
            Ok(GeneratedData {
                x,
                y,
                f,
                true_basis,
                true_d,
                raw_basis,
                raw_d: 4,
                transforms,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(scenario: Scenario, n: usize, seed: u64) -> ScenarioSpec {
        ScenarioSpec::new(scenario, n, seed)
    }

    #[test]
    fn reproducible_bit_for_bit() {
        for scenario in [
            Scenario::Case4,
            Scenario::Case7 { df: 10 },
            Scenario::Example2 { rho: 0.5 },
        ] {
            let a = generate(&spec(scenario, 50, 99)).unwrap();
            let b = generate(&spec(scenario, 50, 99)).unwrap();
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
            assert_eq!(a.f, b.f);
            let c = generate(&spec(scenario, 50, 99).with_replication(1)).unwrap();
            assert_ne!(a.x, c.x);
        }
    }

    #[test]
    fn case8_scores_have_unit_variance() {
        let data = generate(&spec(Scenario::Case8, 5000, 3)).unwrap();
        for j in 0..10 {
            let col: Vec<f64> = data.f.column(j).iter().copied().collect();
            let var = crate::linalg::variance_n(&col);
            assert!(
                (var - 1.0).abs() < 0.1,
                "column {j} variance {var} not near 1"
            );
        }
    }

    #[test]
    fn model_true_basis_matches_display() {
        let data = generate(&spec(Scenario::Case2, 20, 5)).unwrap();
        assert_eq!(data.true_d, 2);
        let cols = data.true_basis.columns();
        assert_eq!(cols.column(0).as_slice()[..4], [1.0, 1.0, 0.0, 0.0]);
        assert_eq!(cols.column(1).as_slice()[..4], [0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn example2_basis_uses_score_standard_deviations() {
        let data = generate(&spec(Scenario::Example2 { rho: 0.0 }, 20, 5)).unwrap();
        assert_eq!(data.true_d, 2);
        let cols = data.true_basis.columns();
        // closed forms: sd of 2 exp(X/3) and of X^3/3 under standard
        // normal X
        let sd1 = 2.0 * ((2.0_f64 / 9.0).exp() - (1.0_f64 / 9.0).exp()).sqrt();
        let sd3 = (5.0_f64 / 3.0).sqrt();
        assert_abs_diff_eq!(cols[(0, 0)], sd1, epsilon = 1e-6);
        assert_abs_diff_eq!(cols[(2, 0)], sd3, epsilon = 1e-6);
        assert_abs_diff_eq!(cols[(3, 0)], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(cols[(1, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pit_round_trip_recovers_scores() {
        for scenario in [
            Scenario::Case1,
            Scenario::Case2,
            Scenario::Case3,
            Scenario::Case4,
            Scenario::Case5,
            Scenario::Case6,
            Scenario::Example1 { rho: 0.0 },
        ] {
            let data = generate(&spec(scenario, 200, 17)).unwrap();
            for j in 0..data.x.ncols() {
                for i in 0..data.x.nrows() {
                    let recovered = data.transforms[j].eval(data.x[(i, j)]);
                    assert!(
                        (recovered - data.f[(i, j)]).abs() < 1e-8,
                        "{scenario:?} obs ({i},{j}): {recovered} vs {}",
                        data.f[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn true_transforms_strictly_increasing() {
        let data = generate(&spec(Scenario::Example4 { rho: 0.0 }, 30, 2)).unwrap();
        for tr in &data.transforms {
            let mut last = f64::NEG_INFINITY;
            for k in 0..200 {
                let t = -4.0 + 8.0 * k as f64 / 199.0;
                let v = tr.eval(t);
                assert!(v > last, "{tr:?} not increasing at {t}");
                last = v;
            }
        }
    }

    #[test]
    fn generated_marginals_pass_ks() {
        // Case 4 column 0 targets t with 2 degrees of freedom
        let data = generate(&spec(Scenario::Case4, 5000, 31)).unwrap();
        let marginal = Marginal::StudentT(2.0);
        let mut col: Vec<f64> = data.x.column(0).iter().copied().collect();
        col.sort_by(f64::total_cmp);
        let n = col.len();
        let mut d = 0.0_f64;
        for (k, v) in col.iter().enumerate() {
            let fv = marginal.cdf(*v);
            d = d.max((fv - k as f64 / n as f64).abs());
            d = d.max((fv - (k + 1) as f64 / n as f64).abs());
        }
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");

        // Example 1 column 2 targets the kurtotic unimodal mixture
        let data = generate(&spec(Scenario::Example1 { rho: 0.5 }, 5000, 31)).unwrap();
        let marginal = Marginal::MarronWand(MwDensity::KurtoticUnimodal);
        let mut col: Vec<f64> = data.x.column(2).iter().copied().collect();
        col.sort_by(f64::total_cmp);
        let mut d = 0.0_f64;
        for (k, v) in col.iter().enumerate() {
            let fv = marginal.cdf(*v);
            d = d.max((fv - k as f64 / n as f64).abs());
            d = d.max((fv - (k + 1) as f64 / n as f64).abs());
        }
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Scenario::from_parts("case9", 0.0, 10).is_err());
        assert!(Scenario::from_parts("case7", 0.0, 7).is_err());
        assert!(Scenario::from_parts("example2", 0.3, 10).is_err());
        assert!(generate(&spec(Scenario::Case1, 5, 1)).is_err());
    }

    #[test]
    fn scenario_display_round_trips() {
        let s = Scenario::from_parts("case7", 0.0, 20).unwrap();
        assert_eq!(s.to_string(), "case7-k20");
        let s = Scenario::from_parts("example3", 0.5, 10).unwrap();
        assert_eq!(s.to_string(), "example3-rho0.5");
    }
}
