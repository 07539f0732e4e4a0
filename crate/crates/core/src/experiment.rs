//! Replication harness shared by the CLI and the acceptance suite:
//! runs estimators over seeded replications of a scenario and
//! aggregates subspace accuracy and dimension-selection counts.

use rayon::prelude::*;

use crate::mave::{mave_fit, rss_dimension, tmave_fit, MaveOptions};
use crate::simulate::{generate, GeneratedData, ScenarioSpec};
use crate::sir::{bic_dimension, sequential_test, sir_fit};
use crate::transforms::{normal_scores, yeo_johnson_fit};
use crate::{linalg, metrics, Error, Result, SubspaceBasis};

use nalgebra::DMatrix;

/// The estimators compared in the simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// SIR on the raw predictors.
    Sir,
    /// SIR on the true scores (transforms known).
    FSir,
    /// SIR on normal scores of the rescaled empirical CDF.
    TSir,
    /// SIR after per-predictor Yeo-Johnson transforms.
    YjSir,
    /// Classical MAVE on the raw predictors.
    Mave,
    /// MAVE with jointly fitted monotone spline transforms.
    TMave,
}

impl Method {
    pub const VALID_NAMES: &'static str = "sir, f-sir, t-sir, yj-sir, mave, t-mave";

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "sir" => Ok(Method::Sir),
            "f-sir" | "fsir" => Ok(Method::FSir),
            "t-sir" | "tsir" => Ok(Method::TSir),
            "yj-sir" | "yjsir" => Ok(Method::YjSir),
            "mave" => Ok(Method::Mave),
            "t-mave" | "tmave" => Ok(Method::TMave),
            other => Err(Error::Config(format!(
                "unknown method `{other}`; valid: {}",
                Self::VALID_NAMES
            ))),
        }
    }

    pub fn is_sir_family(&self) -> bool {
        matches!(
            self,
            Method::Sir | Method::FSir | Method::TSir | Method::YjSir
        )
    }

    /// Whether the method works on the raw predictor scale, so its
    /// target is the raw central subspace.
    pub fn targets_raw_subspace(&self) -> bool {
        matches!(self, Method::Sir | Method::Mave)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::Sir => "sir",
            Method::FSir => "f-sir",
            Method::TSir => "t-sir",
            Method::YjSir => "yj-sir",
            Method::Mave => "mave",
            Method::TMave => "t-mave",
        };
        write!(f, "{name}")
    }
}

/// Penalty factor rule for the BIC-type criterion.
#[derive(Debug, Clone, Copy)]
pub enum KappaRule {
    LogN,
    Fixed(f64),
}

impl KappaRule {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            KappaRule::LogN => (n as f64).ln(),
            KappaRule::Fixed(v) => *v,
        }
    }
}

/// Method-specific settings for a sweep.
#[derive(Debug, Clone)]
pub struct MethodSettings {
    pub slices: usize,
    pub alpha: f64,
    pub kappa: KappaRule,
    pub lambda: f64,
    /// Run the dimension-selection criterion for MAVE-family methods
    /// (one extra fit per candidate dimension).
    pub select_dimension: bool,
    pub k_max: usize,
    pub mave: MaveOptions,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            slices: 10,
            alpha: 0.05,
            kappa: KappaRule::LogN,
            lambda: 0.001,
            select_dimension: false,
            k_max: 4,
            mave: MaveOptions::default(),
        }
    }
}

/// Accuracy and dimension decisions of one method on one replication.
#[derive(Debug, Clone, Copy)]
pub struct ReplicationOutcome {
    pub vcc: f64,
    pub tcc: f64,
    /// Sequential-test decision (SIR family only).
    pub dim_test: Option<usize>,
    /// BIC decision (SIR family) or RSS-criterion decision (MAVE
    /// family, when enabled).
    pub dim_ic: Option<usize>,
    /// The dimension the decisions are scored against.
    pub target_d: usize,
}

fn yeo_johnson_matrix(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = x.shape();
    let mut out = DMatrix::zeros(n, p);
    for j in 0..p {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        let fit = yeo_johnson_fit(&col).map_err(|e| match e {
            Error::DegenerateSample => Error::ConstantColumn(j),
            other => other,
        })?;
        for i in 0..n {
            out[(i, j)] = fit.apply(x[(i, j)]);
        }
    }
    Ok(out)
}

/// Run one method on one generated dataset.
pub fn score_method(
    data: &GeneratedData,
    method: Method,
    settings: &MethodSettings,
) -> Result<ReplicationOutcome> {
    let (truth, target_d): (&SubspaceBasis, usize) = if method.targets_raw_subspace() {
        (&data.raw_basis, data.raw_d)
    } else {
        (&data.true_basis, data.true_d)
    };

    if method.is_sir_family() {
        let predictors = match method {
            Method::Sir => data.x.clone(),
            Method::FSir => data.f.clone(),
            Method::TSir => normal_scores(&data.x)?,
            Method::YjSir => yeo_johnson_matrix(&data.x)?,
            _ => unreachable!(),
        };
        let fit = sir_fit(&predictors, &data.y, settings.slices)?;
        let est = fit.leading_basis(target_d)?;
        let vcc = metrics::vcc(&est, truth)?;
        let tcc = metrics::tcc(&est, truth)?;
        let dim_test = Some(sequential_test(&fit, settings.alpha));
        let dim_ic = Some(bic_dimension(&fit, settings.kappa.value(data.x.nrows()))?);
        Ok(ReplicationOutcome {
            vcc,
            tcc,
            dim_test,
            dim_ic,
            target_d,
        })
    } else {
        let lambda = match method {
            Method::TMave => Some(settings.lambda),
            _ => None,
        };
        let fit = match lambda {
            Some(l) => tmave_fit(&data.x, &data.y, target_d, l, &settings.mave)?,
            None => mave_fit(&data.x, &data.y, target_d, &settings.mave)?,
        };
        let est = fit.basis()?;
        let vcc = metrics::vcc(&est, truth)?;
        let tcc = metrics::tcc(&est, truth)?;
        let dim_ic = if settings.select_dimension {
            Some(rss_dimension(&data.x, &data.y, lambda, settings.k_max, &settings.mave)?.k)
        } else {
            None
        };
        Ok(ReplicationOutcome {
            vcc,
            tcc,
            dim_test: None,
            dim_ic,
            target_d,
        })
    }
}

/// Run one replication end to end: generate, fit, score.
pub fn run_replication(
    spec: &ScenarioSpec,
    method: Method,
    settings: &MethodSettings,
) -> Result<ReplicationOutcome> {
    let data = generate(spec)?;
    score_method(&data, method, settings)
}

/// Aggregated results of one (scenario, method, n) cell.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub scenario: String,
    pub method: String,
    pub n: usize,
    pub replications: usize,
    pub vcc_mean: f64,
    pub vcc_sd: f64,
    pub tcc_mean: f64,
    pub tcc_sd: f64,
    /// Sequential-test counts (below, at, above the target dimension).
    pub test_counts: Option<[usize; 3]>,
    /// Information-criterion counts (BIC or RSS criterion).
    pub ic_counts: Option<[usize; 3]>,
}

fn summarize(
    scenario: String,
    method: Method,
    n: usize,
    outcomes: &[ReplicationOutcome],
) -> MethodSummary {
    let vccs: Vec<f64> = outcomes.iter().map(|o| o.vcc).collect();
    let tccs: Vec<f64> = outcomes.iter().map(|o| o.tcc).collect();
    let count3 = |pick: &dyn Fn(&ReplicationOutcome) -> Option<usize>| -> Option<[usize; 3]> {
        let mut counts = [0usize; 3];
        let mut any = false;
        for o in outcomes {
            if let Some(d) = pick(o) {
                any = true;
                let slot = match d.cmp(&o.target_d) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => 2,
                };
                counts[slot] += 1;
            }
        }
        any.then_some(counts)
    };
    MethodSummary {
        scenario,
        method: method.to_string(),
        n,
        replications: outcomes.len(),
        vcc_mean: linalg::mean(&vccs),
        vcc_sd: linalg::variance_n(&vccs).sqrt(),
        tcc_mean: linalg::mean(&tccs),
        tcc_sd: linalg::variance_n(&tccs).sqrt(),
        test_counts: count3(&|o| o.dim_test),
        ic_counts: count3(&|o| o.dim_ic),
    }
}

/// Run `replications` seeded replications of one method and aggregate.
/// Replication r draws from RNG stream r of the master seed, so results
/// do not depend on `threads` (0 = rayon default pool).
pub fn run_experiment(
    base: &ScenarioSpec,
    method: Method,
    settings: &MethodSettings,
    replications: usize,
    threads: usize,
) -> Result<MethodSummary> {
    let specs: Vec<ScenarioSpec> = (0..replications)
        .map(|r| base.with_replication(r as u64))
        .collect();
    let outcomes: Result<Vec<ReplicationOutcome>> = if threads == 1 {
        specs
            .iter()
            .map(|s| run_replication(s, method, settings))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| {
            specs
                .par_iter()
                .map(|s| run_replication(s, method, settings))
                .collect()
        })
    };
    Ok(summarize(
        base.scenario.to_string(),
        method,
        base.n,
        &outcomes?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::Scenario;

    #[test]
    fn parallel_and_serial_aggregates_match() {
        let spec = ScenarioSpec::new(Scenario::Case1, 100, 7);
        let settings = MethodSettings::default();
        let serial = run_experiment(&spec, Method::TSir, &settings, 6, 1).unwrap();
        let parallel = run_experiment(&spec, Method::TSir, &settings, 6, 2).unwrap();
        assert_eq!(serial.vcc_mean.to_bits(), parallel.vcc_mean.to_bits());
        assert_eq!(serial.tcc_sd.to_bits(), parallel.tcc_sd.to_bits());
        assert_eq!(serial.test_counts, parallel.test_counts);

        // same guarantee on the iterative fitting path
        let spec = ScenarioSpec::new(Scenario::Example2 { rho: 0.0 }, 60, 7);
        let serial = run_experiment(&spec, Method::TMave, &settings, 2, 1).unwrap();
        let parallel = run_experiment(&spec, Method::TMave, &settings, 2, 2).unwrap();
        assert_eq!(serial.vcc_mean.to_bits(), parallel.vcc_mean.to_bits());
        assert_eq!(serial.tcc_mean.to_bits(), parallel.tcc_mean.to_bits());
    }

    #[test]
    fn method_parsing() {
        assert_eq!(Method::parse("T-SIR").unwrap(), Method::TSir);
        assert_eq!(Method::parse("yjsir").unwrap(), Method::YjSir);
        assert!(Method::parse("pca").is_err());
    }
}
