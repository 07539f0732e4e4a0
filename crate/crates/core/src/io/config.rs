//! Experiment configuration: strict TOML (key = value with per-method
//! sections); unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::experiment::{KappaRule, Method, MethodSettings};
use crate::mave::MaveOptions;
use crate::simulate::Scenario;
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Predictor correlation, examples only.
    #[serde(default)]
    pub rho: Option<f64>,
    /// Degrees of freedom, case7 only.
    #[serde(default)]
    pub df: Option<u32>,
    #[serde(default)]
    pub sir: Option<SirSection>,
    #[serde(default)]
    pub mave: Option<MaveSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirSection {
    #[serde(default)]
    pub slices: Option<usize>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub kappa: Option<KappaSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaveSection {
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub select_dimension: Option<bool>,
    #[serde(default)]
    pub bandwidth_scale: Option<f64>,
    #[serde(default)]
    pub spline_m: Option<usize>,
    #[serde(default)]
    pub spline_degree: Option<usize>,
}

/// Either the literal string "log-n" or a fixed numeric penalty factor.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Name(String),
    Value(f64),
}

impl KappaSpec {
    fn to_rule(&self) -> Result<KappaRule> {
        match self {
            KappaSpec::Name(s) if s == "log-n" => Ok(KappaRule::LogN),
            KappaSpec::Name(s) => Err(Error::Config(format!(
                "kappa must be \"log-n\" or a number, got `{s}`"
            ))),
            KappaSpec::Value(v) => Ok(KappaRule::Fixed(*v)),
        }
    }
}

/// A validated experiment ready to run.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub settings: MethodSettings,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Validate and resolve into a runnable plan.
    pub fn resolve(&self) -> Result<ExperimentPlan> {
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        let scenario = Scenario::from_parts(
            &self.scenario,
            self.rho.unwrap_or(0.0),
            self.df.unwrap_or(10),
        )?;
        let methods: Vec<Method> = self
            .methods
            .iter()
            .map(|m| Method::parse(m))
            .collect::<Result<_>>()?;
        if methods.is_empty() {
            return Err(Error::Config("methods list is empty".into()));
        }
        if methods.iter().any(|m| m.is_sir_family()) && self.sir.is_none() {
            return Err(Error::Config(
                "a SIR-family method is requested but the [sir] section is missing".into(),
            ));
        }
        if methods.iter().any(|m| !m.is_sir_family()) && self.mave.is_none() {
            return Err(Error::Config(
                "a MAVE-family method is requested but the [mave] section is missing".into(),
            ));
        }

        let mut settings = MethodSettings::default();
        if let Some(sir) = &self.sir {
            if let Some(slices) = sir.slices {
                if slices < 2 {
                    return Err(Error::Config("slices must be at least 2".into()));
                }
                settings.slices = slices;
            }
            if let Some(alpha) = sir.alpha {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Config("alpha must lie in (0, 1)".into()));
                }
                settings.alpha = alpha;
            }
            if let Some(kappa) = &sir.kappa {
                settings.kappa = kappa.to_rule()?;
            }
        }
        if let Some(mave) = &self.mave {
            if let Some(lambda) = mave.lambda {
                if lambda < 0.0 {
                    return Err(Error::Config("lambda must be nonnegative".into()));
                }
                settings.lambda = lambda;
            }
            if let Some(k_max) = mave.k_max {
                settings.k_max = k_max;
            }
            if let Some(sel) = mave.select_dimension {
                settings.select_dimension = sel;
            }
            let mut mave_opts = MaveOptions::default();
            if let Some(c) = mave.bandwidth_scale {
                mave_opts.bandwidth_scale = c;
            }
            if let Some(m) = mave.spline_m {
                mave_opts.spline_m = m;
            }
            if let Some(deg) = mave.spline_degree {
                mave_opts.spline_degree = deg;
            }
            settings.mave = mave_opts;
        }

        Ok(ExperimentPlan {
            scenario,
            n: self.n,
            replications: self.replications,
            seed: self.seed,
            methods,
            settings,
            out: self.out.clone(),
            threads: self.threads.unwrap_or(1),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
scenario = "case4"
n = 400
replications = 50
seed = 7
methods = ["sir", "t-sir"]
out = "results"

[sir]
slices = 10
alpha = 0.05
kappa = "log-n"
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ExperimentConfig::from_toml_str(GOOD).unwrap();
        let plan = cfg.resolve().unwrap();
        assert_eq!(plan.methods, vec![Method::Sir, Method::TSir]);
        assert_eq!(plan.n, 400);
        assert_eq!(plan.settings.slices, 10);
        assert!(matches!(plan.settings.kappa, KappaRule::LogN));
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = GOOD.replace("slices = 10", "slices = 10\nsliczes = 4");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad_top = GOOD.replace("seed = 7", "seed = 7\nseeed = 9");
        assert!(ExperimentConfig::from_toml_str(&bad_top).is_err());
    }

    #[test]
    fn requires_section_for_requested_family() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
scenario = "example2"
n = 200
replications = 5
seed = 1
methods = ["t-mave"]
"#,
        )
        .unwrap();
        match cfg.resolve() {
            Err(Error::Config(msg)) => assert!(msg.contains("[mave]"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn numeric_kappa_and_example_rho() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
scenario = "example3"
rho = 0.5
n = 200
replications = 2
seed = 3
methods = ["t-mave", "mave"]

[mave]
lambda = 0.01
k_max = 3
select_dimension = true
"#,
        )
        .unwrap();
        let plan = cfg.resolve().unwrap();
        assert_eq!(plan.scenario.to_string(), "example3-rho0.5");
        assert_eq!(plan.settings.lambda, 0.01);
        assert!(plan.settings.select_dimension);

        let cfg = ExperimentConfig::from_toml_str(
            r#"
scenario = "case1"
n = 100
replications = 2
seed = 3
methods = ["sir"]

[sir]
kappa = 2.5
"#,
        )
        .unwrap();
        let plan = cfg.resolve().unwrap();
        assert!(matches!(plan.settings.kappa, KappaRule::Fixed(v) if v == 2.5));
    }
}
