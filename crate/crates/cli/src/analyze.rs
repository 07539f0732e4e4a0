//! The `analyze` subcommand: estimate the structural dimension of a
//! CSV dataset, print the leading directions, and write per-observation
//! extracted predictors for plotting.

use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use tsdr_core::experiment::Method;
use tsdr_core::io::load_csv;
use tsdr_core::mave::{mave_fit, rss_dimension, tmave_fit, MaveOptions};
use tsdr_core::sir::{bic_dimension, sequential_test, sir_fit};
use tsdr_core::transforms::{normal_scores, yeo_johnson_fit};
use tsdr_core::{Error, Result};

use crate::AnalyzeArgs;

/// Metadata linking an analyze run to its plot-data inputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeManifest {
    pub method: String,
    pub response: String,
    pub dimension: usize,
    pub n: usize,
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let method = Method::parse(&args.method)?;
    if method == Method::FSir {
        return Err(Error::Config(
            "f-sir needs the true transforms and applies to simulated data only".into(),
        ));
    }
    let data = load_csv(&args.data, &args.response)?;
    println!(
        "dataset: {} observations, {} predictors ({})",
        data.n(),
        data.p(),
        data.predictor_names.join(", ")
    );

    let (dimension, extracted, report) = match method {
        Method::Sir | Method::TSir | Method::YjSir => {
            let predictors = match method {
                Method::Sir => data.x.clone(),
                Method::TSir => normal_scores(&data.x)?,
                Method::YjSir => {
                    let mut out = data.x.clone();
                    for j in 0..data.p() {
                        let col: Vec<f64> = data.x.column(j).iter().copied().collect();
                        let fit = yeo_johnson_fit(&col)?;
                        for i in 0..data.n() {
                            out[(i, j)] = fit.apply(data.x[(i, j)]);
                        }
                        println!(
                            "  yeo-johnson exponent for {}: {:.4}",
                            data.predictor_names[j], fit.lambda
                        );
                    }
                    out
                }
                _ => unreachable!(),
            };
            let fit = sir_fit(&predictors, &data.y, args.slices)?;
            let d_test = sequential_test(&fit, args.alpha);
            let kappa = (data.n() as f64).ln();
            let d_bic = bic_dimension(&fit, kappa)?;
            println!(
                "estimated dimension: {} (sequential test, alpha = {}), {} (BIC-type criterion)",
                d_test, args.alpha, d_bic
            );
            let d = d_bic.max(1);
            let mut report = String::new();
            for j in 0..d {
                let dir = fit.directions.column(j);
                let terms: Vec<String> = data
                    .predictor_names
                    .iter()
                    .zip(dir.iter())
                    .map(|(name, v)| format!("{v:+.4} {name}"))
                    .collect();
                report.push_str(&format!("direction {}: {}\n", j + 1, terms.join(" ")));
            }
            let extracted = &predictors * fit.directions.columns(0, d).into_owned();
            (d, extracted, report)
        }
        Method::Mave | Method::TMave => {
            let lambda = (method == Method::TMave).then_some(args.lambda);
            let k_max = args.k_max.unwrap_or_else(|| data.p().min(4));
            let opts = MaveOptions::default();
            let selection = rss_dimension(&data.x, &data.y, lambda, k_max, &opts)?;
            for (k, eval) in selection.evaluations.iter().enumerate() {
                match eval {
                    Some(e) => println!(
                        "  k = {}: rss {:.6}, criterion {:.6}",
                        k + 1,
                        e.rss,
                        e.criterion
                    ),
                    None => eprintln!("warning: fit at k = {} failed; skipped", k + 1),
                }
            }
            println!("estimated dimension: {} (RSS criterion)", selection.k);
            let d = selection.k;
            let fit = match lambda {
                Some(l) => tmave_fit(&data.x, &data.y, d, l, &opts)?,
                None => mave_fit(&data.x, &data.y, d, &opts)?,
            };
            let mut report = String::new();
            for j in 0..d {
                let dir = fit.b.column(j);
                let terms: Vec<String> = data
                    .predictor_names
                    .iter()
                    .zip(dir.iter())
                    .map(|(name, v)| format!("{v:+.4} {name}"))
                    .collect();
                report.push_str(&format!("direction {}: {}\n", j + 1, terms.join(" ")));
            }
            let mut extracted = DMatrix::zeros(data.n(), d);
            for i in 0..data.n() {
                let raw: Vec<f64> = data.x.row(i).iter().copied().collect();
                let proj = fit.project_row(&raw);
                for j in 0..d {
                    extracted[(i, j)] = proj[j];
                }
            }
            (d, extracted, report)
        }
        Method::FSir => unreachable!(),
    };

    print!("{report}");
    write_artifacts(&args.out, &args, method, dimension, &extracted, &data.y)?;
    Ok(())
}

fn write_artifacts(
    out: &Path,
    args: &AnalyzeArgs,
    method: Method,
    dimension: usize,
    extracted: &DMatrix<f64>,
    y: &nalgebra::DVector<f64>,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let n = extracted.nrows();

    let mut file = std::fs::File::create(out.join("extracted.csv"))?;
    let header: Vec<String> = (1..=dimension).map(|j| format!("dir{j}")).collect();
    writeln!(file, "{}", header.join(","))?;
    for i in 0..n {
        let row: Vec<String> = (0..dimension)
            .map(|j| format!("{:.10}", extracted[(i, j)]))
            .collect();
        writeln!(file, "{}", row.join(","))?;
    }

    let mut file = std::fs::File::create(out.join("response.csv"))?;
    writeln!(file, "{}", args.response)?;
    for i in 0..n {
        writeln!(file, "{:.10}", y[i])?;
    }

    let manifest = AnalyzeManifest {
        method: method.to_string(),
        response: args.response.clone(),
        dimension,
        n,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(out.join("analyze.toml"), text)?;
    println!("wrote {}", out.join("extracted.csv").display());
    Ok(())
}
