//! The `plotdata` subcommand: pair each extracted predictor with the
//! response and a cross-validated smoothing-spline curve on a
//! 200-point grid, as plain CSV for any plotting tool.

use std::io::Write as _;
use std::path::Path;

use tsdr_core::smooth::SmoothingSpline;
use tsdr_core::{Error, Result};

use crate::analyze::AnalyzeManifest;
use crate::PlotdataArgs;

const GRID_POINTS: usize = 200;

fn read_column_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let width = reader.headers()?.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    for record in reader.records() {
        let record = record?;
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::ParseError(format!("bad numeric cell `{cell}`")))?;
            columns[j].push(v);
        }
    }
    Ok(columns)
}

pub fn run(args: PlotdataArgs) -> Result<()> {
    let from = &args.from;
    let manifest_path = from.join("analyze.toml");
    if !manifest_path.exists() {
        return Err(Error::MissingArtifacts(format!(
            "{} (run `tsdr analyze` first)",
            manifest_path.display()
        )));
    }
    let manifest: AnalyzeManifest = toml::from_str(&std::fs::read_to_string(&manifest_path)?)
        .map_err(|e| Error::Config(e.to_string()))?;
    let extracted = read_column_file(&from.join("extracted.csv"))?;
    let response = read_column_file(&from.join("response.csv"))?
        .pop()
        .ok_or_else(|| Error::MissingArtifacts("response.csv is empty".into()))?;
    if extracted.len() != manifest.dimension {
        return Err(Error::MissingArtifacts(format!(
            "extracted.csv has {} columns, manifest says {}",
            extracted.len(),
            manifest.dimension
        )));
    }

    let out = args.out.clone().unwrap_or_else(|| from.clone());
    std::fs::create_dir_all(&out)?;
    for (j, predictor) in extracted.iter().enumerate() {
        let spline = SmoothingSpline::fit(predictor, &response)?;
        let (lo, hi) = predictor
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let path = out.join(format!("plot_{}.csv", j + 1));
        let mut file = std::fs::File::create(&path)?;
        writeln!(file, "predictor,response,grid,curve")?;
        let rows = predictor.len().max(GRID_POINTS);
        for i in 0..rows {
            let data_part = if i < predictor.len() {
                format!("{:.10},{:.10}", predictor[i], response[i])
            } else {
                ",".to_string()
            };
            let curve_part = if i < GRID_POINTS {
                let t = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
                format!("{:.10},{:.10}", t, spline.eval(t))
            } else {
                ",".to_string()
            };
            writeln!(file, "{data_part},{curve_part}")?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}
