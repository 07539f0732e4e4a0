//! Dataset ingestion, experiment configuration, results persistence.

mod config;

pub use config::{ExperimentConfig, ExperimentPlan};

use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::{DataSet, Error, Result};

/// Load a rectangular numeric CSV with a header row; the named column
/// becomes the response, every other column a predictor.
pub fn load_csv(path: &Path, response: &str) -> Result<DataSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let response_idx = headers.iter().position(|h| h == response).ok_or_else(|| {
        Error::ParseError(format!(
            "response column `{response}` not found; columns: {}",
            headers.join(", ")
        ))
    })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::ParseError(format!(
                "row {} has {} cells, expected {}",
                row_idx + 1,
                record.len(),
                headers.len()
            )));
        }
        let mut row = Vec::with_capacity(headers.len());
        for (col_idx, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                row: row_idx + 1,
                column: headers[col_idx].clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonNumericCell {
                    row: row_idx + 1,
                    column: headers[col_idx].clone(),
                    value: cell.to_string(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ParseError("no data rows".to_string()));
    }

    let n = rows.len();
    let p = headers.len() - 1;
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let predictor_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != response_idx)
        .map(|(_, h)| h.clone())
        .collect();
    for (i, row) in rows.iter().enumerate() {
        y[i] = row[response_idx];
        let mut k = 0;
        for (idx, v) in row.iter().enumerate() {
            if idx != response_idx {
                x[(i, k)] = *v;
                k += 1;
            }
        }
    }
    Ok(DataSet::new(x, y, predictor_names, response.to_string()))
}

/// One row of a results table: a (scenario, method, n) cell.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub scenario: String,
    pub method: String,
    pub n: usize,
    pub replications: usize,
    pub vcc_mean: f64,
    pub vcc_sd: f64,
    pub tcc_mean: f64,
    pub tcc_sd: f64,
    pub test_counts: Option<[usize; 3]>,
    pub ic_counts: Option<[usize; 3]>,
}

impl From<&crate::experiment::MethodSummary> for ResultRow {
    fn from(s: &crate::experiment::MethodSummary) -> Self {
        ResultRow {
            scenario: s.scenario.clone(),
            method: s.method.clone(),
            n: s.n,
            replications: s.replications,
            vcc_mean: s.vcc_mean,
            vcc_sd: s.vcc_sd,
            tcc_mean: s.tcc_mean,
            tcc_sd: s.tcc_sd,
            test_counts: s.test_counts,
            ic_counts: s.ic_counts,
        }
    }
}

/// Accumulated results with the fixed column layout used on disk.
#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const RESULT_HEADER: &str = "scenario,method,n,replications,vcc_mean,vcc_sd,tcc_mean,tcc_sd,test_lt,test_eq,test_gt,ic_lt,ic_eq,ic_gt";

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        assert!(
            row.test_counts
                .map(|c| c.iter().sum::<usize>() == row.replications)
                .unwrap_or(true)
                && row
                    .ic_counts
                    .map(|c| c.iter().sum::<usize>() == row.replications)
                    .unwrap_or(true),
            "dimension counts must sum to the replication count"
        );
        self.rows.push(row);
    }

    /// Render as CSV with 4-decimal fixed formatting.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(RESULT_HEADER);
        out.push('\n');
        for row in &self.rows {
            let counts = |c: Option<[usize; 3]>| match c {
                Some([a, b, g]) => format!("{a},{b},{g}"),
                None => ",,".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{},{}\n",
                row.scenario,
                row.method,
                row.n,
                row.replications,
                row.vcc_mean,
                row.vcc_sd,
                row.tcc_mean,
                row.tcc_sd,
                counts(row.test_counts),
                counts(row.ic_counts),
            ));
        }
        out
    }
}

/// Write a results table as CSV (fixed column order, 4-decimal values);
/// overwrites any existing file.
pub fn write_results(table: &ResultTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(table.to_csv_string().as_bytes())?;
    Ok(())
}

/// Write a dataset back out as CSV (response column last), with enough
/// digits that loading reproduces every value exactly.
pub fn write_dataset_csv(data: &DataSet, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::fs::File::create(path)?;
    let mut header = data.predictor_names.clone();
    header.push(data.response_name.clone());
    writeln!(file, "{}", header.join(","))?;
    for i in 0..data.n() {
        let mut cells: Vec<String> = (0..data.p())
            .map(|j| format!("{:.17e}", data.x[(i, j)]))
            .collect();
        cells.push(format!("{:.17e}", data.y[i]));
        writeln!(file, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_numeric_csv() {
        let f = write_temp("a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
        let ds = load_csv(f.path(), "y").unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.predictor_names, vec!["a", "b"]);
        assert_eq!(ds.y[1], 6.0);
        assert_eq!(ds.x[(2, 1)], 8.0);
    }

    #[test]
    fn names_offending_row_and_column() {
        let f = write_temp("a,y\n1,2\nzzz,4\n");
        match load_csv(f.path(), "y") {
            Err(Error::NonNumericCell { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "a");
            }
            other => panic!("expected NonNumericCell, got {other:?}"),
        }
    }

    #[test]
    fn missing_response_column_errors() {
        let f = write_temp("a,b\n1,2\n");
        assert!(load_csv(f.path(), "y").is_err());
    }

    #[test]
    fn results_csv_formatting_and_round_trip() {
        let mut table = ResultTable::default();
        table.push(ResultRow {
            scenario: "case4".to_string(),
            method: "t-sir".to_string(),
            n: 400,
            replications: 50,
            vcc_mean: 0.5,
            vcc_sd: 0.01234567,
            tcc_mean: 0.91299,
            tcc_sd: 0.0,
            test_counts: Some([3, 45, 2]),
            ic_counts: Some([0, 50, 0]),
        });
        let text = table.to_csv_string();
        assert!(text.starts_with(RESULT_HEADER));
        assert!(text.contains("0.5000"), "fixed formatting: {text}");
        assert!(text.contains("0.0123"));
        assert!(text.contains("3,45,2"));

        // empty table is header-only
        let empty = ResultTable::default();
        assert_eq!(empty.to_csv_string(), format!("{RESULT_HEADER}\n"));

        // read back to 4 decimals
        let f = write_temp(&text);
        let mut reader = csv::Reader::from_path(f.path()).unwrap();
        let record = reader.records().next().unwrap().unwrap();
        assert_eq!(&record[4], "0.5000");
        assert_eq!(&record[6], "0.9130");
    }

    #[test]
    fn dataset_round_trips_exactly() {
        use nalgebra::{DMatrix, DVector};
        let x = DMatrix::from_row_slice(
            3,
            2,
            &[0.1, -2.5e-7, std::f64::consts::PI, 1.0 / 3.0, -0.0, 9.25e17],
        );
        let y = DVector::from_column_slice(&[1.5, -0.125, 2.0 / 7.0]);
        let data = DataSet::new(x, y, vec!["a".into(), "b".into()], "y".into());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round.csv");
        write_dataset_csv(&data, &path).unwrap();
        let back = load_csv(&path, "y").unwrap();
        assert_eq!(back.x, data.x);
        assert_eq!(back.y, data.y);
        assert_eq!(back.predictor_names, data.predictor_names);
    }

    #[test]
    #[should_panic(expected = "dimension counts")]
    fn count_invariant_enforced() {
        let mut table = ResultTable::default();
        table.push(ResultRow {
            scenario: "case1".into(),
            method: "sir".into(),
            n: 100,
            replications: 10,
            vcc_mean: 0.5,
            vcc_sd: 0.1,
            tcc_mean: 0.5,
            tcc_sd: 0.1,
            test_counts: Some([1, 2, 3]),
            ic_counts: None,
        });
    }
}
