//! In-memory dataset: predictor matrix, response vector, column names.

use nalgebra::{DMatrix, DVector};

/// An n x p predictor matrix with a length-n response and column metadata.
#[derive(Debug, Clone)]
pub struct DataSet {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub predictor_names: Vec<String>,
    pub response_name: String,
}

impl DataSet {
    pub fn new(
        x: DMatrix<f64>,
        y: DVector<f64>,
        predictor_names: Vec<String>,
        response_name: String,
    ) -> Self {
        assert_eq!(x.nrows(), y.len(), "predictor and response lengths differ");
        assert_eq!(x.ncols(), predictor_names.len());
        Self {
            x,
            y,
            predictor_names,
            response_name,
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}
