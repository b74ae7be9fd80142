//! Feature assembly and the ordinary-least-squares pitch regressor.

mod dataset;
mod matrix;
mod ols;

pub use dataset::{align_targets, align_targets_with_context, assemble_features, Dataset, FrameRef};
pub use matrix::Matrix;
pub use ols::{lstsq, LstsqSolution};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linear map from feature rows to semitones, `y = X w + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionModel<T> {
    pub weights: Vec<T>,
    pub intercept: T,
    pub context_k: usize,
    /// Numerical rank of the bias-augmented design.
    pub rank: usize,
    /// Set when the design was rank deficient and the minimum-norm solution
    /// was returned.
    pub rank_deficient: bool,
}

impl<T: Real> RegressionModel<T> {
    pub fn feature_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict_row(&self, row: &[T]) -> T {
        row.iter().zip(&self.weights).map(|(&x, &w)| x * w).sum::<T>() + self.intercept
    }
}

/// Fits OLS with an unpenalized intercept.
pub fn fit_ols<T: Real>(data: &Dataset<T>) -> Result<RegressionModel<T>> {
    let d = data.feature_dim();
    if data.len() < d + 1 {
        return Err(Error::TooFewSamples {
            needed: d + 1,
            got: data.len(),
        });
    }
    let augmented: Vec<Vec<T>> = data
        .features
        .iter_rows()
        .map(|r| {
            let mut v = Vec::with_capacity(d + 1);
            v.extend_from_slice(r);
            v.push(T::one());
            v
        })
        .collect();
    let rows: Vec<&[T]> = augmented.iter().map(Vec::as_slice).collect();
    let sol = lstsq(&rows, &data.targets);
    let mut weights = sol.x;
    let intercept = weights.pop().unwrap_or_else(T::zero);
    Ok(RegressionModel {
        weights,
        intercept,
        context_k: data.context_k,
        rank: sol.rank,
        rank_deficient: sol.rank < d + 1,
    })
}

/// `X w + b` for every row of `features`.
pub fn predict<T: Real>(model: &RegressionModel<T>, features: &Matrix<T>) -> Result<Vec<T>> {
    if features.cols() != model.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim(),
            got: features.cols(),
        });
    }
    Ok(features.iter_rows().map(|r| model.predict_row(r)).collect())
}
