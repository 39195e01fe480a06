//! Minimal deterministic linear algebra, random sampling and a
//! finite-difference gradient oracle.
//!
//! Everything downstream (graph construction, the model's forward/backward
//! passes, the trainer) is built on these kernels. All values are `f64`;
//! every public operation leaves only finite entries behind.

mod dense;
mod fdiff;
mod rng;
mod sparse;

pub use dense::{matmul, DenseMatrix};
pub use fdiff::{finite_diff_grad, gradient_rel_err, max_gradient_rel_err};
pub use rng::{sample_standard_normal, RngState};
pub use sparse::{spmm, SparseMatrix};

use thiserror::Error;

/// Errors from the numeric kernels.
#[derive(Debug, Error)]
pub enum NumericError {
    #[error("{op}: dimension mismatch, left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{context}: encountered a non-finite value")]
    NonFinite { context: &'static str },
    #[error("{context}: {message}")]
    InvalidArgument {
        context: &'static str,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, NumericError>;
