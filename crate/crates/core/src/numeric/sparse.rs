//! Row-compressed sparse matrices.
//!
//! The only consumer is the encoder's left-multiplication by the normalized
//! adjacency, so the format is CSR: per-row sorted `(column, value)` entries,
//! no explicit zeros.

use super::dense::DenseMatrix;
use super::{NumericError, Result};

/// Sparse matrix in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    /// Row pointer: entries of row `r` live in `indices/data[indptr[r]..indptr[r+1]]`.
    indptr: Vec<usize>,
    /// Column indices, strictly increasing within each row.
    indices: Vec<usize>,
    /// Non-zero values, parallel to `indices`.
    data: Vec<f64>,
}

impl SparseMatrix {
    /// Matrix with no stored entries.
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    /// Sparse identity.
    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    /// Build from `(row, col, value)` triplets. Duplicate coordinates are
    /// summed; zero results are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(NumericError::InvalidArgument {
                    context: "SparseMatrix::from_triplets",
                    message: format!("entry ({r},{c}) outside {rows}x{cols}"),
                });
            }
            if !v.is_finite() {
                return Err(NumericError::NonFinite {
                    context: "SparseMatrix::from_triplets",
                });
            }
            per_row[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                if v != 0.0 {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Sorted `(column, value)` entries of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        self.indices[lo..hi]
            .iter()
            .zip(&self.data[lo..hi])
            .map(|(&c, &v)| (c, v))
    }

    /// Value at `(r, c)`; zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        match self.indices[lo..hi].binary_search(&c) {
            Ok(pos) => self.data[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                out.set(r, c, v);
            }
        }
        out
    }

    /// Exact structural symmetry check: `A[p][q] == A[q][p]` for all entries.
    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                if self.get(c, r) != v {
                    return false;
                }
            }
        }
        true
    }
}

/// Sparse-dense product `a * b`, equivalent to densifying `a` first.
pub fn spmm(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows() {
        return Err(NumericError::DimensionMismatch {
            op: "spmm",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols());
    let width = b.cols();
    for r in 0..a.rows {
        // Split borrow: values_mut row and b rows never alias.
        let mut acc = vec![0.0; width];
        for (c, v) in a.row(r) {
            let b_row = b.row(c);
            for (o, &bv) in acc.iter_mut().zip(b_row) {
                *o += v * bv;
            }
        }
        out.values_mut()[r * width..(r + 1) * width].copy_from_slice(&acc);
    }
    Ok(out)
}

impl SparseMatrix {
    /// `self * other` (method form of [`spmm`]).
    pub fn matmul_dense(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        spmm(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::super::dense::matmul;
    use super::*;

    #[test]
    fn identity_spmm_is_noop() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        let i = SparseMatrix::identity(3);
        assert_eq!(spmm(&i, &m).unwrap(), m);
    }

    #[test]
    fn all_zero_sparse_gives_zero_matrix() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let z = SparseMatrix::empty(2, 2);
        let out = spmm(&z, &m).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spmm_matches_dense_oracle_on_fixed_case() {
        // 5x5 sparse with scattered entries against a 5x3 dense block.
        let trips = [
            (0usize, 1usize, 2.0),
            (1, 0, -1.5),
            (2, 2, 0.5),
            (3, 4, 3.0),
            (4, 0, 1.0),
            (4, 3, -2.0),
        ];
        let a = SparseMatrix::from_triplets(5, 5, trips).unwrap();
        let b = DenseMatrix::from_vec(5, 3, (0..15).map(|i| i as f64 * 0.3 - 2.0).collect())
            .unwrap();
        let sparse_out = spmm(&a, &b).unwrap();
        let dense_out = matmul(&a.to_dense(), &b).unwrap();
        for (x, y) in sparse_out.values().iter().zip(dense_out.values()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn duplicate_triplets_are_summed_and_zeros_dropped() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, -1.0), (1, 1, 2.0)])
            .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.get(0, 0), 0.0);
    }

    #[test]
    fn spmm_rejects_mismatched_shapes() {
        let a = SparseMatrix::empty(2, 4);
        let b = DenseMatrix::zeros(3, 2);
        assert!(spmm(&a, &b).is_err());
    }

    #[test]
    fn row_indices_strictly_increase() {
        let a =
            SparseMatrix::from_triplets(1, 5, [(0, 4, 1.0), (0, 1, 2.0), (0, 3, 3.0)]).unwrap();
        let cols: Vec<usize> = a.row(0).map(|(c, _)| c).collect();
        assert_eq!(cols, vec![1, 3, 4]);
    }
}
