//! Compressed sparse row storage for square adjacency operators.

use crate::error::{Error, Result};

/// Square matrix in CSR form. Column indices within a row are strictly
/// ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles a matrix from per-row `(column, value)` lists. Each row must
    /// already be sorted by column with no repeats.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let nnz = rows.iter().map(Vec::len).sum();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        indptr.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (j, w) in row {
                debug_assert!(j < n);
                indices.push(j);
                values.push(w);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            indptr,
            indices,
            values,
        }
    }

    pub fn zeros(n: usize) -> Self {
        CsrMatrix {
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Offset of row `i` into the nonzero arrays.
    pub fn row_start(&self, i: usize) -> usize {
        self.indptr[i]
    }

    pub fn row_indices(&self, i: usize) -> &[usize] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = self.row_indices(i);
        match cols.binary_search(&j) {
            Ok(k) => self.values[self.indptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Sum of row `i`, accumulated in ascending column order.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, w)| w).sum()
    }

    /// Divides every nonzero row by its own sum. Empty rows stay empty.
    pub fn row_normalized(&self) -> Self {
        let mut values = self.values.clone();
        for i in 0..self.dim() {
            let total = self.row_sum(i);
            if total > 0.0 {
                for v in &mut values[self.indptr[i]..self.indptr[i + 1]] {
                    *v /= total;
                }
            }
        }
        CsrMatrix {
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values,
        }
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        if out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: out.len(),
            });
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *slot = acc;
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, w) in self.row(i) {
                row[j] = w;
            }
        }
        dense
    }
}
