//! Row-major dense matrices.
//!
//! Only the handful of operations the checks need: products, traces, norms,
//! and an LU determinant with partial pivoting.

use std::fmt;

use crate::error::{LabError, Result};

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            entries: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(LabError::Dimension {
                expected: n_rows * n_cols,
                got: entries.len(),
            });
        }
        Ok(DenseMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Builds a matrix from a function of 0-based `(row, col)`.
    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        DenseMatrix {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// 0-based access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n_cols + j] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != other.n_rows {
            return Err(LabError::Dimension {
                expected: self.n_cols,
                got: other.n_rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            let out_row = &mut out.entries[i * other.n_cols..(i + 1) * other.n_cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_cols {
            return Err(LabError::Dimension {
                expected: self.n_cols,
                got: v.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest componentwise asymmetry `|a_ij - a_ji|`; infinite for non-square input.
    pub fn max_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.n_rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Determinant by LU factorization with partial pivoting.
    ///
    /// An exactly zero pivot column yields 0.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(LabError::domain(format!(
                "determinant of a non-square {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let n = self.n_rows;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .expect("non-empty pivot range");
            let pivot = a[pivot_row * n + col];
            if pivot == 0.0 {
                return Ok(0.0);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            det *= pivot;
            for r in (col + 1)..n {
                let factor = a[r * n + col] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in (col + 1)..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
            }
        }
        Ok(det)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_times_matrix() {
        let m = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(DenseMatrix::identity(2).matmul(&m).unwrap(), m);
    }

    #[test]
    fn shape_checks() {
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        let a = DenseMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(a.mul_vec(&[1.0, 2.0]).is_err());
        assert!(a.determinant().is_err());
    }

    #[test]
    fn determinant_with_pivoting() {
        // needs a row swap at the first column
        let m = DenseMatrix::from_row_major(3, 3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0])
            .unwrap();
        // 0*(1-0) - 2*(1-0) + 1*(0-3) = -5
        assert!((m.determinant().unwrap() + 5.0).abs() < 1e-14);
        let singular = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(singular.determinant().unwrap().abs() < 1e-15);
    }

    #[test]
    fn trace_and_norm() {
        let m = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(m.trace(), 5.0);
        assert_eq!(m.frobenius_norm(), 25.0f64.sqrt());
        assert_eq!(m.max_asymmetry(), 0.0);
        assert_eq!(m.transpose(), m);
    }
}
