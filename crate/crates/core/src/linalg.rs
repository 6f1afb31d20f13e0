//! Minimal dense linear algebra: row-major matrices, Cholesky, and a
//! partially pivoted LU. The problems in this crate are small (correlation
//! matrices up to ~10 factors, PBPK Jacobians of ~20 states), so a
//! dependency-free implementation is the simplest thing that works.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Scalar> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<R>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [R] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[R]> {
        self.data.chunks_exact(self.cols)
    }

    /// Copies column `j` into a fresh vector.
    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Overwrites column `j` of `self` with column `j` of `other`.
    pub fn copy_column_from(&mut self, other: &Matrix<R>, j: usize) {
        assert_eq!(self.rows, other.rows);
        for i in 0..self.rows {
            self[(i, j)] = other[(i, j)];
        }
    }

    /// Lower-triangular Cholesky factor `L` with `L Lᵀ = self`.
    ///
    /// Fails with [`Error::NotPositiveDefinite`] when a pivot is not strictly
    /// positive, which doubles as the positive-definiteness check for
    /// correlation matrices.
    pub fn cholesky(&self) -> Result<Matrix<R>> {
        assert_eq!(self.rows, self.cols, "cholesky needs a square matrix");
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= R::zero() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[(i, j)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Ok(l)
    }

    /// Solves `self * x = b` given that `self` is the lower Cholesky factor.
    pub fn cholesky_solve(&self, b: &[R]) -> Vec<R> {
        let n = self.rows;
        assert_eq!(b.len(), n);
        // Forward substitution with L, then backward with Lᵀ.
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self[(i, k)];
                y[i] = y[i] - lik * y[k];
            }
            y[i] = y[i] / self[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self[(k, i)];
                y[i] = y[i] - lki * y[k];
            }
            y[i] = y[i] / self[(i, i)];
        }
        y
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.cols);
        self.rows_iter()
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

impl<R: Scalar> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;

    fn index(&self, (i, j): (usize, usize)) -> &R {
        &self.data[i * self.cols + j]
    }
}

impl<R: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct Lu<R> {
    lu: Matrix<R>,
    pivots: Vec<usize>,
}

impl<R: Scalar> Lu<R> {
    pub fn factor(mut a: Matrix<R>) -> Result<Self> {
        assert_eq!(a.nrows(), a.ncols());
        let n = a.nrows();
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut max = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > max {
                    max = v;
                    p = i;
                }
            }
            if max == R::zero() || !max.is_finite() {
                return Err(Error::SingularMatrix);
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in k + 1..n {
                    let akj = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - factor * akj;
                }
            }
        }
        Ok(Self { lu: a, pivots })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [R]) {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
        }
        for i in 1..n {
            let row = self.lu.row(i);
            let (solved, tail) = b.split_at_mut(i);
            let dot: R = row[..i].iter().zip(solved.iter()).map(|(&l, &x)| l * x).sum();
            tail[0] = tail[0] - dot;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let (head, solved) = b.split_at_mut(i + 1);
            let dot: R =
                row[i + 1..].iter().zip(solved.iter()).map(|(&u, &x)| u * x).sum();
            head[i] = (head[i] - dot) / row[i];
        }
    }
}
