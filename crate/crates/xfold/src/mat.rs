//! Dense row-major matrices, generic over the scalar mode.

use std::ops::{Index, IndexMut};

use crate::error::Error;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::InvalidSize(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidSize("ragged matrix rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = &S> + '_ {
        (0..self.rows).map(move |i| &self[(i, j)])
    }

    /// Matrix product; panics on dimension mismatch (internal use keeps
    /// dimensions consistent by construction).
    pub fn mul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out: Mat<S> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + add;
                }
            }
        }
        out
    }

    /// Largest absolute entry (the max-norm used throughout); zero for an
    /// empty matrix.
    pub fn max_abs_entry(&self) -> S {
        let mut best = S::zero();
        for v in &self.data {
            let a = v.abs();
            if a.cmp_total(&best) == std::cmp::Ordering::Greater {
                best = a;
            }
        }
        best
    }

    pub fn col_max_abs(&self, j: usize) -> S {
        let mut best = S::zero();
        for i in 0..self.rows {
            let a = self[(i, j)].abs();
            if a.cmp_total(&best) == std::cmp::Ordering::Greater {
                best = a;
            }
        }
        best
    }

    pub fn row_max_abs(&self, i: usize) -> S {
        let mut best = S::zero();
        for v in self.row(i) {
            let a = v.abs();
            if a.cmp_total(&best) == std::cmp::Ordering::Greater {
                best = a;
            }
        }
        best
    }

    pub fn scale_col(&mut self, j: usize, factor: &S) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].clone() * factor.clone();
        }
    }

    pub fn scale_row(&mut self, i: usize, factor: &S) {
        for v in self.row_mut(i) {
            *v = v.clone() * factor.clone();
        }
    }

    pub fn transpose(&self) -> Mat<S> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<S: Scalar> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Dot product of two equal-length slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc + x.clone() * y.clone();
    }
    acc
}
