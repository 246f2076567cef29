//! Dense matrices over GF(q).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Fe>, // row-major
    field: Field,
}

/// Result of [`Mat::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// A solution with every free variable set to zero.
    pub x: Mat,
    /// `true` when `A` has full column rank, so `x` is the only solution.
    pub unique: bool,
}

/// Reduced row echelon form of a matrix, with its pivot columns.
struct Echelon {
    data: Vec<u32>,
    cols: usize,
    pivots: Vec<usize>,
}

fn eliminate(field: Field, rows: usize, cols: usize, mut data: Vec<u32>, reduced: bool) -> Echelon {
    let q = field.modulus() as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for k in 0..cols {
                data.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = field.inv(Fe(data[r * cols + c])).expect("pivot is nonzero").0 as u64;
        for k in c..cols {
            data[r * cols + k] = (data[r * cols + k] as u64 * inv % q) as u32;
        }
        let targets = if reduced { 0..rows } else { r + 1..rows };
        for i in targets {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c] as u64;
            if factor == 0 {
                continue;
            }
            let neg = q - factor;
            for k in c..cols {
                let v = data[r * cols + k] as u64;
                if v != 0 {
                    data[i * cols + k] = ((data[i * cols + k] as u64 + neg * v) % q) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { data, cols, pivots }
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
            field,
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fe) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            data,
            field,
        }
    }

    /// Builds a matrix from signed integer rows, reducing each entry mod q.
    pub fn from_rows(field: Field, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(field, rows.len(), cols, |i, j| {
            field.from_i64(rows[i][j])
        }))
    }

    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat {
            rows,
            cols,
            data,
            field,
        })
    }

    /// A single-row matrix.
    pub fn row_vector(field: Field, v: &[Fe]) -> Self {
        Mat {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
            field,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of bounds");
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fe] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.modulus(), other.field.modulus()));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.field.modulus() as u64;
        let mut acc = vec![0u64; other.cols];
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k].0 as u64;
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (slot, b) in acc.iter_mut().zip(brow) {
                    // q < 2^31, so one product fits easily; reduce each time
                    // to stay in range for long inner dimensions.
                    *slot = (*slot + a * b.0 as u64) % q;
                }
            }
            out.extend(acc.iter().map(|&v| Fe(v as u32)));
        }
        Ok(Mat {
            rows: self.rows,
            cols: other.cols,
            data: out,
            field: self.field,
        })
    }

    /// `v · A` for a row vector `v`.
    pub fn left_mul_vec(&self, v: &[Fe]) -> Result<Vec<Fe>> {
        Ok(Mat::row_vector(self.field, v).matmul(self)?.data)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("add".into()));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("sub".into()));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn scale(&self, c: Fe) -> Mat {
        let f = self.field;
        Mat {
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
            ..*self
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A(row_set, col_set)`, in the order given.
    pub fn submatrix(&self, row_set: &[usize], col_set: &[usize]) -> Result<Mat> {
        if let Some(&r) = row_set.iter().find(|&&r| r >= self.rows) {
            return Err(Error::OutOfRange(format!("row {r} of {}", self.rows)));
        }
        if let Some(&c) = col_set.iter().find(|&&c| c >= self.cols) {
            return Err(Error::OutOfRange(format!("column {c} of {}", self.cols)));
        }
        Ok(Mat::from_fn(self.field, row_set.len(), col_set.len(), |i, j| {
            self.get(row_set[i], col_set[j])
        }))
    }

    pub fn hstack(blocks: &[&Mat]) -> Result<Mat> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::DimensionMismatch("hstack of nothing".into()))?;
        let rows = first.rows;
        let mut cols = 0;
        for b in blocks {
            first.check_field(b)?;
            if b.rows != rows {
                return Err(Error::DimensionMismatch("hstack row counts differ".into()));
            }
            cols += b.cols;
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Mat {
            rows,
            cols,
            data,
            field: first.field,
        })
    }

    pub fn vstack(blocks: &[&Mat]) -> Result<Mat> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::DimensionMismatch("vstack of nothing".into()))?;
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            first.check_field(b)?;
            if b.cols != cols {
                return Err(Error::DimensionMismatch("vstack column counts differ".into()));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Mat {
            rows,
            cols,
            data,
            field: first.field,
        })
    }

    fn raw(&self) -> Vec<u32> {
        self.data.iter().map(|v| v.0).collect()
    }

    pub fn rank(&self) -> usize {
        eliminate(self.field, self.rows, self.cols, self.raw(), false)
            .pivots
            .len()
    }

    /// Pivot columns of the row echelon form: the first linearly
    /// independent columns scanning left to right.
    pub fn pivot_columns(&self) -> Vec<usize> {
        eliminate(self.field, self.rows, self.cols, self.raw(), false).pivots
    }

    pub fn det(&self) -> Result<Fe> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let f = self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
                return Ok(Fe::ZERO);
            };
            if p != c {
                for k in 0..n {
                    a.swap(p * n + k, c * n + k);
                }
                det = f.neg(det);
            }
            let pivot = a[c * n + c];
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for i in c + 1..n {
                let factor = f.mul(a[i * n + c], inv);
                if factor.is_zero() {
                    continue;
                }
                for k in c..n {
                    a[i * n + k] = f.sub(a[i * n + k], f.mul(factor, a[c * n + k]));
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug = Mat::hstack(&[self, &Mat::identity(self.field, n)])?;
        let ech = eliminate(self.field, n, 2 * n, aug.raw(), true);
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(Mat::from_fn(self.field, n, n, |i, j| {
            Fe(ech.data[i * 2 * n + n + j])
        }))
    }

    /// Solves `A · X = Y`.
    pub fn solve(&self, y: &Mat) -> Result<Solution> {
        self.check_field(y)?;
        if self.rows != y.rows {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, Y has {}",
                self.rows, y.rows
            )));
        }
        let (n, k) = (self.cols, y.cols);
        let aug = Mat::hstack(&[self, y])?;
        let ech = eliminate(self.field, self.rows, n + k, aug.raw(), true);
        if ech.pivots.iter().any(|&p| p >= n) {
            return Err(Error::Inconsistent);
        }
        let mut x = Mat::zeros(self.field, n, k);
        for (r, &p) in ech.pivots.iter().enumerate() {
            for j in 0..k {
                x.set(p, j, Fe(ech.data[r * ech.cols + n + j]));
            }
        }
        Ok(Solution {
            x,
            unique: ech.pivots.len() == n,
        })
    }

    /// `true` if every row of `other` lies in the row space of `self`.
    pub fn row_space_contains(&self, other: &Mat) -> Result<bool> {
        let stacked = Mat::vstack(&[self, other])?;
        Ok(stacked.rank() == self.rank())
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Mat {}x{} over GF({})",
            self.rows,
            self.cols,
            self.field.modulus()
        )?;
        for i in 0..self.rows {
            f.write_str("  [")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}
