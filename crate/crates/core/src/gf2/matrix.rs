use std::fmt;

use serde::{Deserialize, Serialize};

use super::vector::{low_mask, parity};
use crate::error::{Error, Result};

/// A dense GF(2) matrix with at most 64 columns.
///
/// Row `i` is packed with column `j` at bit `cols - 1 - j`, matching the
/// packing of [`super::GF2Vector`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64);
        Self {
            rows,
            cols,
            data: vec![0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, data: Vec<u64>) -> Result<Self> {
        if cols > 64 || data.iter().any(|&r| r & !low_mask(cols) != 0) {
            return Err(Error::Invalid("row does not fit in column count".into()));
        }
        Ok(Self {
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> u64 {
        self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i] >> (self.cols - 1 - j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let bit = 1u64 << (self.cols - 1 - j);
        if value {
            self.data[i] |= bit;
        } else {
            self.data[i] &= !bit;
        }
    }

    /// Matrix-vector product on a packed column vector.
    pub fn mul_bits(&self, v: u64) -> u64 {
        self.data
            .iter()
            .fold(0u64, |acc, &row| (acc << 1) | parity(row & v) as u64)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|&row| {
                (0..self.cols)
                    .filter(|&k| row >> (self.cols - 1 - k) & 1 == 1)
                    .fold(0u64, |acc, k| acc ^ other.data[k])
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Gauss-Jordan inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let bit = 1u64 << (n - 1 - col);
            let pivot = (col..n).find(|&r| a[r] & bit != 0)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r] & bit != 0 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(Self {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    /// Block `[r0, r0+h) x [c0, c0+w)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        let mut b = Self::zeros(h, w);
        for i in 0..h {
            for j in 0..w {
                b.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        b
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.rows;
        let mut m = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a.get(i, j));
                m.set(i, n + j, b.get(i, j));
                m.set(n + i, j, c.get(i, j));
                m.set(n + i, n + j, d.get(i, j));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            if i + 1 < self.rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}
