use std::fmt;

use super::{low_mask, BitVector};
use crate::error::{Error, Result};

/// A `rows x cols` matrix over F_2 acting on row vectors from the right:
/// `v * M` is the XOR of the rows selected by the set coordinates of `v`.
/// Row `i` is therefore the image of the basis vector `e_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u128>,
    cols: usize,
}

impl BitMatrix {
    pub fn from_rows(rows: Vec<u128>, cols: usize) -> Result<Self> {
        if rows.is_empty() || rows.len() > super::MAX_DIM {
            return Err(Error::AmbientOutOfRange(rows.len()));
        }
        if cols == 0 || cols > super::MAX_DIM {
            return Err(Error::AmbientOutOfRange(cols));
        }
        if let Some(bad) = rows.iter().position(|r| r & !low_mask(cols) != 0) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has bits beyond column {cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn identity(d: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&d));
        Self {
            rows: (0..d).map(|i| 1u128 << i).collect(),
            cols: d,
        }
    }

    /// Builds the matrix of a linear map given as a function on packed words.
    pub fn from_linear_fn(d_in: usize, d_out: usize, f: impl Fn(u128) -> u128) -> Self {
        let rows = (0..d_in).map(|i| f(1u128 << i) & low_mask(d_out)).collect();
        Self { rows, cols: d_out }
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    #[inline]
    pub fn apply_word(&self, mut v: u128) -> u128 {
        let mut acc = 0;
        while v != 0 {
            let i = v.trailing_zeros() as usize;
            acc ^= self.rows[i];
            v &= v - 1;
        }
        acc
    }

    pub fn apply(&self, v: &BitVector) -> Result<BitVector> {
        if v.dim() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: v.dim(),
            });
        }
        Ok(BitVector::masked(self.apply_word(v.bits()), self.cols))
    }

    /// `self * rhs`: first apply `self`, then `rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: rhs.rows.len(),
                found: self.cols,
            });
        }
        Ok(Self {
            rows: self.rows.iter().map(|&r| rhs.apply_word(r)).collect(),
            cols: rhs.cols,
        })
    }

    pub fn rank(&self) -> usize {
        let mut basis: Vec<u128> = Vec::with_capacity(self.rows.len());
        for &r in &self.rows {
            let mut v = r;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.cols
    }

    pub fn inverse(&self) -> Result<BitMatrix> {
        let d = self.rows.len();
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.cols,
            });
        }
        let mut a = self.rows.clone();
        let mut inv: Vec<u128> = (0..d).map(|i| 1u128 << i).collect();
        for col in 0..d {
            let Some(p) = (col..d).find(|&r| a[r] >> col & 1 == 1) else {
                return Err(Error::Singular {
                    rank: self.rank(),
                    dim: d,
                });
            };
            a.swap(col, p);
            inv.swap(col, p);
            for r in 0..d {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(Self { rows: inv, cols: d })
    }

    pub fn transpose(&self) -> BitMatrix {
        let rows = (0..self.cols)
            .map(|c| {
                self.rows
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (i, &r)| acc | ((r >> c & 1) << i))
            })
            .collect();
        Self {
            rows,
            cols: self.rows.len(),
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:#x}")?;
        }
        write!(f, "]")
    }
}
