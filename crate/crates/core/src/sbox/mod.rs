//! Measurements on a single brick: difference distribution, derivative
//! images, linear components and strong anti-invariance.

mod anti;
mod ddt;
mod report;
mod walsh;

pub use anti::{AntiInvarianceBudget, AntiInvarianceCheck, OrderResult, SubspaceWitness};
pub use ddt::{DdTable, DerivativeImage};
pub use report::SBoxReport;
pub use walsh::{fwht, LinearityReport};

use crate::error::{Error, Result};
use crate::field;
use crate::gf2::BitMatrix;

pub const MAX_WIDTH: usize = 16;

/// PRESENT's 4-bit S-box.
pub const PRESENT: [u16; 16] = [
    0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2,
];

/// A bijective lookup table on `(F_2)^m`.
///
/// Tables with `f(0) != 0` are accepted; analysis runs on the normalized
/// table `x -> f(x) + f(0)`, and `shift()` records the constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SBox {
    m: usize,
    table: Vec<u16>,
    normalized: Vec<u16>,
}

impl SBox {
    /// Infers `m` from the table length.
    pub fn new(table: Vec<u16>) -> Result<Self> {
        let n = table.len();
        if n < 2 || !n.is_power_of_two() || n > 1 << MAX_WIDTH {
            return Err(Error::BadTableLength(n));
        }
        Self::with_width(n.trailing_zeros() as usize, table)
    }

    pub fn with_width(m: usize, table: Vec<u16>) -> Result<Self> {
        if m == 0 || m > MAX_WIDTH || table.len() != 1 << m {
            return Err(Error::BadTableLength(table.len()));
        }
        let mut seen = vec![false; table.len()];
        for &y in &table {
            let y = y as usize;
            if y >= seen.len() || seen[y] {
                return Err(Error::NotBijective(table.len()));
            }
            seen[y] = true;
        }
        let c = table[0];
        let normalized = table.iter().map(|&y| y ^ c).collect();
        Ok(Self {
            m,
            table,
            normalized,
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::with_width(m, (0..1u32 << m).map(|x| x as u16).collect())
    }

    /// Field inversion over GF(2^m) with the registered modulus.
    pub fn inverse_gf2m(m: usize) -> Result<Self> {
        Self::with_width(m, field::inversion_table(m)?)
    }

    pub fn present() -> Self {
        Self::with_width(4, PRESENT.to_vec()).expect("PRESENT table is a bijection")
    }

    /// The linear map `x -> x * a` for an invertible `m x m` matrix.
    pub fn linear(a: &BitMatrix) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Error::Singular {
                rank: a.rank(),
                dim: a.row_count(),
            });
        }
        let m = a.row_count();
        Self::with_width(
            m,
            (0..1u128 << m).map(|x| a.apply_word(x) as u16).collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }

    pub fn normalized_table(&self) -> &[u16] {
        &self.normalized
    }

    /// `f(0)`, folded into the neighbouring key addition by normalization.
    pub fn shift(&self) -> u16 {
        self.table[0]
    }

    pub fn is_normalized(&self) -> bool {
        self.table[0] == 0
    }

    pub fn normalize(&self) -> SBox {
        Self {
            m: self.m,
            table: self.normalized.clone(),
            normalized: self.normalized.clone(),
        }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x] as usize
    }

    pub fn inverse(&self) -> SBox {
        let mut inv = vec![0u16; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u16;
        }
        SBox::with_width(self.m, inv).expect("inverse of a bijection")
    }
}

impl std::fmt::Debug for SBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SBox(m={}, {:x?})", self.m, self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijective_and_bad_length() {
        assert_eq!(SBox::new(vec![0, 1, 1, 2]), Err(Error::NotBijective(4)));
        assert_eq!(SBox::new(vec![0, 1, 2]), Err(Error::BadTableLength(3)));
        assert_eq!(SBox::new(vec![0, 1, 2, 4]), Err(Error::NotBijective(4)));
    }

    #[test]
    fn normalization_records_shift() {
        let s = SBox::present();
        assert_eq!(s.shift(), 0xC);
        assert!(!s.is_normalized());
        assert_eq!(s.normalized_table()[0], 0);
        assert_eq!(s.normalized_table()[1], 0x5 ^ 0xC);
        assert!(s.normalize().is_normalized());
    }

    #[test]
    fn inverse_table() {
        let s = SBox::present();
        let inv = s.inverse();
        for x in 0..16 {
            assert_eq!(inv.apply(s.apply(x)), x);
        }
    }

    #[test]
    fn gf16_inversion_table() {
        let s = SBox::inverse_gf2m(4).unwrap();
        assert_eq!(
            s.table(),
            &[0, 1, 9, 14, 13, 11, 7, 6, 15, 2, 12, 5, 10, 4, 3, 8]
        );
    }
}
