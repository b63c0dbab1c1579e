use std::fmt;
use std::ops::{Add, AddAssign};

use super::low_mask;
use crate::error::{Error, Result};

/// An element of `(F_2)^d`, `1 <= d <= 128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    bits: u128,
    dim: u8,
}

impl BitVector {
    pub fn new(bits: u128, dim: usize) -> Result<Self> {
        if dim == 0 || dim > super::MAX_DIM {
            return Err(Error::AmbientOutOfRange(dim));
        }
        if bits & !low_mask(dim) != 0 {
            return Err(Error::InvalidArgument(format!(
                "vector has bits set beyond dimension {dim}"
            )));
        }
        Ok(Self {
            bits,
            dim: (dim - 1) as u8,
        })
    }

    /// Truncates `bits` to the low `dim` coordinates.
    pub fn masked(bits: u128, dim: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&dim));
        Self {
            bits: bits & low_mask(dim),
            dim: (dim - 1) as u8,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::masked(0, dim)
    }

    /// The standard basis vector `e_i` (0-based).
    pub fn unit(i: usize, dim: usize) -> Self {
        assert!(i < dim);
        Self::masked(1u128 << i, dim)
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize + 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard inner product over F_2.
    pub fn dot(&self, other: &Self) -> bool {
        (self.bits & other.bits).count_ones() & 1 == 1
    }
}

impl Add for BitVector {
    type Output = BitVector;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            bits: self.bits ^ rhs.bits,
            dim: self.dim,
        }
    }
}

impl AddAssign for BitVector {
    fn add_assign(&mut self, rhs: Self) {
        debug_assert_eq!(self.dim, rhs.dim);
        self.bits ^= rhs.bits;
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({:#x}/{})", self.bits, self.dim())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bits_beyond_dim() {
        assert!(BitVector::new(0b1000, 3).is_err());
        assert!(BitVector::new(0b111, 3).is_ok());
        assert!(BitVector::new(0, 0).is_err());
        assert!(BitVector::new(u128::MAX, 128).is_ok());
    }

    #[test]
    fn addition_is_xor() {
        let a = BitVector::masked(0b1100, 4);
        let b = BitVector::masked(0b1010, 4);
        assert_eq!((a + b).bits(), 0b0110);
        assert!((a + a).is_zero());
    }
}
