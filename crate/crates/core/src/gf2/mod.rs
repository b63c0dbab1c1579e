//! Linear algebra over F_2 for vectors of at most 128 coordinates.
//!
//! Coordinates are packed little-endian into a `u128`: coordinate `j` is bit
//! `j`. Brick `i` of a [`BrickLayout`] occupies the contiguous bits
//! `[i*m, (i+1)*m)`, so every wall is a single mask.

mod bitvec;
mod enumerate;
mod layout;
mod matrix;
pub(crate) mod subspace;

pub use bitvec::BitVector;
pub use enumerate::{gaussian_binomial, total_subspaces, EnumerationCap, SubspaceEnumerator};
pub use layout::{BrickLayout, Wall};
pub use matrix::BitMatrix;
pub use subspace::Subspace;

pub const MAX_DIM: usize = 128;

/// Mask with the low `d` bits set.
#[inline]
pub(crate) fn low_mask(d: usize) -> u128 {
    if d >= 128 {
        u128::MAX
    } else {
        (1u128 << d) - 1
    }
}
