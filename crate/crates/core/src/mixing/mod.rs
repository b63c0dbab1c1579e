//! Wall behaviour of linear layers.

mod aes;
mod analysis;

pub use analysis::{
    enumerate_proper_walls, FamilyReport, JRange, ProperCheck, StrongCheck, TraceStep,
};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BrickLayout, Subspace, Wall};

/// An invertible `d x d` linear map together with the brick layout it mixes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MixingLayer {
    matrix: BitMatrix,
    layout: BrickLayout,
}

impl MixingLayer {
    pub fn new(matrix: BitMatrix, layout: BrickLayout) -> Result<Self> {
        let d = layout.d();
        if matrix.row_count() != d || matrix.col_count() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.row_count().max(matrix.col_count()),
            });
        }
        let rank = matrix.rank();
        if rank != d {
            return Err(Error::Singular { rank, dim: d });
        }
        Ok(Self { matrix, layout })
    }

    pub fn identity(layout: BrickLayout) -> Self {
        Self {
            matrix: BitMatrix::identity(layout.d()),
            layout,
        }
    }

    /// Block-circulant layer sending brick `i` onto brick `i + 1 (mod b)`
    /// with identity blocks.
    pub fn rotation(layout: BrickLayout) -> Self {
        let (m, b) = (layout.m(), layout.b());
        let matrix = BitMatrix::from_linear_fn(layout.d(), layout.d(), |v| {
            let mut out = 0u128;
            for i in 0..b {
                let x = layout.brick_value(v, i) as u128;
                out |= x << (((i + 1) % b) * m);
            }
            out
        });
        Self { matrix, layout }
    }

    /// `blocks[i]` acts on brick `i` alone.
    pub fn block_diagonal(layout: BrickLayout, blocks: &[BitMatrix]) -> Result<Self> {
        if blocks.len() != layout.b() {
            return Err(Error::DimensionMismatch {
                expected: layout.b(),
                found: blocks.len(),
            });
        }
        let m = layout.m();
        let matrix = BitMatrix::from_linear_fn(layout.d(), layout.d(), |v| {
            blocks.iter().enumerate().fold(0u128, |acc, (i, blk)| {
                acc | blk.apply_word(layout.brick_value(v, i) as u128) << (i * m)
            })
        });
        Self::new(matrix, layout)
    }

    /// Two-brick layer `(x, y) -> (x + y, x + α·y)` with `α` the generator
    /// of the registered field `F_{2^m}`. All four blocks are nonzero, so
    /// neither brick is sent to a wall.
    pub fn two_brick_butterfly(m: usize) -> Result<Self> {
        let layout = BrickLayout::new(m, 2)?;
        let modulus = crate::field::modulus(m)?;
        let matrix = BitMatrix::from_linear_fn(layout.d(), layout.d(), |v| {
            let x = layout.brick_value(v, 0) as u32;
            let y = layout.brick_value(v, 1) as u32;
            let alpha_y = crate::field::gf_mul(y, 2, m, modulus);
            ((x ^ y) as u128) | (((x ^ alpha_y) as u128) << m)
        });
        Self::new(matrix, layout)
    }

    pub fn aes_shift_rows() -> Self {
        aes::shift_rows()
    }

    pub fn aes_mix_columns() -> Self {
        aes::mix_columns()
    }

    /// ShiftRows followed by MixColumns on the 16-byte state.
    pub fn aes_sr_mc() -> Self {
        aes::shift_rows().then(&aes::mix_columns())
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn d(&self) -> usize {
        self.layout.d()
    }

    #[inline]
    pub fn apply_word(&self, v: u128) -> u128 {
        self.matrix.apply_word(v)
    }

    /// Apply `self`, then `next`.
    pub fn then(&self, next: &MixingLayer) -> MixingLayer {
        assert_eq!(self.layout, next.layout);
        Self {
            matrix: self.matrix.mul(&next.matrix).expect("same dimension"),
            layout: self.layout,
        }
    }

    pub fn inverse(&self) -> MixingLayer {
        Self {
            matrix: self.matrix.inverse().expect("mixing layers are invertible"),
            layout: self.layout,
        }
    }

    pub fn image(&self, s: &Subspace) -> Subspace {
        s.image(&self.matrix).expect("ambient matches layout")
    }

    /// Support bits of the image of a wall, and the image's dimension.
    #[inline]
    pub(crate) fn wall_image_support(&self, wall_mask: u128) -> u128 {
        let rows = self.matrix.rows();
        let mut support = 0u128;
        let mut rest = wall_mask;
        while rest != 0 {
            support |= rows[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        support
    }

    /// The image of `w`, as a wall if it is one.
    pub fn map_wall(&self, w: &Wall) -> Option<Wall> {
        let support = self.wall_image_support(w.mask());
        self.layout
            .is_wall_support(support, w.dim())
            .map(|bricks| Wall::new(self.layout, bricks).expect("bricks within layout"))
    }
}

/// Ordered mixing layers `(λ_1, ..., λ_ℓ)` over one layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerFamily {
    layers: Vec<MixingLayer>,
}

impl LayerFamily {
    pub fn new(layers: Vec<MixingLayer>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::InvalidArgument("layer family must be nonempty".into()));
        };
        let layout = first.layout();
        if let Some(bad) = layers.iter().find(|l| l.layout() != layout) {
            return Err(Error::DimensionMismatch {
                expected: layout.d(),
                found: bad.d(),
            });
        }
        Ok(Self { layers })
    }

    pub fn repeated(layer: MixingLayer, len: usize) -> Result<Self> {
        Self::new(vec![layer; len])
    }

    pub fn layers(&self) -> &[MixingLayer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layout(&self) -> BrickLayout {
        self.layers[0].layout()
    }

    pub fn product(&self) -> MixingLayer {
        self.layers[1..]
            .iter()
            .fold(self.layers[0].clone(), |acc, l| acc.then(l))
    }
}
