use crate::error::{Error, Result};
use crate::gf2::subspace::Echelon;
use crate::gf2::{BrickLayout, Subspace};
use crate::sbox::SBox;

use super::Round;

/// Largest block size for which permutations are evaluated point by point.
pub const MAX_POINT_DIM: usize = 20;

/// The partition `L(U)` of `V` into cosets of `U`, identified by `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearPartition(pub Subspace);

impl LinearPartition {
    pub fn zero_block(&self) -> &Subspace {
        &self.0
    }

    pub fn same_block(&self, x: u128, y: u128) -> bool {
        self.0.contains_word(x ^ y)
    }

    /// Coset representatives: the points with zeros at every pivot column.
    pub fn representatives(&self) -> impl Iterator<Item = u128> + '_ {
        let pivots = self.0.pivots().iter().fold(0u128, |acc, &p| acc | 1 << p);
        let d = self.0.ambient();
        assert!(d <= MAX_POINT_DIM);
        (0..1u128 << d).filter(move |x| x & pivots == 0)
    }
}

/// Parallel application of one S-box per brick.
#[derive(Clone, Copy, Debug)]
pub struct Bricklayer<'a> {
    layout: BrickLayout,
    bricks: &'a [SBox],
}

impl<'a> Bricklayer<'a> {
    pub fn new(layout: BrickLayout, bricks: &'a [SBox]) -> Self {
        assert_eq!(bricks.len(), layout.b());
        Self { layout, bricks }
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    #[inline]
    pub fn apply(&self, x: u128) -> u128 {
        let m = self.layout.m();
        self.bricks.iter().enumerate().fold(0u128, |acc, (i, s)| {
            acc | (s.table()[self.layout.brick_value(x, i)] as u128) << (i * m)
        })
    }

    /// Same map with every brick translated so that `0 -> 0`.
    #[inline]
    pub fn apply_normalized(&self, x: u128) -> u128 {
        let m = self.layout.m();
        self.bricks.iter().enumerate().fold(0u128, |acc, (i, s)| {
            acc | (s.normalized_table()[self.layout.brick_value(x, i)] as u128) << (i * m)
        })
    }

    pub fn normalized_table(&self) -> Result<Vec<u32>> {
        let d = self.layout.d();
        check_point_dim(d)?;
        Ok((0..1u128 << d).map(|x| self.apply_normalized(x) as u32).collect())
    }

    /// `L(U) γ` for the normalized bricklayer, when it is linear.
    pub fn partition_image(&self, u: &Subspace) -> Result<Option<Subspace>> {
        check_point_dim(u.ambient())?;
        Ok(image_of_linear_partition(u, 0, |x| self.apply_normalized(x)))
    }
}

fn check_point_dim(d: usize) -> Result<()> {
    if d > MAX_POINT_DIM {
        return Err(Error::CapExceeded {
            what: "explicit permutation",
            estimate: 1u128 << d,
            limit: 1u128 << MAX_POINT_DIM,
        });
    }
    Ok(())
}

/// Core test: `f` maps `L(U)` onto `L(W)` with `W` the image of the coset
/// through `zero_pre = f^-1(0)`.
pub(crate) fn image_of_linear_partition(
    u: &Subspace,
    zero_pre: u128,
    f: impl Fn(u128) -> u128,
) -> Option<Subspace> {
    let d = u.ambient();
    let k = u.dim();
    let mut ech = Echelon::with_capacity(k + 1);
    for x in u.elements() {
        ech.insert(f(zero_pre ^ x));
        if ech.rank() > k {
            return None;
        }
    }
    let w = Subspace::from_rref_unchecked(ech.into_rows(), d);
    if k == 0 || k == d {
        return Some(w);
    }
    let part = LinearPartition(u.clone());
    for rep in part.representatives() {
        let base = f(rep);
        for x in u.elements().skip(1) {
            if !w.contains_word(f(rep ^ x) ^ base) {
                return None;
            }
        }
    }
    Some(w)
}

/// Image of `L(U)` under the permutation given by `table`, if it is a
/// linear partition.
pub fn partition_image(table: &[u32], u: &Subspace) -> Result<Option<Subspace>> {
    let d = u.ambient();
    check_point_dim(d)?;
    if table.len() != 1 << d {
        return Err(Error::DimensionMismatch {
            expected: 1 << d,
            found: table.len(),
        });
    }
    let zero_pre = table
        .iter()
        .position(|&y| y == 0)
        .ok_or(Error::NotBijective(table.len()))? as u128;
    Ok(image_of_linear_partition(u, zero_pre, |x| table[x as usize] as u128))
}

/// For every `u` in `U` and `v` in `V`: `γ(u + v) + γ(v)` lies in `W`.
/// Brute force over all pairs; used as an oracle.
pub fn check_lemma_containment(gamma: &Bricklayer<'_>, u: &Subspace, w: &Subspace) -> Result<bool> {
    let d = gamma.layout().d();
    check_point_dim(d)?;
    if u.ambient() != d || w.ambient() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.ambient().max(w.ambient()),
        });
    }
    for v in 0..1u128 << d {
        let gv = gamma.apply_normalized(v);
        for x in u.elements() {
            if !w.contains_word(gamma.apply_normalized(x ^ v) ^ gv) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl Round {
    /// Image of `L(U)` under the keyless round `γ λ` (bricks normalized).
    pub fn partition_image(&self, u: &Subspace) -> Result<Option<Subspace>> {
        Ok(self
            .bricklayer()
            .partition_image(u)?
            .map(|w| self.layer().image(&w)))
    }
}
