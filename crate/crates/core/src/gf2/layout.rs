use std::fmt;

use super::{low_mask, Subspace};
use crate::error::{Error, Result};

/// Decomposition `V = V_1 + ... + V_b` into `b` bricks of `m` bits each.
///
/// Bricks are 0-based in the API; brick `i` covers coordinates
/// `[i*m, (i+1)*m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrickLayout {
    m: usize,
    b: usize,
}

impl BrickLayout {
    pub fn new(m: usize, b: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidLayout {
                m,
                b,
                reason: "brick width must be at least 2",
            });
        }
        if b < 2 {
            return Err(Error::InvalidLayout {
                m,
                b,
                reason: "need at least 2 bricks",
            });
        }
        if m * b > super::MAX_DIM {
            return Err(Error::InvalidLayout {
                m,
                b,
                reason: "m*b exceeds 128",
            });
        }
        Ok(Self { m, b })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn d(&self) -> usize {
        self.m * self.b
    }

    #[inline]
    pub fn brick_mask(&self, i: usize) -> u128 {
        low_mask(self.m) << (i * self.m)
    }

    /// Coordinates covered by the bricks in `bricks` (bit `i` = brick `i`).
    pub fn wall_mask(&self, bricks: u64) -> u128 {
        let mut mask = 0;
        let mut rest = bricks;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            mask |= self.brick_mask(i);
            rest &= rest - 1;
        }
        mask
    }

    /// Set of bricks on which `word` is nonzero.
    pub fn bricks_of(&self, word: u128) -> u64 {
        (0..self.b)
            .filter(|&i| word & self.brick_mask(i) != 0)
            .fold(0u64, |acc, i| acc | 1 << i)
    }

    #[inline]
    pub fn brick_value(&self, word: u128, i: usize) -> usize {
        ((word >> (i * self.m)) & low_mask(self.m)) as usize
    }

    pub fn all_bricks(&self) -> u64 {
        if self.b == 64 {
            u64::MAX
        } else {
            (1u64 << self.b) - 1
        }
    }

    /// The wall whose bricks are exactly those meeting `s`, if `s` is that wall.
    pub fn as_wall(&self, s: &Subspace) -> Option<Wall> {
        if s.ambient() != self.d() {
            return None;
        }
        let bricks = self.bricks_of(s.support());
        (s.dim() == self.m * bricks.count_ones() as usize).then_some(Wall {
            bricks,
            layout: *self,
        })
    }

    /// Wall test for `dim`-dimensional subspaces given only their support.
    #[inline]
    pub(crate) fn is_wall_support(&self, support: u128, dim: usize) -> Option<u64> {
        let bricks = self.bricks_of(support);
        (dim == self.m * bricks.count_ones() as usize).then_some(bricks)
    }
}

/// A sum of bricks, `bricks` bit `i` set when `V_i` is included.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wall {
    bricks: u64,
    layout: BrickLayout,
}

impl Wall {
    pub fn new(layout: BrickLayout, bricks: u64) -> Result<Self> {
        if bricks & !layout.all_bricks() != 0 {
            return Err(Error::InvalidArgument(format!(
                "brick set {bricks:#b} exceeds b={}",
                layout.b()
            )));
        }
        Ok(Self { bricks, layout })
    }

    /// From 0-based brick indices.
    pub fn from_indices(layout: BrickLayout, indices: &[usize]) -> Result<Self> {
        let mut bricks = 0u64;
        for &i in indices {
            if i >= layout.b() {
                return Err(Error::InvalidArgument(format!("brick {i} out of range")));
            }
            bricks |= 1 << i;
        }
        Ok(Self { bricks, layout })
    }

    pub fn bricks(&self) -> u64 {
        self.bricks
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.layout.b())
            .filter(|&i| self.bricks >> i & 1 == 1)
            .collect()
    }

    /// 1-based brick numbers, as walls are usually written.
    pub fn numbers(&self) -> Vec<usize> {
        self.indices().into_iter().map(|i| i + 1).collect()
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn is_proper(&self) -> bool {
        self.bricks != 0 && self.bricks != self.layout.all_bricks()
    }

    pub fn is_trivial(&self) -> bool {
        !self.is_proper()
    }

    pub fn dim(&self) -> usize {
        self.bricks.count_ones() as usize * self.layout.m()
    }

    pub fn mask(&self) -> u128 {
        self.layout.wall_mask(self.bricks)
    }

    pub fn subspace(&self) -> Subspace {
        let mask = self.mask();
        let basis = (0..self.layout.d())
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| 1u128 << j)
            .collect();
        Subspace::from_rref_unchecked(basis, self.layout.d())
    }
}

impl fmt::Debug for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wall{self}")
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.numbers().into_iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_bounds() {
        assert!(BrickLayout::new(1, 4).is_err());
        assert!(BrickLayout::new(4, 1).is_err());
        assert!(BrickLayout::new(8, 17).is_err());
        assert_eq!(BrickLayout::new(8, 16).unwrap().d(), 128);
    }

    #[test]
    fn two_bricks_form_a_wall() {
        let l = BrickLayout::new(3, 3).unwrap();
        let s = Subspace::span_words((0..6).map(|j| 1u128 << j), 9);
        let w = l.as_wall(&s).unwrap();
        assert_eq!(w.numbers(), vec![1, 2]);
        assert!(w.is_proper());
        assert_eq!(w.to_string(), "{1,2}");
    }

    #[test]
    fn straddling_line_is_not_a_wall() {
        let l = BrickLayout::new(3, 3).unwrap();
        let s = Subspace::span_words([0b001_001], 9);
        assert_eq!(l.as_wall(&s), None);
    }

    #[test]
    fn full_space_is_trivial_wall() {
        let l = BrickLayout::new(2, 3).unwrap();
        let w = l.as_wall(&Subspace::full(6)).unwrap();
        assert!(w.is_trivial());
        assert_eq!(w.bricks(), 0b111);
        let z = l.as_wall(&Subspace::zero(6)).unwrap();
        assert!(z.is_trivial());
        assert_eq!(z.bricks(), 0);
    }

    #[test]
    fn single_brick_subspace() {
        let l = BrickLayout::new(4, 2).unwrap();
        let s = Wall::from_indices(l, &[0]).unwrap().subspace();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.basis_words(), &[1, 2, 4, 8]);
        assert_eq!(Wall::new(l, 0).unwrap().subspace().dim(), 0);
    }

    #[test]
    fn wall_round_trip_all_subsets() {
        let l = BrickLayout::new(2, 4).unwrap();
        for bricks in 0u64..16 {
            let w = Wall::new(l, bricks).unwrap();
            let s = w.subspace();
            assert_eq!(s.dim(), w.dim());
            assert_eq!(l.as_wall(&s), Some(w));
        }
    }

    #[test]
    fn as_wall_matches_elementwise_definition() {
        // d = 9: compare against membership of every point
        use crate::gf2::{EnumerationCap, SubspaceEnumerator};
        let l = BrickLayout::new(3, 3).unwrap();
        for k in 0..=9 {
            if ![0, 3, 4, 6, 9].contains(&k) {
                continue;
            }
            for s in SubspaceEnumerator::new(9, k, EnumerationCap::default()).unwrap().iter().take(3000) {
                let elems: std::collections::BTreeSet<u128> = s.elements().collect();
                let brute = (0u64..8).find(|&bricks| {
                    let mask = l.wall_mask(bricks);
                    let wall: std::collections::BTreeSet<u128> =
                        (0u128..512).filter(|x| x & !mask == 0).collect();
                    wall == elems
                });
                match (l.as_wall(&s), brute) {
                    (Some(w), Some(b)) => assert_eq!(w.bricks(), b),
                    (None, None) => {}
                    other => panic!("mismatch on {s:?}: {other:?}"),
                }
            }
        }
    }
}
