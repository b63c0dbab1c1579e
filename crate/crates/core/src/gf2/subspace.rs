use std::fmt;

use super::{BitMatrix, BitVector};
use crate::error::{Error, Result};

/// A linear subspace of `(F_2)^d` held in reduced row-echelon form.
///
/// The pivot of a basis row is its lowest set coordinate. Pivots strictly
/// increase down the basis and each pivot column is zero in every other row,
/// so two subspaces are equal iff their bases are identical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<u128>,
}

#[inline]
fn pivot(row: u128) -> u32 {
    row.trailing_zeros()
}

/// Incremental RREF builder over packed words.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    rows: Vec<u128>,
}

impl Echelon {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            rows: Vec::with_capacity(n),
        }
    }

    #[inline]
    pub fn reduce(&self, mut v: u128) -> u128 {
        for &r in &self.rows {
            if v >> pivot(r) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Adds `v` to the span; returns false if it was already a member.
    pub fn insert(&mut self, v: u128) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = pivot(v);
        for r in self.rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
            }
        }
        let at = self.rows.partition_point(|&r| pivot(r) < p);
        self.rows.insert(at, v);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn into_rows(self) -> Vec<u128> {
        self.rows
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&ambient));
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&ambient));
        Self {
            ambient,
            basis: (0..ambient).map(|i| 1u128 << i).collect(),
        }
    }

    /// Canonical span of `vectors`. An empty input needs the ambient
    /// dimension from elsewhere; use [`Subspace::span_words`] for that case.
    pub fn rref(vectors: &[BitVector]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidArgument(
                "empty generating set has no ambient dimension; use span_words".into(),
            ));
        };
        let d = first.dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        Ok(Self::span_words(vectors.iter().map(|v| v.bits()), d))
    }

    /// Canonical span of packed words in `(F_2)^ambient`.
    pub fn span_words(words: impl IntoIterator<Item = u128>, ambient: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&ambient));
        let mask = super::low_mask(ambient);
        let mut ech = Echelon::default();
        for w in words {
            debug_assert_eq!(w & !mask, 0);
            ech.insert(w & mask);
            if ech.rank() == ambient {
                break;
            }
        }
        Self {
            ambient,
            basis: ech.into_rows(),
        }
    }

    /// Wraps rows that are already in canonical form.
    pub(crate) fn from_rref_unchecked(basis: Vec<u128>, ambient: usize) -> Self {
        debug_assert!(Self::is_canonical(&basis));
        Self { ambient, basis }
    }

    fn is_canonical(basis: &[u128]) -> bool {
        basis.iter().all(|&r| r != 0)
            && basis.windows(2).all(|w| pivot(w[0]) < pivot(w[1]))
            && basis.iter().enumerate().all(|(i, &r)| {
                basis
                    .iter()
                    .enumerate()
                    .all(|(j, &s)| i == j || s >> pivot(r) & 1 == 0)
            })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty() || self.basis.len() == self.ambient
    }

    pub fn basis_words(&self) -> &[u128] {
        &self.basis
    }

    pub fn basis(&self) -> Vec<BitVector> {
        self.basis
            .iter()
            .map(|&w| BitVector::masked(w, self.ambient))
            .collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|&r| pivot(r) as usize).collect()
    }

    /// Union of the supports of all elements.
    pub fn support(&self) -> u128 {
        self.basis.iter().fold(0, |acc, &r| acc | r)
    }

    #[inline]
    pub fn reduce_word(&self, mut v: u128) -> u128 {
        for &r in &self.basis {
            if v >> pivot(r) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    #[inline]
    pub fn contains_word(&self, v: u128) -> bool {
        self.reduce_word(v) == 0
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.dim() == self.ambient && self.contains_word(v.bits())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|&r| other.contains_word(r))
    }

    /// The subspace's elements in Gray-code order, starting from zero.
    pub fn elements(&self) -> impl Iterator<Item = u128> + '_ {
        assert!(self.dim() < 64, "element iteration limited to dim < 64");
        let n = 1u64 << self.dim();
        let mut cur = 0u128;
        (0..n).map(move |i| {
            if i > 0 {
                cur ^= self.basis[i.trailing_zeros() as usize];
            }
            cur
        })
    }

    /// `{ s * m : s in self }` in canonical form.
    pub fn image(&self, m: &BitMatrix) -> Result<Subspace> {
        if m.row_count() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: m.row_count(),
            });
        }
        Ok(Self::span_words(
            self.basis.iter().map(|&r| m.apply_word(r)),
            m.col_count(),
        ))
    }

    /// Like [`Subspace::image`] but rejects singular matrices.
    pub fn image_under_invertible(&self, m: &BitMatrix) -> Result<Subspace> {
        if !m.is_invertible() {
            return Err(Error::Singular {
                rank: m.rank(),
                dim: m.row_count(),
            });
        }
        self.image(m)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(Self::span_words(
            self.basis.iter().chain(&other.basis).copied(),
            self.ambient,
        ))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(d={}, dim={}, [", self.ambient, self.dim())?;
        for (i, r) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r:#x}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn brute_span(words: &[u128]) -> BTreeSet<u128> {
        let mut set = BTreeSet::new();
        for mask in 0u32..(1 << words.len()) {
            let mut acc = 0;
            for (i, w) in words.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc ^= w;
                }
            }
            set.insert(acc);
        }
        set
    }

    #[test]
    fn duplicate_rows_collapse() {
        let v = BitVector::masked(0b1011, 4);
        let s = Subspace::rref(&[v, v]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), vec![v]);
    }

    #[test]
    fn dependent_third_vector() {
        let a = BitVector::masked(0b1101, 5);
        let b = BitVector::masked(0b10110, 5);
        let s = Subspace::rref(&[a, b, a + b]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(brute_span(&[a.bits(), b.bits(), (a + b).bits()]).len(), 4);
        assert_eq!(s.elements().count(), 4);
    }

    #[test]
    fn empty_span_is_zero_space() {
        let s = Subspace::span_words([], 6);
        assert_eq!(s.dim(), 0);
        assert_eq!(s, Subspace::zero(6));
        assert_eq!(s.elements().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn mixed_dims_rejected() {
        let r = Subspace::rref(&[BitVector::masked(1, 3), BitVector::masked(1, 4)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn image_under_identity_and_of_zero() {
        let s = Subspace::span_words([0b0110, 0b1001], 4);
        assert_eq!(s.image(&BitMatrix::identity(4)).unwrap(), s);
        let m = BitMatrix::from_rows(vec![0b0011, 0b0110, 0b1100, 0b1000], 4).unwrap();
        assert_eq!(Subspace::zero(4).image(&m).unwrap(), Subspace::zero(4));
    }

    #[test]
    fn singular_image_rejected_when_required() {
        let m = BitMatrix::from_rows(vec![0b01, 0b01], 2).unwrap();
        assert!(Subspace::full(2).image_under_invertible(&m).is_err());
        assert_eq!(Subspace::full(2).image(&m).unwrap().dim(), 1);
    }

    fn random_invertible(d: usize, seed: u64) -> BitMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let rows = (0..d).map(|_| rng.gen::<u128>() & super::super::low_mask(d)).collect();
            let m = BitMatrix::from_rows(rows, d).unwrap();
            if m.is_invertible() {
                return m;
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_under_shuffle(words in prop::collection::vec(0u128..(1 << 10), 0..8), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = words.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = Subspace::span_words(words.iter().copied(), 10);
            let b = Subspace::span_words(shuffled, 10);
            prop_assert_eq!(&a, &b);
            prop_assert!(Subspace::is_canonical(a.basis_words()));
            let elems: BTreeSet<u128> = a.elements().collect();
            prop_assert_eq!(elems, brute_span(&words));
            // idempotent
            prop_assert_eq!(Subspace::span_words(a.basis_words().iter().copied(), 10), a);
        }

        #[test]
        fn image_respects_composition(words in prop::collection::vec(0u128..(1 << 12), 0..6), s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = random_invertible(12, s1);
            let b = random_invertible(12, s2);
            let s = Subspace::span_words(words, 12);
            let lhs = s.image(&a).unwrap().image(&b).unwrap();
            let rhs = s.image(&a.mul(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs.dim(), s.dim());
            prop_assert_eq!(lhs, rhs);
        }
    }
}

mod serde_impl {
    use super::Subspace;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        ambient: usize,
        basis: Vec<String>,
    }

    impl Serialize for Subspace {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            Repr {
                ambient: self.ambient,
                basis: self.basis.iter().map(|r| format!("{r:#x}")).collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Subspace {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let r = Repr::deserialize(d)?;
            if r.ambient == 0 || r.ambient > crate::gf2::MAX_DIM {
                return Err(de::Error::custom(format!("ambient {} out of range", r.ambient)));
            }
            let words = r
                .basis
                .iter()
                .map(|s| crate::hex::parse_word(s).map_err(de::Error::custom))
                .collect::<Result<Vec<_>, _>>()?;
            if words.iter().any(|w| w & !crate::gf2::low_mask(r.ambient) != 0) {
                return Err(de::Error::custom("basis vector exceeds ambient dimension"));
            }
            Ok(Subspace::span_words(words, r.ambient))
        }
    }
}
