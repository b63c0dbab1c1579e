//! The translation-based cipher model and the trapdoor analysis built on it.

mod audit;
mod chains;
mod partition;

pub use audit::{
    audit, AuditOptions, AuditVerdict, BrickAssessment, Certificate, RoundAssessment, Status,
    UniformityRoute,
};
pub use chains::{find_trapdoor_chains, ChainMode, ChainSearch, PartitionChain, DEFAULT_CHAIN_CAP};
pub use partition::{
    check_lemma_containment, partition_image, Bricklayer, LinearPartition, MAX_POINT_DIM,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, BrickLayout};
use crate::mixing::{LayerFamily, MixingLayer};
use crate::sbox::SBox;

/// One round: bricklayer substitution, then the mixing layer. The round key
/// is added afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    bricks: Vec<SBox>,
    layer: MixingLayer,
}

impl Round {
    pub fn new(bricks: Vec<SBox>, layer: MixingLayer) -> Result<Self> {
        let layout = layer.layout();
        if bricks.len() != layout.b() {
            return Err(Error::DimensionMismatch {
                expected: layout.b(),
                found: bricks.len(),
            });
        }
        if let Some(bad) = bricks.iter().find(|s| s.m() != layout.m()) {
            return Err(Error::DimensionMismatch {
                expected: layout.m(),
                found: bad.m(),
            });
        }
        Ok(Self { bricks, layer })
    }

    pub fn uniform(brick: SBox, layer: MixingLayer) -> Result<Self> {
        let b = layer.layout().b();
        Self::new(vec![brick; b], layer)
    }

    pub fn bricks(&self) -> &[SBox] {
        &self.bricks
    }

    pub fn layer(&self) -> &MixingLayer {
        &self.layer
    }

    pub fn bricklayer(&self) -> Bricklayer<'_> {
        Bricklayer::new(self.layer.layout(), &self.bricks)
    }

    /// `x γ λ` with the tables as given.
    #[inline]
    pub fn apply_keyless(&self, x: u128) -> u128 {
        self.layer.apply_word(self.bricklayer().apply(x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TbCipher {
    layout: BrickLayout,
    rounds: Vec<Round>,
}

/// Independent round keys `(k_1, ..., k_ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoundKeyTuple {
    keys: Vec<u128>,
}

impl RoundKeyTuple {
    pub fn new(keys: Vec<BitVector>) -> Self {
        Self {
            keys: keys.iter().map(|k| k.bits()).collect(),
        }
    }

    pub fn from_words(keys: Vec<u128>) -> Self {
        Self { keys }
    }

    pub fn zero(rounds: usize) -> Self {
        Self {
            keys: vec![0; rounds],
        }
    }

    pub fn random(cipher: &TbCipher, rng: &mut impl Rng) -> Self {
        let mask = crate::gf2::low_mask(cipher.d());
        Self {
            keys: (0..cipher.rounds().len())
                .map(|_| rng.gen::<u128>() & mask)
                .collect(),
        }
    }

    pub fn words(&self) -> &[u128] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

impl TbCipher {
    pub fn new(layout: BrickLayout, rounds: Vec<Round>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::InvalidArgument("a cipher needs at least one round".into()));
        }
        if let Some(bad) = rounds.iter().find(|r| r.layer.layout() != layout) {
            return Err(Error::DimensionMismatch {
                expected: layout.d(),
                found: bad.layer.d(),
            });
        }
        Ok(Self { layout, rounds })
    }

    /// `ℓ` rounds of GF(2^m) inversion bricks and the brick rotation layer.
    pub fn rotation(m: usize, b: usize, rounds: usize) -> Result<Self> {
        let layout = BrickLayout::new(m, b)?;
        let round = Round::uniform(SBox::inverse_gf2m(m)?, MixingLayer::rotation(layout))?;
        Self::new(layout, vec![round; rounds])
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn d(&self) -> usize {
        self.layout.d()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn layers(&self) -> LayerFamily {
        LayerFamily::new(self.rounds.iter().map(|r| r.layer.clone()).collect())
            .expect("rounds share a layout")
    }

    fn check_keys(&self, keys: &RoundKeyTuple) -> Result<()> {
        if keys.len() != self.rounds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rounds.len(),
                found: keys.len(),
            });
        }
        let mask = crate::gf2::low_mask(self.d());
        if keys.keys.iter().any(|k| k & !mask != 0) {
            return Err(Error::InvalidArgument("round key wider than the block".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn encrypt_word(&self, keys: &[u128], mut x: u128) -> u128 {
        for (round, k) in self.rounds.iter().zip(keys) {
            x = round.apply_keyless(x) ^ k;
        }
        x
    }

    pub fn encrypt(&self, keys: &RoundKeyTuple, x: &BitVector) -> Result<BitVector> {
        self.check_keys(keys)?;
        if x.dim() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: x.dim(),
            });
        }
        Ok(BitVector::masked(self.encrypt_word(&keys.keys, x.bits()), self.d()))
    }

    pub fn decrypt(&self, keys: &RoundKeyTuple, y: &BitVector) -> Result<BitVector> {
        self.check_keys(keys)?;
        if y.dim() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: y.dim(),
            });
        }
        let mut x = y.bits();
        for (round, k) in self.rounds.iter().zip(&keys.keys).rev() {
            x = round.layer.inverse().apply_word(x ^ k);
            let inv: Vec<SBox> = round.bricks.iter().map(SBox::inverse).collect();
            x = Bricklayer::new(self.layout, &inv).apply(x);
        }
        Ok(BitVector::masked(x, self.d()))
    }

    fn check_point_dim(&self) -> Result<()> {
        if self.d() > MAX_POINT_DIM {
            return Err(Error::CapExceeded {
                what: "explicit permutation",
                estimate: 1u128 << self.d(),
                limit: 1u128 << MAX_POINT_DIM,
            });
        }
        Ok(())
    }

    /// Point table of the full encryption under `keys`.
    pub fn encryption_table(&self, keys: &RoundKeyTuple) -> Result<Vec<u32>> {
        self.check_point_dim()?;
        self.check_keys(keys)?;
        Ok((0..1u128 << self.d())
            .map(|x| self.encrypt_word(&keys.keys, x) as u32)
            .collect())
    }

    /// Point table of round `h` (0-based) followed by adding `key`.
    pub fn round_table(&self, h: usize, key: u128) -> Result<Vec<u32>> {
        self.check_point_dim()?;
        let round = self
            .rounds
            .get(h)
            .ok_or_else(|| Error::InvalidArgument(format!("no round {h}")))?;
        Ok((0..1u128 << self.d())
            .map(|x| (round.apply_keyless(x) ^ key) as u32)
            .collect())
    }
}
