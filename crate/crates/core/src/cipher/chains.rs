use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RoundKeyTuple, TbCipher};
use crate::error::{Error, Result};
use crate::gf2::{total_subspaces, EnumerationCap, Subspace, SubspaceEnumerator};
use crate::mixing::enumerate_proper_walls;

/// Default ambient-dimension limit for exhaustive chain search.
pub const DEFAULT_CHAIN_CAP: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// Every nontrivial subspace is tried as a starting partition.
    Exhaustive,
    /// Only chains that stay on walls through the first `ℓ` layers.
    Walls,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSearch {
    pub mode: ChainMode,
    pub cap: EnumerationCap,
}

impl ChainSearch {
    pub fn exhaustive() -> Self {
        Self {
            mode: ChainMode::Exhaustive,
            cap: EnumerationCap::new(DEFAULT_CHAIN_CAP),
        }
    }

    pub fn walls() -> Self {
        Self {
            mode: ChainMode::Walls,
            cap: EnumerationCap::new(DEFAULT_CHAIN_CAP),
        }
    }
}

/// Subspaces `U_1, ..., U_{ℓ+1}` such that keyless round `i` maps `L(U_i)`
/// onto `L(U_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionChain {
    pub spaces: Vec<Subspace>,
}

impl PartitionChain {
    pub fn first(&self) -> &Subspace {
        &self.spaces[0]
    }

    pub fn last(&self) -> &Subspace {
        self.spaces.last().expect("nonempty chain")
    }

    fn check_shape(&self, cipher: &TbCipher) -> Result<()> {
        let d = cipher.d();
        if self.spaces.len() != cipher.rounds().len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: cipher.rounds().len() + 1,
                found: self.spaces.len(),
            });
        }
        if let Some(s) = self.spaces.iter().find(|s| s.ambient() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.ambient(),
            });
        }
        Ok(())
    }

    /// Re-checks every link. Point-wise when the block is small enough,
    /// otherwise structurally: `U_1..U_ℓ` are walls (fixed by any
    /// bricklayer) and `U_{i+1} = U_i λ_i`.
    pub fn verify(&self, cipher: &TbCipher) -> Result<bool> {
        self.check_shape(cipher)?;
        if self.spaces.iter().any(Subspace::is_trivial) {
            return Ok(false);
        }
        let layout = cipher.layout();
        for (i, round) in cipher.rounds().iter().enumerate() {
            let next = if cipher.d() <= super::MAX_POINT_DIM {
                round.partition_image(&self.spaces[i])?
            } else if layout.as_wall(&self.spaces[i]).is_some() {
                Some(round.layer().image(&self.spaces[i]))
            } else {
                return Ok(false);
            };
            if next.as_ref() != Some(&self.spaces[i + 1]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The keyed encryption maps `L(U_1)` onto `L(U_{ℓ+1})`. Checks
    /// `E(v + u) + E(v)` in `U_{ℓ+1}` for every point `v` and basis vector
    /// `u` of `U_1`, which covers all of `U_1` by telescoping.
    pub fn holds_for_keys(&self, cipher: &TbCipher, keys: &RoundKeyTuple) -> Result<bool> {
        self.check_shape(cipher)?;
        let d = cipher.d();
        if d > super::MAX_POINT_DIM {
            return Err(Error::CapExceeded {
                what: "keyed chain check",
                estimate: 1u128 << d,
                limit: 1u128 << super::MAX_POINT_DIM,
            });
        }
        if keys.len() != cipher.rounds().len() {
            return Err(Error::DimensionMismatch {
                expected: cipher.rounds().len(),
                found: keys.len(),
            });
        }
        Ok(self.holds_for_table(&cipher.encryption_table(keys)?))
    }

    /// As [`holds_for_keys`](Self::holds_for_keys) for an explicit
    /// encryption table.
    pub fn holds_for_table(&self, table: &[u32]) -> bool {
        let target = self.last();
        (0..table.len()).all(|v| {
            self.first()
                .basis_words()
                .iter()
                .all(|&u| target.contains_word((table[v ^ u as usize] ^ table[v]) as u128))
        })
    }

    pub fn holds_for_random_keys(
        &self,
        cipher: &TbCipher,
        samples: usize,
        rng: &mut impl Rng,
    ) -> Result<bool> {
        for _ in 0..samples {
            let k = RoundKeyTuple::random(cipher, rng);
            if !self.holds_for_keys(cipher, &k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Follows `U` through every keyless round; `None` as soon as an image
/// partition is not linear.
fn follow(cipher: &TbCipher, start: Subspace) -> Option<PartitionChain> {
    let mut spaces = Vec::with_capacity(cipher.rounds().len() + 1);
    spaces.push(start);
    for round in cipher.rounds() {
        let next = round
            .partition_image(spaces.last().unwrap())
            .expect("dimension checked by caller")?;
        spaces.push(next);
    }
    Some(PartitionChain { spaces })
}

fn walls_mode(cipher: &TbCipher) -> Vec<PartitionChain> {
    let layout = cipher.layout();
    let rounds = cipher.rounds();
    enumerate_proper_walls(layout)
        .into_iter()
        .filter_map(|w| {
            let mut spaces = vec![w.subspace()];
            let mut cur = w;
            for (i, round) in rounds.iter().enumerate() {
                if i + 1 < rounds.len() {
                    cur = round.layer().map_wall(&cur)?;
                    spaces.push(cur.subspace());
                } else {
                    spaces.push(round.layer().image(&cur.subspace()));
                }
            }
            Some(PartitionChain { spaces })
        })
        .collect()
}

fn exhaustive_mode(cipher: &TbCipher, cap: EnumerationCap) -> Result<Vec<PartitionChain>> {
    let d = cipher.d();
    let cap = EnumerationCap::new(cap.max_ambient.min(super::MAX_POINT_DIM));
    cap.check("exhaustive chain search", d, total_subspaces(d, 1..d))?;
    let mut chains = Vec::new();
    for k in 1..d {
        let e = SubspaceEnumerator::new(d, k, cap)?;
        let parts = rayon::current_num_threads() * 16;
        let found: Vec<Vec<PartitionChain>> = e
            .chunks(parts)
            .into_par_iter()
            .map(|(s, t)| e.range(s, t).filter_map(|u| follow(cipher, u)).collect())
            .collect();
        chains.extend(found.into_iter().flatten());
    }
    Ok(chains)
}

/// All chains witnessing a partition trapdoor for `cipher`, in canonical
/// order of their first subspace.
pub fn find_trapdoor_chains(cipher: &TbCipher, search: ChainSearch) -> Result<Vec<PartitionChain>> {
    match search.mode {
        ChainMode::Walls => Ok(walls_mode(cipher)),
        ChainMode::Exhaustive => exhaustive_mode(cipher, search.cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::Round;
    use crate::gf2::{BrickLayout, Wall};
    use crate::mixing::MixingLayer;
    use crate::sbox::SBox;
    use rand::SeedableRng;

    #[test]
    fn rotation_cipher_walls_chains() {
        let c = TbCipher::rotation(3, 3, 3).unwrap();
        let chains = find_trapdoor_chains(&c, ChainSearch::walls()).unwrap();
        assert_eq!(chains.len(), 6);
        let l = c.layout();
        let first = &chains[0];
        let walls: Vec<Vec<usize>> = first
            .spaces
            .iter()
            .map(|s| l.as_wall(s).unwrap().numbers())
            .collect();
        assert_eq!(walls, vec![vec![1], vec![2], vec![3], vec![1]]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for ch in &chains {
            assert!(ch.verify(&c).unwrap());
            assert!(ch.holds_for_random_keys(&c, 20, &mut rng).unwrap());
        }
    }

    #[test]
    fn identity_cipher_every_subspace_chains() {
        let l = BrickLayout::new(2, 2).unwrap();
        let c = TbCipher::new(
            l,
            vec![Round::uniform(SBox::identity(2).unwrap(), MixingLayer::identity(l)).unwrap()],
        )
        .unwrap();
        let chains = find_trapdoor_chains(&c, ChainSearch::exhaustive()).unwrap();
        assert_eq!(chains.len() as u128, total_subspaces(4, 1..4));
        assert!(chains.iter().all(|ch| ch.spaces[0] == ch.spaces[1]));
    }

    #[test]
    fn walls_subset_of_exhaustive() {
        let c = TbCipher::rotation(3, 3, 2).unwrap();
        let walls = find_trapdoor_chains(&c, ChainSearch::walls()).unwrap();
        let all = find_trapdoor_chains(&c, ChainSearch::exhaustive()).unwrap();
        assert!(walls.iter().all(|w| all.contains(w)));
        // GF(8) inversion is APN: only walls survive the bricklayer
        assert_eq!(all.len(), walls.len());
    }

    #[test]
    fn exhaustive_refuses_above_cap() {
        let c = TbCipher::rotation(5, 2, 1).unwrap();
        match find_trapdoor_chains(&c, ChainSearch::exhaustive()) {
            Err(Error::CapExceeded { estimate, .. }) => assert_eq!(estimate, total_subspaces(10, 1..10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verify_rejects_broken_chain() {
        let c = TbCipher::rotation(3, 3, 1).unwrap();
        let l = c.layout();
        let v1 = Wall::from_indices(l, &[0]).unwrap().subspace();
        let bad = PartitionChain { spaces: vec![v1.clone(), v1.clone()] };
        assert!(!bad.verify(&c).unwrap());
        let good = PartitionChain {
            spaces: vec![v1, Wall::from_indices(l, &[1]).unwrap().subspace()],
        };
        assert!(good.verify(&c).unwrap());
        let short = PartitionChain { spaces: vec![Subspace::zero(9)] };
        assert!(short.verify(&c).is_err());
    }
}
