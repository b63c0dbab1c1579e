//! Permutation groups on `(F_2)^d` at desk scale: block systems, primitivity
//! and invariant linear partitions of groups generated by cipher maps.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cipher::{RoundKeyTuple, TbCipher};
use crate::error::{Error, Result};
use crate::gf2::{total_subspaces, EnumerationCap, Subspace, SubspaceEnumerator};

/// Largest supported `d`; permutations act on `2^d` points.
pub const MAX_GROUP_DIM: usize = 16;

/// What a computation on sampled generators does and does not prove.
pub const SOUNDNESS_NOTE: &str = "generators span a subgroup H of the group under study: \
H primitive implies the full group is primitive; H imprimitive is evidence only, \
confirmed when the witness partition is invariant under additional random encryptions";

/// A permutation of `0..n` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            let y = y as usize;
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotBijective(n));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u32).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Perm) -> Result<Perm> {
        if next.degree() != self.degree() {
            return Err(Error::DimensionMismatch {
                expected: self.degree(),
                found: next.degree(),
            });
        }
        Ok(Perm {
            images: self.images.iter().map(|&y| next.images[y as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Perm { images: inv }
    }
}

/// Labelled generators of a permutation group.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    gens: Vec<Perm>,
    labels: Vec<String>,
}

impl GeneratorSet {
    pub fn new(gens: Vec<Perm>, labels: Vec<String>) -> Result<Self> {
        let first = gens
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty generator set".into()))?;
        if labels.len() != gens.len() {
            return Err(Error::DimensionMismatch {
                expected: gens.len(),
                found: labels.len(),
            });
        }
        if let Some(g) = gens.iter().find(|g| g.degree() != first.degree()) {
            return Err(Error::DimensionMismatch {
                expected: first.degree(),
                found: g.degree(),
            });
        }
        Ok(Self { gens, labels })
    }

    /// Generators labelled by position.
    pub fn unlabelled(gens: Vec<Perm>) -> Result<Self> {
        let labels = (0..gens.len()).map(|i| format!("g{i}")).collect();
        Self::new(gens, labels)
    }

    /// The `d` basis translations of `(F_2)^d`; they generate `T(V)`.
    pub fn translations(d: usize) -> Result<Self> {
        check_group_dim(d)?;
        let n = 1u32 << d;
        let gens = (0..d)
            .map(|j| Perm {
                images: (0..n).map(|x| x ^ (1 << j)).collect(),
            })
            .collect();
        let labels = (0..d).map(|j| format!("x -> x + e{j}")).collect();
        Self::new(gens, labels)
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.gens[0].degree()
    }

    pub fn orbit_of_zero(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for g in &self.gens {
                let y = g.apply(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count
    }

    pub fn check_transitive(&self) -> Result<()> {
        let orbit = self.orbit_of_zero();
        if orbit != self.degree() {
            return Err(Error::Intransitive {
                orbit,
                degree: self.degree(),
            });
        }
        Ok(())
    }
}

/// A partition of the points given by a block-id colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSystem {
    block_of: Vec<u32>,
    count: usize,
}

impl BlockSystem {
    /// Relabels arbitrary ids so that blocks are numbered by first point.
    fn from_roots(roots: &[u32]) -> Self {
        let mut id = vec![u32::MAX; roots.len()];
        let mut count = 0u32;
        let block_of = roots
            .iter()
            .map(|&r| {
                let slot = &mut id[r as usize];
                if *slot == u32::MAX {
                    *slot = count;
                    count += 1;
                }
                *slot
            })
            .collect();
        Self {
            block_of,
            count: count as usize,
        }
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, x: u32) -> u32 {
        self.block_of[x as usize]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Size of the block holding `0`; all blocks of an invariant partition
    /// of a transitive group have this size.
    pub fn block_size(&self) -> usize {
        self.block_of.iter().filter(|&&b| b == 0).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.count == 1 || self.count == self.degree()
    }

    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.count];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(x as u32);
        }
        out
    }

    /// Each generator maps every block onto a block.
    pub fn is_invariant_under(&self, g: &GeneratorSet) -> bool {
        g.degree() == self.degree() && g.gens().iter().all(|p| self.is_invariant_under_perm(p))
    }

    pub fn is_invariant_under_perm(&self, p: &Perm) -> bool {
        // block b -> block of the image of its first point; sizes then force
        // equality
        let mut target = vec![u32::MAX; self.count];
        for (x, &b) in self.block_of.iter().enumerate() {
            let t = self.block_of[p.apply(x as u32) as usize];
            let slot = &mut target[b as usize];
            if *slot == u32::MAX {
                *slot = t;
            } else if *slot != t {
                return false;
            }
        }
        true
    }

    /// Every block lies inside one coset of `u`.
    pub fn refines(&self, u: &Subspace) -> bool {
        let mut rep = vec![u128::MAX; self.count];
        self.block_of.iter().enumerate().all(|(x, &b)| {
            let slot = &mut rep[b as usize];
            if *slot == u128::MAX {
                *slot = x as u128;
                true
            } else {
                u.contains_word(*slot ^ x as u128)
            }
        })
    }

    /// The subspace `U` when the blocks are exactly the cosets of `U`.
    pub fn as_linear(&self, d: usize) -> Option<Subspace> {
        if self.degree() != 1 << d {
            return None;
        }
        let zero: Vec<u128> = (0..self.degree() as u128)
            .filter(|&x| self.block_of[x as usize] == 0)
            .collect();
        let u = Subspace::span_words(zero.iter().copied(), d);
        if u.dim() >= 64 || 1u128 << u.dim() != zero.len() as u128 || !self.refines(&u) {
            return None;
        }
        (self.count as u128 * zero.len() as u128 == self.degree() as u128).then_some(u)
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merged root, or `None` if already together.
    fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return None;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        Some((a, b))
    }
}

fn minimal_block_unchecked(g: &GeneratorSet, v: u32) -> BlockSystem {
    let n = g.degree();
    let mut uf = UnionFind::new(n);
    let mut queue = Vec::new();
    if let Some(pair) = uf.union(0, v) {
        queue.push(pair);
    }
    while let Some((a, b)) = queue.pop() {
        for p in g.gens() {
            if let Some(pair) = uf.union(p.apply(a), p.apply(b)) {
                queue.push(pair);
            }
        }
    }
    let roots: Vec<u32> = (0..n as u32).map(|x| uf.find(x)).collect();
    BlockSystem::from_roots(&roots)
}

/// Finest `G`-invariant partition with `0` and `v` in one block.
pub fn minimal_block(g: &GeneratorSet, v: u32) -> Result<BlockSystem> {
    if v == 0 || v as usize >= g.degree() {
        return Err(Error::InvalidArgument(format!(
            "seed point {v} must be nonzero and below {}",
            g.degree()
        )));
    }
    g.check_transitive()?;
    Ok(minimal_block_unchecked(g, v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitivityResult {
    pub primitive: bool,
    /// First seed `v` (in increasing order) with a nontrivial system.
    pub witness: Option<(u32, BlockSystem)>,
}

pub fn is_primitive(g: &GeneratorSet) -> Result<PrimitivityResult> {
    g.check_transitive()?;
    let witness = (1..g.degree() as u32).into_par_iter().find_map_first(|v| {
        let bs = minimal_block_unchecked(g, v);
        (!bs.is_trivial()).then_some((v, bs))
    });
    Ok(PrimitivityResult {
        primitive: witness.is_none(),
        witness,
    })
}

fn check_group_dim(d: usize) -> Result<()> {
    if d > MAX_GROUP_DIM {
        return Err(Error::CapExceeded {
            what: "permutation group degree",
            estimate: 1u128 << d,
            limit: 1u128 << MAX_GROUP_DIM,
        });
    }
    Ok(())
}

fn encryption_perm(c: &TbCipher, keys: &RoundKeyTuple) -> Result<Perm> {
    Ok(Perm {
        images: c.encryption_table(keys)?,
    })
}

/// `τ_K` for the zero tuple and for every tuple that sets one round key to
/// one basis vector: `ℓ·d + 1` generators of a subgroup of `Γ_ind`.
pub fn sample_ind_generators(c: &TbCipher) -> Result<GeneratorSet> {
    let d = c.d();
    check_group_dim(d)?;
    let l = c.rounds().len();
    let mut gens = vec![encryption_perm(c, &RoundKeyTuple::zero(l))?];
    let mut labels = vec!["K = 0".to_string()];
    for h in 0..l {
        for j in 0..d {
            let mut keys = vec![0u128; l];
            keys[h] = 1 << j;
            gens.push(encryption_perm(c, &RoundKeyTuple::from_words(keys))?);
            labels.push(format!("k{} = e{j}", h + 1));
        }
    }
    GeneratorSet::new(gens, labels)
}

/// Single keyed rounds `τ_{h,k}` for `k` zero or a basis vector:
/// `ℓ·(d + 1)` generators of a subgroup of `Γ_∞`.
pub fn round_generators(c: &TbCipher) -> Result<GeneratorSet> {
    let d = c.d();
    check_group_dim(d)?;
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for h in 0..c.rounds().len() {
        for key in std::iter::once(0u128).chain((0..d).map(|j| 1u128 << j)) {
            gens.push(Perm {
                images: c.round_table(h, key)?,
            });
            labels.push(if key == 0 {
                format!("round {} k = 0", h + 1)
            } else {
                format!("round {} k = e{}", h + 1, key.trailing_zeros())
            });
        }
    }
    GeneratorSet::new(gens, labels)
}

/// `L(U)` is invariant under `samples` further random encryptions.
pub fn linear_partition_holds_for_random_keys(
    c: &TbCipher,
    u: &Subspace,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<bool> {
    for _ in 0..samples {
        let keys = RoundKeyTuple::random(c, rng);
        let table = c.encryption_table(&keys)?;
        if crate::cipher::partition_image(&table, u)?.as_ref() != Some(u) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f` maps `L(U)` onto itself; `z` is the preimage of `0`. Rejects as soon
/// as one difference leaves `U`.
fn fixes_linear_partition(u: &Subspace, z: u128, f: impl Fn(u128) -> u128) -> bool {
    if !u.elements().all(|x| u.contains_word(f(z ^ x))) {
        return false;
    }
    crate::cipher::LinearPartition(u.clone()).representatives().all(|rep| {
        let base = f(rep);
        u.elements().skip(1).all(|x| u.contains_word(f(rep ^ x) ^ base))
    })
}

/// All nontrivial `U` with `L(U)` invariant under every generator, each
/// confirmed by the minimal block system of a basis vector refining
/// `L(U)`.
pub fn invariant_linear_partition_search(g: &GeneratorSet, cap: EnumerationCap) -> Result<Vec<Subspace>> {
    let n = g.degree();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidArgument(format!("degree {n} is not 2^d")));
    }
    let d = n.trailing_zeros() as usize;
    cap.check("invariant linear partition search", d, total_subspaces(d, 1..d))?;
    g.check_transitive()?;
    let zero_pre: Vec<u128> = g
        .gens()
        .iter()
        .map(|p| p.inverse().apply(0) as u128)
        .collect();
    let invariant = |u: &Subspace| {
        g.gens()
            .iter()
            .zip(&zero_pre)
            .all(|(p, &z)| fixes_linear_partition(u, z, |x| p.apply(x as u32) as u128))
    };
    let mut out = Vec::new();
    for k in 1..d {
        let e = SubspaceEnumerator::new(d, k, cap)?;
        let found: Vec<Vec<Subspace>> = e
            .chunks(rayon::current_num_threads() * 8)
            .into_par_iter()
            .map(|(s, t)| e.range(s, t).filter(|u| invariant(u)).collect())
            .collect();
        out.extend(found.into_iter().flatten());
    }
    out.retain(|u| minimal_block_unchecked(g, u.basis_words()[0] as u32).refines(u));
    Ok(out)
}
