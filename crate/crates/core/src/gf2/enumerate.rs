use super::Subspace;
use crate::error::{Error, Result};

/// Number of `k`-dimensional subspaces of `(F_2)^d`, saturating at
/// `u128::MAX`. Uses `[d,k] = 2^k [d-1,k] + [d-1,k-1]`.
pub fn gaussian_binomial(d: usize, k: usize) -> u128 {
    if k > d {
        return 0;
    }
    // row[j] = [n, j] for the current n
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for n in 1..=d {
        for j in (1..=k.min(n)).rev() {
            let scaled = if j >= 128 {
                if row[j] == 0 {
                    0
                } else {
                    u128::MAX
                }
            } else {
                row[j].saturating_mul(1u128 << j)
            };
            row[j] = scaled.saturating_add(row[j - 1]);
        }
    }
    row[k]
}

/// Number of subspaces of `(F_2)^d` with dimension in `dims`.
pub fn total_subspaces(d: usize, dims: impl IntoIterator<Item = usize>) -> u128 {
    dims.into_iter()
        .map(|k| gaussian_binomial(d, k))
        .fold(0u128, u128::saturating_add)
}

/// Refuses exhaustive subspace enumeration above a given ambient dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_ambient: usize,
}

impl EnumerationCap {
    pub const DEFAULT_MAX_AMBIENT: usize = 10;

    pub fn new(max_ambient: usize) -> Self {
        Self { max_ambient }
    }

    pub fn check(&self, what: &'static str, d: usize, estimate: u128) -> Result<()> {
        if d > self.max_ambient {
            return Err(Error::CapExceeded {
                what,
                estimate,
                limit: total_subspaces(self.max_ambient, 0..=self.max_ambient),
            });
        }
        Ok(())
    }
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MAX_AMBIENT)
    }
}

/// Direct generator of all `k`-dimensional subspaces of `(F_2)^d` in RREF.
///
/// Subspaces are ordered by pivot set (lexicographic on increasing pivot
/// positions), then by the integer formed from the free entries. Each pivot
/// set contributes `2^free` matrices, so any contiguous index range can be
/// reached without generating its predecessors.
#[derive(Clone, Debug)]
pub struct SubspaceEnumerator {
    d: usize,
    k: usize,
    len: u64,
}

impl SubspaceEnumerator {
    pub fn new(d: usize, k: usize, cap: EnumerationCap) -> Result<Self> {
        if d == 0 || d > super::MAX_DIM {
            return Err(Error::AmbientOutOfRange(d));
        }
        if k > d {
            return Err(Error::InvalidArgument(format!(
                "subspace dimension {k} exceeds ambient {d}"
            )));
        }
        let count = gaussian_binomial(d, k);
        cap.check("subspace enumeration", d, count)?;
        let len = u64::try_from(count).map_err(|_| Error::CapExceeded {
            what: "subspace enumeration",
            estimate: count,
            limit: u64::MAX as u128,
        })?;
        Ok(Self { d, k, len })
    }

    pub fn ambient(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> SubspaceIter {
        self.range(0, self.len)
    }

    /// Subspaces with canonical index in `[start, end)`.
    pub fn range(&self, start: u64, end: u64) -> SubspaceIter {
        let end = end.min(self.len);
        let start = start.min(end);
        let mut pivots: Vec<usize> = (0..self.k).collect();
        let mut skip = start;
        let mut exhausted = false;
        loop {
            let c = 1u64 << free_count(self.d, &pivots);
            if skip < c || !next_combination(&mut pivots, self.d) {
                if skip >= c {
                    exhausted = true;
                }
                break;
            }
            skip -= c;
        }
        let mut it = SubspaceIter {
            d: self.d,
            pivots,
            free: Vec::new(),
            fill: skip,
            remaining: end - start,
        };
        if exhausted {
            it.remaining = 0;
        }
        it.refresh_free();
        it
    }

    /// Splits the index space into at most `parts` contiguous ranges.
    pub fn chunks(&self, parts: usize) -> Vec<(u64, u64)> {
        let parts = parts.max(1) as u64;
        let step = self.len.div_ceil(parts).max(1);
        (0..self.len)
            .step_by(step as usize)
            .map(|s| (s, (s + step).min(self.len)))
            .collect()
    }
}

fn free_count(d: usize, pivots: &[usize]) -> u32 {
    // row i may use columns > p_i that are not pivots
    pivots
        .iter()
        .enumerate()
        .map(|(i, &p)| ((d - p - 1) - (pivots.len() - i - 1)) as u32)
        .sum()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub struct SubspaceIter {
    d: usize,
    pivots: Vec<usize>,
    /// (row, column) of each free entry, in fill-bit order
    free: Vec<(usize, usize)>,
    fill: u64,
    remaining: u64,
}

impl SubspaceIter {
    fn refresh_free(&mut self) {
        self.free.clear();
        let mut is_pivot = vec![false; self.d];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        for (row, &p) in self.pivots.iter().enumerate() {
            for (col, &piv) in is_pivot.iter().enumerate().skip(p + 1) {
                if !piv {
                    self.free.push((row, col));
                }
            }
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.remaining == 0 {
            return None;
        }
        if self.free.len() < 64 && self.fill >> self.free.len() != 0 {
            next_combination(&mut self.pivots, self.d);
            self.refresh_free();
            self.fill = 0;
        }
        let mut rows: Vec<u128> = self.pivots.iter().map(|&p| 1u128 << p).collect();
        let mut f = self.fill;
        for &(row, col) in &self.free {
            if f & 1 == 1 {
                rows[row] |= 1u128 << col;
            }
            f >>= 1;
        }
        self.fill += 1;
        self.remaining -= 1;
        Some(Subspace::from_rref_unchecked(rows, self.d))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}
