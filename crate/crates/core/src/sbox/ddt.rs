use super::SBox;

/// `counts[a][b] = |{x : f(x+a) + f(x) = b}|`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdTable {
    m: usize,
    counts: Vec<u32>,
}

impl DdTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.counts[(a << self.m) | b]
    }

    pub fn row(&self, a: usize) -> &[u32] {
        let n = 1 << self.m;
        &self.counts[a * n..(a + 1) * n]
    }

    /// Largest entry outside row 0.
    pub fn uniformity(&self) -> u32 {
        let n = 1usize << self.m;
        self.counts[n..].iter().copied().max().unwrap_or(0)
    }
}

/// Smallest derivative image over nonzero directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivativeImage {
    pub size: usize,
    pub direction: usize,
}

impl DerivativeImage {
    /// Relaxed condition: every nonzero derivative image exceeds `2^(m-r)`.
    pub fn exceeds(&self, m: usize, r: usize) -> bool {
        r <= m && self.size > 1 << (m - r)
    }
}

impl SBox {
    pub fn ddt(&self) -> DdTable {
        let n = self.len();
        let t = self.table();
        let mut counts = vec![0u32; n * n];
        for a in 0..n {
            let row = &mut counts[a * n..(a + 1) * n];
            for x in 0..n {
                row[(t[x ^ a] ^ t[x]) as usize] += 1;
            }
        }
        DdTable { m: self.m(), counts }
    }

    /// `max_{a != 0, b} δ(a, b)`.
    pub fn differential_uniformity(&self) -> u32 {
        let n = self.len();
        let t = self.table();
        let mut row = vec![0u32; n];
        let mut best = 0;
        for a in 1..n {
            row.iter_mut().for_each(|c| *c = 0);
            for x in 0..n {
                let c = &mut row[(t[x ^ a] ^ t[x]) as usize];
                *c += 1;
                best = best.max(*c);
            }
        }
        best
    }

    /// Smallest `r` with `δ <= 2^r`.
    pub fn uniformity_exponent(&self) -> usize {
        let delta = self.differential_uniformity();
        delta.next_power_of_two().trailing_zeros() as usize
    }

    pub fn derivative_image_size(&self, u: usize) -> usize {
        let n = self.len();
        let t = self.table();
        let mut seen = vec![false; n];
        let mut size = 0;
        for x in 0..n {
            let y = (t[x ^ u] ^ t[x]) as usize;
            if !seen[y] {
                seen[y] = true;
                size += 1;
            }
        }
        size
    }

    pub fn min_derivative_image(&self) -> DerivativeImage {
        (1..self.len())
            .map(|u| DerivativeImage {
                size: self.derivative_image_size(u),
                direction: u,
            })
            .min_by_key(|d| (d.size, d.direction))
            .expect("m >= 1")
    }

    /// Smallest `r >= 1` such that every nonzero derivative image is larger
    /// than `2^(m-r)`, or `None` if even `r = m` fails.
    pub fn relaxed_uniformity_exponent(&self) -> Option<usize> {
        let img = self.min_derivative_image();
        (1..=self.m()).find(|&r| img.exceeds(self.m(), r))
    }
}
