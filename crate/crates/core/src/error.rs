use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} out of range (1..=128)")]
    AmbientOutOfRange(usize),

    #[error("invalid brick layout m={m}, b={b}: {reason}")]
    InvalidLayout { m: usize, b: usize, reason: &'static str },

    #[error("{what} refused: estimated {estimate} items exceeds the configured limit ({limit})")]
    CapExceeded {
        what: &'static str,
        estimate: u128,
        limit: u128,
    },

    #[error("table is not a bijection on {0} points")]
    NotBijective(usize),

    #[error("table length {0} is not 2^m for any supported m")]
    BadTableLength(usize),

    #[error("matrix is singular (rank {rank} < {dim})")]
    Singular { rank: usize, dim: usize },

    #[error("no irreducible modulus registered for GF(2^{0})")]
    UnsupportedFieldDegree(usize),

    #[error("anti-invariance order r={r} out of range for m={m} (need 1 <= r < m)")]
    OrderOutOfRange { r: usize, m: usize },

    #[error("group is not transitive: orbit of 0 has {orbit} of {degree} points")]
    Intransitive { orbit: usize, degree: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
