//! Auditing translation-based block ciphers for partition-based trapdoors.
//!
//! The crate models a cipher as rounds of bricklayer substitution, a linear
//! mixing layer and round-key addition, and decides whether some pair of
//! nontrivial partitions of the message space is carried onto each other by
//! every encryption function with independent round keys.
//!
//! * [`gf2`]: vectors, matrices and canonical subspaces over F_2, walls.
//! * [`sbox`]: differential uniformity, derivative images, linear components
//!   and strong anti-invariance of a single brick.
//! * [`mixing`]: proper / strongly proper layers and layer families.
//! * [`cipher`]: the cipher model, linear-partition mapping, trapdoor chain
//!   search and the audit.
//! * [`group`]: block systems and primitivity for sampled generator sets.
//! * [`specfile`] and [`report`]: the JSON cipher description and report.

pub mod cipher;
pub mod error;
pub mod field;
pub mod gf2;
pub mod group;
pub(crate) mod hex;
pub mod mixing;
pub mod report;
pub mod sbox;
pub mod specfile;

pub use error::{Error, Result};
