//! Arithmetic in GF(2^m) for the small degrees used by the builtin S-boxes.

use crate::error::{Error, Result};

/// Irreducible modulus (including the leading term) registered for degree `m`.
pub fn modulus(m: usize) -> Result<u32> {
    Ok(match m {
        2 => 0b111,         // x^2 + x + 1
        3 => 0b1011,        // x^3 + x + 1
        4 => 0b1_0011,      // x^4 + x + 1
        5 => 0b10_0101,     // x^5 + x^2 + 1
        6 => 0b100_0011,    // x^6 + x + 1
        7 => 0b1000_0011,   // x^7 + x + 1
        8 => 0b1_0001_1011, // x^8 + x^4 + x^3 + x + 1 (AES)
        _ => return Err(Error::UnsupportedFieldDegree(m)),
    })
}

pub fn gf_mul(mut a: u32, mut b: u32, m: usize, modulus: u32) -> u32 {
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

pub fn gf_pow(a: u32, mut e: u64, m: usize, modulus: u32) -> u32 {
    let mut base = a;
    let mut acc = 1;
    while e != 0 {
        if e & 1 == 1 {
            acc = gf_mul(acc, base, m, modulus);
        }
        base = gf_mul(base, base, m, modulus);
        e >>= 1;
    }
    acc
}

/// Table of `x -> x^(2^m - 2)` (inversion, with 0 -> 0).
pub fn inversion_table(m: usize) -> Result<Vec<u16>> {
    let p = modulus(m)?;
    let e = (1u64 << m) - 2;
    Ok((0..1u32 << m)
        .map(|x| if x == 0 { 0 } else { gf_pow(x, e, m, p) as u16 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_multiply_to_one() {
        for m in 2..=8 {
            let p = modulus(m).unwrap();
            let t = inversion_table(m).unwrap();
            for x in 1..(1u32 << m) {
                assert_eq!(gf_mul(x, t[x as usize] as u32, m, p), 1, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn aes_inverse_spot_value() {
        // 0x53 * 0xca = 1 in the AES field
        assert_eq!(inversion_table(8).unwrap()[0x53], 0xca);
    }

    #[test]
    fn unsupported_degree() {
        assert_eq!(modulus(10), Err(Error::UnsupportedFieldDegree(10)));
    }
}
