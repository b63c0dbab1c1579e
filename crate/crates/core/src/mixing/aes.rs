use super::MixingLayer;
use crate::field::gf_mul;
use crate::gf2::{BitMatrix, BrickLayout};

const AES_MODULUS: u32 = 0x11b;

// State byte (row r, column c) is brick 4r + c; bit j of a byte is the
// coefficient of x^j.
fn layout() -> BrickLayout {
    BrickLayout::new(8, 16).expect("16 bytes")
}

fn byte(v: u128, r: usize, c: usize) -> u32 {
    (v >> (8 * (4 * r + c)) & 0xff) as u32
}

fn put(r: usize, c: usize, x: u32) -> u128 {
    (x as u128) << (8 * (4 * r + c))
}

/// Row `r` rotates left by `r` positions.
pub(super) fn shift_rows() -> MixingLayer {
    let m = BitMatrix::from_linear_fn(128, 128, |v| {
        let mut out = 0;
        for r in 0..4 {
            for c in 0..4 {
                out |= put(r, c, byte(v, r, (c + r) % 4));
            }
        }
        out
    });
    MixingLayer::new(m, layout()).expect("permutation matrix")
}

const MC: [[u32; 4]; 4] = [[2, 3, 1, 1], [1, 2, 3, 1], [1, 1, 2, 3], [3, 1, 1, 2]];

pub(super) fn mix_columns() -> MixingLayer {
    let m = BitMatrix::from_linear_fn(128, 128, |v| {
        let mut out = 0;
        for c in 0..4 {
            for (r, coeffs) in MC.iter().enumerate() {
                let x = (0..4).fold(0, |acc, k| {
                    acc ^ gf_mul(coeffs[k], byte(v, k, c), 8, AES_MODULUS)
                });
                out |= put(r, c, x);
            }
        }
        out
    });
    MixingLayer::new(m, layout()).expect("MixColumns is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_word(s: [[u8; 4]; 4]) -> u128 {
        let mut w = 0;
        for r in 0..4 {
            for c in 0..4 {
                w |= put(r, c, s[r][c] as u32);
            }
        }
        w
    }

    #[test]
    fn mix_columns_known_vector() {
        // FIPS-197 style column test vector: db 13 53 45 -> 8e 4d a1 bc
        let mut s = [[0u8; 4]; 4];
        let col_in = [0xdb, 0x13, 0x53, 0x45];
        let col_out = [0x8e, 0x4d, 0xa1, 0xbc];
        for r in 0..4 {
            s[r][0] = col_in[r];
        }
        let out = mix_columns().apply_word(state_word(s));
        for r in 0..4 {
            assert_eq!(byte(out, r, 0), col_out[r]);
            assert_eq!(byte(out, r, 1), 0);
        }
    }

    #[test]
    fn shift_rows_moves_diagonal_to_first_column() {
        let mut s = [[0u8; 4]; 4];
        for i in 0..4 {
            s[i][i] = 0x11 * (i as u8 + 1);
        }
        let out = shift_rows().apply_word(state_word(s));
        for r in 0..4 {
            assert_eq!(byte(out, r, 0), 0x11 * (r as u32 + 1));
        }
    }
}
