//! Byte substitution box over GF(2^8): multiplicative inverse (with 0
//! mapping to 0) followed by an affine transform.
//!
//! The box is built at runtime for a caller-chosen reduction polynomial.
//! The default modulus `x^8 + x^4 + x^2 + x + 1` (0x117) is reducible, it
//! factors as `(x^4 + x^3 + 1)(x^4 + x^3 + x^2 + x + 1)`, so 30 nonzero
//! bytes have no inverse and the construction cannot be a bijection.
//! [`Sbox::build_or_fallback`] detects this exhaustively and falls back to
//! the irreducible 0x11B; the envelope records which modulus was used so
//! the receiver rebuilds the same box.

use thiserror::Error;

/// Default reduction modulus, x^8 + x^4 + x^2 + x + 1. Reducible; kept as
/// the first candidate so the fallback path is exercised honestly.
pub const POLY_PRIMARY: u16 = 0x117;

/// Fallback modulus, x^8 + x^4 + x^3 + x + 1 (the AES field polynomial).
pub const POLY_AES: u16 = 0x11B;

/// Rows of the affine matrix, most significant output bit first. Each row is
/// a cyclic shift of 1111_1000.
const AFFINE_ROWS: [u8; 8] = [0xF8, 0x7C, 0x3E, 0x1F, 0x8F, 0xC7, 0xE3, 0xF1];

/// Constant column added after the matrix product.
const AFFINE_CONST: u8 = 0x63;

#[derive(Debug, Error, PartialEq)]
pub enum SboxError {
    #[error("reduction polynomial {0:#05x} does not have degree 8")]
    BadDegree(u16),
    #[error("{0:#05x} is reducible: GF(2^8) inversion mod it is not a bijection")]
    NotBijective(u16),
}

/// Carry-less multiply of `a` and `b` reduced by `poly` (degree-8 modulus
/// with the leading bit included, e.g. 0x11B).
pub fn gf_mul(mut a: u8, mut b: u8, poly: u16) -> u8 {
    debug_assert!((0x100..=0x1ff).contains(&poly));
    let low = (poly & 0xff) as u8;
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= low;
        }
        b >>= 1;
    }
    acc
}

/// Affine transform applied after inversion: matrix product with
/// [`AFFINE_ROWS`] plus the 0x63 column.
pub fn affine(w: u8) -> u8 {
    let mut out = 0u8;
    for (i, row) in AFFINE_ROWS.iter().enumerate() {
        let bit = ((row & w).count_ones() & 1) as u8;
        out |= bit << (7 - i);
    }
    out ^ AFFINE_CONST
}

/// Forward and inverse substitution tables for one reduction modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Sbox {
    forward: [u8; 256],
    inverse: [u8; 256],
    poly: u16,
}

impl Sbox {
    /// Build the box for `poly`, failing if the modulus does not yield a
    /// field (every nonzero byte must have a multiplicative inverse).
    pub fn build(poly: u16) -> Result<Self, SboxError> {
        if !(0x100..=0x1ff).contains(&poly) {
            return Err(SboxError::BadDegree(poly));
        }
        let inv = inverse_table(poly).ok_or(SboxError::NotBijective(poly))?;

        let mut forward = [0u8; 256];
        let mut inverse = [0u8; 256];
        let mut seen = [false; 256];
        for b in 0..=255u8 {
            let s = affine(inv[b as usize]);
            forward[b as usize] = s;
            inverse[s as usize] = b;
            if std::mem::replace(&mut seen[s as usize], true) {
                // Unreachable when inversion is a bijection (the affine map
                // is invertible), but cheap to keep as a hard check.
                return Err(SboxError::NotBijective(poly));
            }
        }
        Ok(Self {
            forward,
            inverse,
            poly,
        })
    }

    /// Build with `preferred`; on a reducibility failure fall back to
    /// [`POLY_AES`]. Inspect [`Sbox::poly`] to learn which one was used.
    pub fn build_or_fallback(preferred: u16) -> Result<Self, SboxError> {
        match Self::build(preferred) {
            Ok(sbox) => Ok(sbox),
            Err(SboxError::NotBijective(_)) => {
                Ok(Self::build(POLY_AES).expect("0x11b is irreducible"))
            }
            Err(e) => Err(e),
        }
    }

    pub fn apply(&self, b: u8) -> u8 {
        self.forward[b as usize]
    }

    pub fn invert(&self, b: u8) -> u8 {
        self.inverse[b as usize]
    }

    /// The modulus the tables were actually built with.
    pub fn poly(&self) -> u16 {
        self.poly
    }
}

// Multiplicative inverse of every byte (0 maps to 0), or None if some
// nonzero byte has no inverse under `poly`.
fn inverse_table(poly: u16) -> Option<[u8; 256]> {
    let mut table = [0u8; 256];
    for a in 1..=255u8 {
        let inv = (1..=255u8).find(|&b| gf_mul(a, b, poly) == 1)?;
        table[a as usize] = inv;
    }
    Some(table)
}
