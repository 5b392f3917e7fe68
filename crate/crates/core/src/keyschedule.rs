//! Plaintext-derived key schedule.
//!
//! The SHA-512 digest of the plaintext, written as 128 lowercase hex digits,
//! is sliced into four 48-bit words that seed the chaotic maps. Seeds are
//! scaled into the unit interval by 2^-48; degenerate values that would pin
//! a map on a fixed point are replaced by the same quantum.

use sha2::{Digest, Sha512};
use thiserror::Error;

/// Number of fractional bits retained from each hex slice.
pub const SEED_BITS: u32 = 48;

/// Smallest representable seed increment, 2^-48. Also the substitute for
/// degenerate seeds.
pub const SEED_QUANTUM: f64 = 1.0 / ((1u64 << SEED_BITS) as f64);

#[derive(Debug, Error, PartialEq)]
pub enum KeyError {
    #[error("empty plaintext")]
    EmptyPlaintext,
    #[error("bit index {index} out of range for a {bits}-bit plaintext")]
    BitIndexOutOfRange { index: u64, bits: u64 },
}

/// Chaotic-map seeds plus the digest they came from. The digest travels with
/// the ciphertext so the receiver can rebuild the same seeds and, after
/// decrypting, verify the recovered plaintext.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    pub digest: [u8; 64],
    /// Hex digits 0..12 of the digest as an integer.
    pub kappa1: u64,
    /// Hex digits 116..128.
    pub kappa2: u64,
    /// Hex digits 12..24.
    pub kappa3: u64,
    /// Hex digits 52..64.
    pub kappa4: u64,
    /// PWLCM seed kappa1 / 2^48, in (0, 1).
    pub y0: f64,
    /// Chebyshev seed kappa2 / 2^48, in (0, 1).
    pub x0: f64,
    /// Logistic-sine control parameter 4 * kappa3 / 2^48, in [0, 4).
    pub r: f64,
    /// Logistic-sine seed kappa4 / 2^48, in (0, 1).
    pub z0: f64,
}

impl KeyMaterial {
    /// Hash `plaintext` and slice the digest into seeds.
    pub fn derive(plaintext: &[u8]) -> Result<Self, KeyError> {
        if plaintext.is_empty() {
            return Err(KeyError::EmptyPlaintext);
        }
        let digest: [u8; 64] = Sha512::digest(plaintext).into();
        Ok(Self::from_digest(&digest))
    }

    /// Rebuild seeds from a digest recovered from a cipher envelope.
    pub fn from_digest(digest: &[u8; 64]) -> Self {
        let hex = digest_hex(digest);
        let kappa1 = hex_word(&hex[0..12]);
        let kappa3 = hex_word(&hex[12..24]);
        let kappa4 = hex_word(&hex[52..64]);
        let kappa2 = hex_word(&hex[116..128]);

        Self {
            digest: *digest,
            kappa1,
            kappa2,
            kappa3,
            kappa4,
            y0: seed_from(kappa1),
            x0: seed_from(kappa2),
            r: 4.0 * (kappa3 as f64 * SEED_QUANTUM),
            z0: seed_from(kappa4),
        }
    }
}

/// Derive keys for `plaintext` and for a copy with the bit at `bit_index`
/// flipped (byte `bit_index / 8`, LSB-first within the byte). Used by the
/// key-sensitivity experiments.
pub fn key_sensitivity_pair(
    plaintext: &[u8],
    bit_index: u64,
) -> Result<(KeyMaterial, KeyMaterial), KeyError> {
    let bits = plaintext.len() as u64 * 8;
    if bit_index >= bits {
        return Err(KeyError::BitIndexOutOfRange {
            index: bit_index,
            bits,
        });
    }
    let original = KeyMaterial::derive(plaintext)?;
    let mut flipped = plaintext.to_vec();
    flipped[(bit_index / 8) as usize] ^= 1 << (bit_index % 8);
    let perturbed = KeyMaterial::derive(&flipped)?;
    Ok((original, perturbed))
}

/// Lowercase hex encoding of a SHA-512 digest, 128 characters.
pub fn digest_hex(digest: &[u8; 64]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(128);
    for b in digest {
        write!(s, "{b:02x}").expect("writing to String cannot fail");
    }
    s
}

fn hex_word(slice: &str) -> u64 {
    debug_assert_eq!(slice.len(), 12);
    u64::from_str_radix(slice, 16).expect("digest hex is always valid")
}

// Keep seeds strictly inside (0, 1). A zero seed pins PWLCM and the
// logistic-sine map at 0, and sends the Chebyshev map straight to its fixed
// point at 1 (T4(0) = 1 = T4(1)). A 48-bit word cannot scale to 1.0, but the
// guard covers it anyway.
fn seed_from(kappa: u64) -> f64 {
    let v = kappa as f64 * SEED_QUANTUM;
    if v > 0.0 && v < 1.0 {
        v
    } else {
        SEED_QUANTUM
    }
}
