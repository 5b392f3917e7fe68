//! The confusion and diffusion engine: row permutation driven by PWLCM,
//! column permutation driven by the Chebyshev map, keystream XOR driven by
//! the logistic-sine map, and a final S-box pass. Decryption applies the
//! exact inverses in reverse order.

use thiserror::Error;

use crate::chaos::{ChaoticMap, ChebyshevState, LogisticSineState, PwlcmState};
use crate::keyschedule::KeyMaterial;
use crate::sbox::Sbox;

/// PWLCM control parameter. The key schedule does not produce one, so the
/// cipher fixes it; any value in (0, 0.5) away from the endpoints behaves
/// equivalently.
pub const PWLCM_LAMBDA: f64 = 0.4;

/// Scale factor applied to keystream values before the mod-256 reduction.
pub const KEYSTREAM_SCALE: f64 = 1e14;

#[derive(Debug, Error, PartialEq)]
pub enum CipherError {
    #[error("matrix dimensions must be at least 1x1, got {rows}x{cols}")]
    BadDims { rows: usize, cols: usize },
    #[error("data length {len} does not match {rows}x{cols}")]
    LengthMismatch {
        len: usize,
        rows: usize,
        cols: usize,
    },
}

/// Row-major byte grid. Rows is the A dimension, cols the B dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl ByteMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self, CipherError> {
        if rows == 0 || cols == 0 {
            return Err(CipherError::BadDims { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(CipherError::LengthMismatch {
                len: data.len(),
                rows,
                cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeroed(rows: usize, cols: usize) -> Result<Self, CipherError> {
        Self::new(rows, cols, vec![0; rows.checked_mul(cols).unwrap_or(0)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }
}

/// Argsort of `seq` ascending; equal values keep their original order, so
/// the result is always a bijection on 0..len.
pub fn permutation_from_sequence(seq: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..seq.len()).collect();
    idx.sort_by(|&a, &b| seq[a].total_cmp(&seq[b]));
    idx
}

/// Inverse of a permutation produced by [`permutation_from_sequence`].
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Row and column permutations for one matrix shape under one key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPair {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

/// Derive the permutation pair for an `rows x cols` matrix: PWLCM (seeded
/// with y0) iterated `rows` times for the row order, Chebyshev (seeded with
/// x0) iterated `cols` times for the column order.
pub fn permutations_for(key: &KeyMaterial, rows: usize, cols: usize) -> PermutationPair {
    let mut pwlcm =
        PwlcmState::new(PWLCM_LAMBDA, key.y0).expect("key schedule keeps y0 in (0, 1)");
    let mut cheb = ChebyshevState::new(key.x0).expect("key schedule keeps x0 in (0, 1)");
    PermutationPair {
        row_perm: permutation_from_sequence(&pwlcm.generate(rows)),
        col_perm: permutation_from_sequence(&cheb.generate(cols)),
    }
}

/// Gather rows then columns: out[r][c] = in[row_perm[r]][col_perm[c]].
pub fn permute(m: &ByteMatrix, p: &PermutationPair) -> ByteMatrix {
    debug_assert_eq!(p.row_perm.len(), m.rows);
    debug_assert_eq!(p.col_perm.len(), m.cols);
    let mut out = Vec::with_capacity(m.data.len());
    for &src_r in &p.row_perm {
        let row = &m.data[src_r * m.cols..(src_r + 1) * m.cols];
        out.extend(p.col_perm.iter().map(|&src_c| row[src_c]));
    }
    ByteMatrix {
        rows: m.rows,
        cols: m.cols,
        data: out,
    }
}

/// Exact inverse of [`permute`]: out[row_perm[r]][col_perm[c]] = in[r][c].
pub fn unpermute(m: &ByteMatrix, p: &PermutationPair) -> ByteMatrix {
    let mut out = vec![0u8; m.data.len()];
    for (r, &dst_r) in p.row_perm.iter().enumerate() {
        let row = &m.data[r * m.cols..(r + 1) * m.cols];
        let dst_row = &mut out[dst_r * m.cols..(dst_r + 1) * m.cols];
        for (c, &dst_c) in p.col_perm.iter().enumerate() {
            dst_row[dst_c] = row[c];
        }
    }
    ByteMatrix {
        rows: m.rows,
        cols: m.cols,
        data: out,
    }
}

/// Generate `rows x cols` keystream bytes in iteration order, row-major.
/// Each chaotic value maps to a byte as floor((v * 10^14) mod 256).
pub fn keystream_matrix(ls: &mut LogisticSineState, rows: usize, cols: usize) -> ByteMatrix {
    let data = (0..rows * cols)
        .map(|_| keystream_byte(ls.next_value()))
        .collect();
    ByteMatrix { rows, cols, data }
}

#[inline]
fn keystream_byte(v: f64) -> u8 {
    ((v * KEYSTREAM_SCALE) % 256.0) as u8
}

fn keystream_for(key: &KeyMaterial, rows: usize, cols: usize) -> ByteMatrix {
    let mut ls =
        LogisticSineState::new(key.r, key.z0).expect("key schedule keeps r and z0 in range");
    keystream_matrix(&mut ls, rows, cols)
}

/// Encrypt one matrix: permute rows, permute columns, XOR the keystream,
/// substitute every byte. Output dimensions equal input dimensions.
pub fn encrypt_matrix(m: &ByteMatrix, key: &KeyMaterial, sbox: &Sbox) -> ByteMatrix {
    let perms = permutations_for(key, m.rows, m.cols);
    let mut out = permute(m, &perms);
    let ks = keystream_for(key, m.rows, m.cols);
    for (b, k) in out.data.iter_mut().zip(&ks.data) {
        *b = sbox.apply(*b ^ k);
    }
    out
}

/// Exact inverse of [`encrypt_matrix`].
pub fn decrypt_matrix(c: &ByteMatrix, key: &KeyMaterial, sbox: &Sbox) -> ByteMatrix {
    let ks = keystream_for(key, c.rows, c.cols);
    let mut mid = c.clone();
    for (b, k) in mid.data.iter_mut().zip(&ks.data) {
        *b = sbox.invert(*b) ^ k;
    }
    let perms = permutations_for(key, c.rows, c.cols);
    unpermute(&mid, &perms)
}
