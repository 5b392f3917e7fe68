//! Self-describing ciphertext container.
//!
//! Fixed little-endian layout, 88 header bytes then the payload:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "AVC1"
//!      4     1  version (currently 1)
//!      5     1  media_kind (1 = image, 2 = audio)
//!      6     4  A: payload rows, u32
//!     10     4  B: payload cols, u32
//!     14     8  orig_len: pre-padding pixel/sample count, u64
//!     22     2  poly_used: S-box reduction polynomial, u16
//!     24    64  digest: SHA-512 of the plaintext (the key material)
//!     88   A*B  payload bytes, row-major
//! ```
//!
//! Version 1 carries the digest in cleartext, which makes the scheme a
//! keyed round trip rather than transport security: anyone holding the
//! envelope can re-derive the seeds. A future version byte is the hook for
//! wrapping the digest with a pre-shared 64-byte secret. See the README
//! security caveat.

use std::path::Path;

use super::MediaError;

pub const ENVELOPE_MAGIC: [u8; 4] = *b"AVC1";
pub const ENVELOPE_VERSION: u8 = 1;
pub const ENVELOPE_HEADER_LEN: usize = 88;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediaKind {
    Image = 1,
    Audio = 2,
}

impl MediaKind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Self::Image),
            2 => Some(Self::Audio),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherEnvelope {
    pub media_kind: MediaKind,
    /// Payload rows (the A dimension; image height).
    pub rows: u32,
    /// Payload cols (the B dimension; image width).
    pub cols: u32,
    /// Pixel count (images, equals rows*cols) or sample count (audio).
    pub orig_len: u64,
    /// Reduction polynomial the S-box was actually built with.
    pub poly_used: u16,
    /// SHA-512 of the pre-padding plaintext bytes.
    pub digest: [u8; 64],
    pub payload: Vec<u8>,
}

pub fn serialize_envelope(e: &CipherEnvelope) -> Vec<u8> {
    let mut out = Vec::with_capacity(ENVELOPE_HEADER_LEN + e.payload.len());
    out.extend_from_slice(&ENVELOPE_MAGIC);
    out.push(ENVELOPE_VERSION);
    out.push(e.media_kind as u8);
    out.extend_from_slice(&e.rows.to_le_bytes());
    out.extend_from_slice(&e.cols.to_le_bytes());
    out.extend_from_slice(&e.orig_len.to_le_bytes());
    out.extend_from_slice(&e.poly_used.to_le_bytes());
    out.extend_from_slice(&e.digest);
    out.extend_from_slice(&e.payload);
    out
}

pub fn parse_envelope(bytes: &[u8]) -> Result<CipherEnvelope, MediaError> {
    if bytes.len() < ENVELOPE_HEADER_LEN {
        return Err(MediaError::header("envelope", "shorter than header"));
    }
    if bytes[0..4] != ENVELOPE_MAGIC {
        return Err(MediaError::header("envelope", "bad magic"));
    }
    if bytes[4] != ENVELOPE_VERSION {
        return Err(MediaError::header(
            "envelope",
            format!("unsupported version {}", bytes[4]),
        ));
    }
    let media_kind = MediaKind::from_byte(bytes[5])
        .ok_or_else(|| MediaError::header("envelope", format!("unknown media kind {}", bytes[5])))?;
    let rows = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    let cols = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
    let orig_len = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
    let poly_used = u16::from_le_bytes(bytes[22..24].try_into().unwrap());
    let digest: [u8; 64] = bytes[24..88].try_into().unwrap();

    let cells = rows as u64 * cols as u64;
    if cells == 0 {
        return Err(MediaError::header("envelope", "zero payload dimension"));
    }
    let found = (bytes.len() - ENVELOPE_HEADER_LEN) as u64;
    if found < cells {
        return Err(MediaError::TruncatedPayload {
            expected: cells,
            found,
        });
    }
    if found > cells {
        return Err(MediaError::header("envelope", "trailing bytes after payload"));
    }
    match media_kind {
        MediaKind::Image if orig_len != cells => {
            return Err(MediaError::header(
                "envelope",
                format!("image orig_len {orig_len} != {rows}x{cols}"),
            ));
        }
        MediaKind::Audio if orig_len.checked_mul(2).is_none_or(|n| n > cells) => {
            return Err(MediaError::header(
                "envelope",
                format!("audio orig_len {orig_len} exceeds payload capacity"),
            ));
        }
        _ => {}
    }

    Ok(CipherEnvelope {
        media_kind,
        rows,
        cols,
        orig_len,
        poly_used,
        digest,
        payload: bytes[ENVELOPE_HEADER_LEN..].to_vec(),
    })
}

pub fn load_envelope(path: impl AsRef<Path>) -> Result<CipherEnvelope, MediaError> {
    parse_envelope(&std::fs::read(path)?)
}

pub fn save_envelope(path: impl AsRef<Path>, e: &CipherEnvelope) -> Result<(), MediaError> {
    Ok(std::fs::write(path, serialize_envelope(e))?)
}
