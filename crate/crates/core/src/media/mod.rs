//! Media types and codecs: grayscale images (PGM), mono 16-bit audio (WAV),
//! the ciphertext envelope, and the conversions between clips, images, and
//! the cipher's byte matrices.

pub mod envelope;
pub mod pgm;
pub mod wav;

pub use envelope::{parse_envelope, serialize_envelope, CipherEnvelope, MediaKind};

use thiserror::Error;

use crate::cipher::{ByteMatrix, CipherError};

#[derive(Debug, Error)]
pub enum MediaError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed {format} header: {detail}")]
    MalformedHeader {
        format: &'static str,
        detail: String,
    },
    #[error("unsupported sample format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated payload: need {expected} bytes, have {found}")]
    TruncatedPayload { expected: u64, found: u64 },
    #[error("empty audio clip")]
    EmptyClip,
    #[error("image has no pixels")]
    EmptyImage,
    #[error(transparent)]
    Matrix(#[from] CipherError),
}

impl MediaError {
    pub(crate) fn header(format: &'static str, detail: impl Into<String>) -> Self {
        Self::MalformedHeader {
            format,
            detail: detail.into(),
        }
    }
}

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, MediaError> {
        if width == 0 || height == 0 {
            return Err(MediaError::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(MediaError::header(
                "image",
                format!(
                    "pixel count {} does not match {width}x{height}",
                    pixels.len()
                ),
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Mono PCM audio, 16-bit signed samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<i16>) -> Result<Self, MediaError> {
        if sample_rate == 0 {
            return Err(MediaError::header("audio", "sample rate must be positive"));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    /// The samples as the little-endian byte stream that gets hashed and
    /// encrypted.
    pub fn sample_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.samples.len() * 2);
        for s in &self.samples {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }
}

/// BT.601 luma of one RGB pixel, rounded to the nearest integer.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let v = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    v.round().clamp(0.0, 255.0) as u8
}

/// Convert interleaved RGB bytes to a grayscale image.
pub fn rgb_to_gray(width: usize, height: usize, rgb: &[u8]) -> Result<GrayImage, MediaError> {
    if rgb.len() != width * height * 3 {
        return Err(MediaError::header(
            "image",
            format!(
                "RGB byte count {} does not match {width}x{height}x3",
                rgb.len()
            ),
        ));
    }
    let pixels = rgb.chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect();
    GrayImage::new(width, height, pixels)
}

/// View an image as the cipher's byte matrix: rows = height (the A
/// dimension), cols = width (B).
pub fn image_to_matrix(img: &GrayImage) -> ByteMatrix {
    ByteMatrix::new(img.height, img.width, img.pixels.clone())
        .expect("image invariants imply matrix invariants")
}

pub fn matrix_to_image(m: &ByteMatrix) -> GrayImage {
    GrayImage {
        width: m.cols(),
        height: m.rows(),
        pixels: m.data().to_vec(),
    }
}

/// Reshape a clip's little-endian sample bytes into a near-square matrix:
/// N = 2 x sample count, A = ceil(sqrt(N)), B = ceil(N / A), zero-padded to
/// A x B. Returns the matrix and the original sample count.
pub fn audio_to_matrix(clip: &AudioClip) -> Result<(ByteMatrix, u64), MediaError> {
    if clip.samples.is_empty() {
        return Err(MediaError::EmptyClip);
    }
    let mut bytes = clip.sample_bytes();
    let n = bytes.len();
    let rows = ceil_sqrt(n);
    let cols = n.div_ceil(rows);
    bytes.resize(rows * cols, 0);
    let m = ByteMatrix::new(rows, cols, bytes)?;
    Ok((m, clip.samples.len() as u64))
}

/// Inverse of [`audio_to_matrix`]: strip padding with `orig_len` (sample
/// count) and reassemble little-endian samples. The sample rate is not part
/// of the matrix and must be supplied.
pub fn matrix_to_audio(
    m: &ByteMatrix,
    orig_len: u64,
    sample_rate: u32,
) -> Result<AudioClip, MediaError> {
    let need = orig_len
        .checked_mul(2)
        .ok_or_else(|| MediaError::header("audio", "sample count overflows byte length"))?;
    let have = m.data().len() as u64;
    if need > have {
        return Err(MediaError::TruncatedPayload {
            expected: need,
            found: have,
        });
    }
    let samples = m.data()[..need as usize]
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]))
        .collect();
    AudioClip::new(sample_rate, samples)
}

fn ceil_sqrt(n: usize) -> usize {
    let mut a = (n as f64).sqrt() as usize;
    while a * a < n {
        a += 1;
    }
    while a > 1 && (a - 1) * (a - 1) >= n {
        a -= 1;
    }
    a.max(1)
}
