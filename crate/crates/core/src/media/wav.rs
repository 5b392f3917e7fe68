//! Minimal RIFF/WAVE codec for the subset the pipeline uses: PCM, 16-bit,
//! mono, any sample rate. Unknown chunks are skipped on read; the writer
//! emits the canonical 44-byte header.

use std::path::Path;

use super::{AudioClip, MediaError};

/// Encode as a canonical PCM WAV file.
pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = (clip.samples.len() * 2) as u32;
    let byte_rate = clip.sample_rate * 2;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes()); // PCM fmt chunk size
    out.extend_from_slice(&1u16.to_le_bytes()); // audio format: PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // channels: mono
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in &clip.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// Parse a PCM WAV file; only 16-bit mono is accepted.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioClip, MediaError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(MediaError::header("WAV", "missing RIFF/WAVE preamble"));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(len)
            .filter(|&e| e <= bytes.len())
            .ok_or(MediaError::TruncatedPayload {
                expected: len as u64,
                found: (bytes.len() - body_start) as u64,
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if len < 16 {
                    return Err(MediaError::header("WAV", "fmt chunk too short"));
                }
                fmt = Some((
                    u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16::from_le_bytes(body[14..16].try_into().unwrap()),
                ));
            }
            b"data" => data = Some(body),
            _ => {} // LIST, fact, cue, ... are skipped
        }
        // Chunks are word-aligned; odd lengths carry a pad byte.
        pos = body_end + (len & 1);
    }

    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| MediaError::header("WAV", "missing fmt chunk"))?;
    if format != 1 {
        return Err(MediaError::UnsupportedFormat(format!(
            "WAV format tag {format}, only PCM (1) supported"
        )));
    }
    if bits != 16 {
        return Err(MediaError::UnsupportedFormat(format!(
            "{bits}-bit WAV, only 16-bit supported"
        )));
    }
    if channels != 1 {
        return Err(MediaError::UnsupportedFormat(format!(
            "{channels}-channel WAV, only mono supported"
        )));
    }
    let data = data.ok_or_else(|| MediaError::header("WAV", "missing data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(MediaError::header("WAV", "odd data chunk length"));
    }
    let samples = data
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]))
        .collect();
    AudioClip::new(rate, samples)
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip, MediaError> {
    parse_wav(&std::fs::read(path)?)
}

pub fn save_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<(), MediaError> {
    Ok(std::fs::write(path, encode_wav(clip))?)
}
