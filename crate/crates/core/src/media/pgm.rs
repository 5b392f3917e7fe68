//! Netpbm codecs: binary grayscale "P5" read/write, plus binary color "P6"
//! ingest (converted to grayscale on load, since the cipher operates on
//! grayscale only).

use std::path::Path;

use super::{rgb_to_gray, GrayImage, MediaError};

/// Encode as binary PGM (P5, maxval 255).
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

/// Parse binary PGM (P5 only, maxval 255).
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, MediaError> {
    let (magic, w, h, body) = parse_netpbm_header(bytes, "PGM")?;
    if magic != *b"P5" {
        return Err(MediaError::header(
            "PGM",
            format!("expected P5, found {}", String::from_utf8_lossy(&magic)),
        ));
    }
    let expected = w * h;
    take_raster(body, expected, "PGM").and_then(|px| GrayImage::new(w, h, px.to_vec()))
}

/// Parse a grayscale (P5) or color (P6) binary netpbm image; P6 pixels are
/// converted to luma.
pub fn parse_image(bytes: &[u8]) -> Result<GrayImage, MediaError> {
    let (magic, w, h, body) = parse_netpbm_header(bytes, "netpbm")?;
    match &magic {
        b"P5" => take_raster(body, w * h, "PGM").and_then(|px| GrayImage::new(w, h, px.to_vec())),
        b"P6" => take_raster(body, w * h * 3, "PPM").and_then(|px| rgb_to_gray(w, h, px)),
        other => Err(MediaError::header(
            "netpbm",
            format!("unsupported magic {}", String::from_utf8_lossy(other)),
        )),
    }
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, MediaError> {
    parse_pgm(&std::fs::read(path)?)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage, MediaError> {
    parse_image(&std::fs::read(path)?)
}

pub fn save_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<(), MediaError> {
    Ok(std::fs::write(path, encode_pgm(img))?)
}

// Header grammar shared by P5/P6: magic, then width, height, maxval as
// ASCII decimals separated by whitespace, with '#' comments allowed, then
// exactly one whitespace byte before the raster.
fn parse_netpbm_header<'a>(
    bytes: &'a [u8],
    format: &'static str,
) -> Result<([u8; 2], usize, usize, &'a [u8]), MediaError> {
    if bytes.len() < 2 {
        return Err(MediaError::header(format, "file shorter than magic"));
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        *field = next_int(bytes, &mut pos, format)?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(MediaError::UnsupportedFormat(format!(
            "{format} maxval {maxval}, only 255 supported"
        )));
    }
    if w == 0 || h == 0 {
        return Err(MediaError::header(format, "zero dimension"));
    }
    // The single whitespace byte that terminates the header.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(MediaError::header(format, "missing raster separator"));
    }
    pos += 1;
    Ok((magic, w, h, &bytes[pos..]))
}

fn next_int(bytes: &[u8], pos: &mut usize, format: &'static str) -> Result<usize, MediaError> {
    // Skip whitespace and '#' comment lines.
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(MediaError::header(format, "expected decimal field"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| MediaError::header(format, "field out of range"))
}

fn take_raster<'a>(
    body: &'a [u8],
    expected: usize,
    format: &'static str,
) -> Result<&'a [u8], MediaError> {
    if body.len() < expected {
        return Err(MediaError::TruncatedPayload {
            expected: expected as u64,
            found: body.len() as u64,
        });
    }
    if body.len() > expected {
        return Err(MediaError::header(format, "trailing bytes after raster"));
    }
    Ok(body)
}
