//! Orthonormal 2D DCT features of lip-region frames, zigzag-ordered and
//! resampled from the video rate to the audio frame rate. This is the
//! visual half of the feature pipeline; an external model maps these to
//! acoustic features, so nothing here feeds the enhancer directly.

use crate::media::GrayImage;

use super::EvwfError;

/// Orthonormal DCT-II of an image, returned row-major (height x width).
/// Orthonormality gives exact energy preservation (Parseval).
pub fn dct2(img: &GrayImage) -> Vec<f64> {
    let (h, w) = (img.height, img.width);
    let dh = dct_matrix(h);
    let dw = dct_matrix(w);

    // T = D_h X, then C = T D_w^T.
    let mut t = vec![0.0; h * w];
    for u in 0..h {
        for x in 0..h {
            let d = dh[u * h + x];
            if d == 0.0 {
                continue;
            }
            for y in 0..w {
                t[u * w + y] += d * img.at(x, y) as f64;
            }
        }
    }
    let mut c = vec![0.0; h * w];
    for u in 0..h {
        for v in 0..w {
            let mut acc = 0.0;
            for y in 0..w {
                acc += t[u * w + y] * dw[v * w + y];
            }
            c[u * w + v] = acc;
        }
    }
    c
}

// Orthonormal DCT-II basis: D[k][i] = a(k) cos(pi (2i+1) k / (2n)),
// a(0) = sqrt(1/n), a(k>0) = sqrt(2/n).
fn dct_matrix(n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for k in 0..n {
        let a = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            d[k * n + i] =
                a * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
    }
    d
}

/// JPEG-style zigzag traversal order for an h x w coefficient grid:
/// anti-diagonals of increasing index sum, alternating direction.
pub fn zigzag_indices(h: usize, w: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(h * w);
    for s in 0..h + w - 1 {
        if s % 2 == 0 {
            // Walk up-right: row descends.
            let r_hi = s.min(h - 1);
            let r_lo = s.saturating_sub(w - 1);
            for r in (r_lo..=r_hi).rev() {
                order.push((r, s - r));
            }
        } else {
            let r_lo = s.saturating_sub(w - 1);
            let r_hi = s.min(h - 1);
            for r in r_lo..=r_hi {
                order.push((r, s - r));
            }
        }
    }
    order
}

/// Per-frame zigzag-truncated DCT coefficients resampled to a target frame
/// rate.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualTrack {
    pub source_fps: f64,
    pub target_fps: f64,
    pub coeffs_per_frame: usize,
    pub frames: Vec<Vec<f64>>,
}

/// Compute `k_coeffs` zigzag DCT coefficients per video frame, then
/// linearly interpolate the coefficient tracks from `source_fps` (video,
/// nominally 25) to `target_fps` (the audio frame rate, 100 at the default
/// 500-sample hop and 50 kHz). Output timestamps that land exactly on a
/// source frame copy it bit-exactly.
pub fn dct2_visual_features(
    frames: &[GrayImage],
    source_fps: f64,
    target_fps: f64,
    k_coeffs: usize,
) -> Result<VisualTrack, EvwfError> {
    if frames.len() < 2 {
        return Err(EvwfError::BadConfig(format!(
            "need at least 2 video frames, got {}",
            frames.len()
        )));
    }
    if !(source_fps > 0.0) || !(target_fps > 0.0) {
        return Err(EvwfError::BadConfig("frame rates must be positive".into()));
    }
    let (h, w) = (frames[0].height, frames[0].width);
    if let Some(i) = frames.iter().position(|f| f.height != h || f.width != w) {
        return Err(EvwfError::BadConfig(format!(
            "frame {i} is {}x{}, expected {w}x{h}",
            frames[i].width, frames[i].height
        )));
    }
    if k_coeffs == 0 || k_coeffs > h * w {
        return Err(EvwfError::BadConfig(format!(
            "k_coeffs {k_coeffs} outside 1..={}",
            h * w
        )));
    }

    let order = zigzag_indices(h, w);
    let source: Vec<Vec<f64>> = frames
        .iter()
        .map(|f| {
            let c = dct2(f);
            order[..k_coeffs].iter().map(|&(r, col)| c[r * w + col]).collect()
        })
        .collect();

    // Resample along time. The track spans (n-1)/source_fps seconds; the
    // output grid covers the same span inclusively.
    let span = (source.len() - 1) as f64 / source_fps;
    let n_out = (span * target_fps * (1.0 + 1e-12)).floor() as usize + 1;
    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let pos = (j as f64 / target_fps) * source_fps;
        let i0 = (pos.floor() as usize).min(source.len() - 1);
        let frac = pos - i0 as f64;
        if frac == 0.0 || i0 + 1 == source.len() {
            out.push(source[i0].clone());
        } else {
            out.push(
                source[i0]
                    .iter()
                    .zip(&source[i0 + 1])
                    .map(|(a, b)| (1.0 - frac) * a + frac * b)
                    .collect(),
            );
        }
    }

    Ok(VisualTrack {
        source_fps,
        target_fps,
        coeffs_per_frame: k_coeffs,
        frames: out,
    })
}
