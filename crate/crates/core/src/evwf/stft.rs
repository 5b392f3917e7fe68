//! Short-time analysis and weighted overlap-add resynthesis.
//!
//! Frames of `frame_len` samples at `hop` intervals are Hamming-windowed
//! and zero-padded to `fft_size`; only the one-sided half spectrum
//! (fft_size/2 + 1 bins) is exposed. Synthesis applies the same window
//! again and normalizes by the accumulated squared window, which makes the
//! unity-gain path an identity wherever frames cover the signal; samples no
//! frame covers (the tail shorter than one frame) pass through unchanged.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::{EvwfError, FrameConfig};

/// Symmetric Hamming window, w[n] = 0.54 - 0.46 cos(2 pi n / (N-1)).
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Planned transforms plus the window for one frame configuration.
pub struct Stft {
    frame_len: usize,
    hop: usize,
    fft_size: usize,
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Stft {
    pub fn new(cfg: &FrameConfig) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            frame_len: cfg.frame_len,
            hop: cfg.hop,
            fft_size: cfg.fft_size,
            window: hamming(cfg.frame_len),
            forward: planner.plan_fft_forward(cfg.fft_size),
            inverse: planner.plan_fft_inverse(cfg.fft_size),
        }
    }

    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Number of full frames in a signal of `len` samples.
    pub fn frame_count(&self, len: usize) -> Result<usize, EvwfError> {
        if len < self.frame_len {
            return Err(EvwfError::TooShort {
                len,
                need: self.frame_len,
            });
        }
        Ok((len - self.frame_len) / self.hop + 1)
    }

    /// One-sided complex spectra of every frame.
    pub fn analyze(&self, x: &[f64]) -> Result<Vec<Vec<Complex<f64>>>, EvwfError> {
        let n_frames = self.frame_count(x.len())?;
        let mut spectra = Vec::with_capacity(n_frames);
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        for m in 0..n_frames {
            let start = m * self.hop;
            for (n, c) in buf.iter_mut().enumerate() {
                *c = if n < self.frame_len {
                    Complex::new(x[start + n] * self.window[n], 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
            self.forward.process(&mut buf);
            spectra.push(buf[..self.n_bins()].to_vec());
        }
        Ok(spectra)
    }

    /// Squared magnitudes of one frame's one-sided spectrum.
    pub fn power(frame: &[Complex<f64>]) -> Vec<f64> {
        frame.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Weighted overlap-add resynthesis of modified one-sided spectra.
    /// `fallback` supplies the samples outside frame coverage and fixes the
    /// output length.
    pub fn synthesize(&self, spectra: &[Vec<Complex<f64>>], fallback: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; fallback.len()];
        let mut norm = vec![0.0; fallback.len()];
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];

        for (m, half) in spectra.iter().enumerate() {
            debug_assert_eq!(half.len(), self.n_bins());
            // Rebuild the full Hermitian spectrum from the one-sided half.
            buf[..self.n_bins()].copy_from_slice(half);
            for k in self.n_bins()..self.fft_size {
                buf[k] = half[self.fft_size - k].conj();
            }
            self.inverse.process(&mut buf);

            let start = m * self.hop;
            let scale = 1.0 / self.fft_size as f64;
            for n in 0..self.frame_len {
                let t = start + n;
                if t >= out.len() {
                    break;
                }
                out[t] += buf[n].re * scale * self.window[n];
                norm[t] += self.window[n] * self.window[n];
            }
        }

        for t in 0..out.len() {
            // The Hamming window never reaches zero, so any covered sample
            // has norm >= 0.08^2; the threshold only separates covered from
            // uncovered.
            if norm[t] > 1e-8 {
                out[t] /= norm[t];
            } else {
                out[t] = fallback[t];
            }
        }
        out
    }
}
