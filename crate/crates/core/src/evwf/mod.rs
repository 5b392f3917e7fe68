//! Externally-voiced Wiener filtering: enhance noisy audio using a clean
//! log-filterbank feature track supplied from outside (an oracle here; in
//! a deployment, a model that predicts the features from video).
//!
//! The chain is STFT -> per-frame Wiener gains derived from the feature
//! track -> overlap-add resynthesis. Samples are processed as f64 in
//! [-1, 1) (i16 over 32768) and rounded back on output.

use rustfft::num_complex::Complex;
use thiserror::Error;

use crate::media::AudioClip;

pub mod dct;
pub mod features;
pub mod filterbank;
pub mod stft;

pub use features::{features_to_power, logfb, FeatureTrack, FEATURE_DIM};
pub use filterbank::FilterBank;
pub use stft::{hamming, Stft};

/// Framing and enhancement parameters. The defaults are the operating
/// point everything else in this module is tuned for: 50 kHz audio in
/// 16 ms frames with 10 ms hops (100 feature frames per second), a 2048
/// FFT, and a 23-channel filterbank.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub sample_rate: u32,
    pub frame_len: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub n_channels: usize,
    /// Spectral floor: gains never drop below this, which bounds musical
    /// noise at the cost of residual background.
    pub g_min: f64,
    /// Floor for powers before logs and divisions.
    pub eps: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            sample_rate: 50_000,
            frame_len: 800,
            hop: 500,
            fft_size: 2048,
            n_channels: 23,
            g_min: 0.1,
            eps: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvwfError {
    #[error("signal of {len} samples is shorter than one {need}-sample frame")]
    TooShort { len: usize, need: usize },
    #[error("feature track has {track} frames but the signal frames into {signal}")]
    FrameMismatch { track: usize, signal: usize },
    #[error("feature frame {frame} has {got} values, expected 23")]
    BadFeatureDim { frame: usize, got: usize },
    #[error("malformed feature track: {0}")]
    BadTrack(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

/// Per-bin Wiener gains from an estimated clean power spectrum and the
/// observed noisy one. The noise estimate is `max(p_noisy - p_clean,
/// eps * p_noisy)`, so an over-estimated clean spectrum still leaves a
/// sliver of assumed noise. Gains are clamped to `[g_min, 1]`; a frame
/// where both powers vanish gets the floor.
pub fn wiener_gains(p_clean: &[f64], p_noisy: &[f64], cfg: &FrameConfig) -> Vec<f64> {
    p_clean
        .iter()
        .zip(p_noisy)
        .map(|(&ps, &py)| {
            let pn = (py - ps).max(cfg.eps * py);
            let denom = ps + pn;
            let g = if denom > 0.0 { ps / denom } else { cfg.g_min };
            g.clamp(cfg.g_min, 1.0)
        })
        .collect()
}

/// Wiener-filter `noisy` against a clean feature track. The track must
/// carry the same hop and sample rate as `cfg` and exactly as many frames
/// as the clip produces under that framing.
pub fn enhance(
    noisy: &AudioClip,
    feats: &FeatureTrack,
    cfg: &FrameConfig,
) -> Result<AudioClip, EvwfError> {
    if !feats.matches_config(cfg) {
        return Err(EvwfError::BadTrack(format!(
            "track framed at hop {} / {} Hz, config wants {} / {}",
            feats.hop, feats.sample_rate, cfg.hop, cfg.sample_rate
        )));
    }
    let fb = FilterBank::new(cfg)?;
    let stft = Stft::new(cfg);
    let x = normalize(&noisy.samples);
    let mut spectra = stft.analyze(&x)?;
    if feats.frames.len() != spectra.len() {
        return Err(EvwfError::FrameMismatch {
            track: feats.frames.len(),
            signal: spectra.len(),
        });
    }

    for (spectrum, feat) in spectra.iter_mut().zip(&feats.frames) {
        let p_noisy = Stft::power(spectrum);
        let p_clean = features_to_power(feat, &fb, cfg.eps)?;
        let gains = wiener_gains(&p_clean, &p_noisy, cfg);
        apply_gains(spectrum, &gains);
    }

    let y = stft.synthesize(&spectra, &x);
    Ok(AudioClip::new(noisy.sample_rate, quantize(&y)).unwrap())
}

/// Analyze, scale each one-sided spectrum by the matching gain vector,
/// and resynthesize. `gains` needs one vector of `fft_size / 2 + 1`
/// entries per frame. With all-ones gains this is an analysis/synthesis
/// identity, which is the calibration check for the whole framing stack.
pub fn apply_spectral_gains(
    clip: &AudioClip,
    gains: &[Vec<f64>],
    cfg: &FrameConfig,
) -> Result<AudioClip, EvwfError> {
    let stft = Stft::new(cfg);
    let x = normalize(&clip.samples);
    let mut spectra = stft.analyze(&x)?;
    if gains.len() != spectra.len() {
        return Err(EvwfError::FrameMismatch {
            track: gains.len(),
            signal: spectra.len(),
        });
    }
    for (m, (spectrum, g)) in spectra.iter_mut().zip(gains).enumerate() {
        if g.len() != spectrum.len() {
            return Err(EvwfError::BadConfig(format!(
                "gain vector {m} has {} entries, expected {}",
                g.len(),
                spectrum.len()
            )));
        }
        apply_gains(spectrum, g);
    }
    let y = stft.synthesize(&spectra, &x);
    Ok(AudioClip::new(clip.sample_rate, quantize(&y)).unwrap())
}

/// Log-filterbank features of a clip, framed per `cfg`. Applied to the
/// clean signal this is the oracle feed for [`enhance`]; it is also the
/// reference implementation of the feature definition itself.
pub fn oracle_features(clean: &AudioClip, cfg: &FrameConfig) -> Result<FeatureTrack, EvwfError> {
    let fb = FilterBank::new(cfg)?;
    let stft = Stft::new(cfg);
    let spectra = stft.analyze(&normalize(&clean.samples))?;
    let frames = spectra
        .iter()
        .map(|s| logfb(&Stft::power(s), &fb, cfg.eps))
        .collect::<Result<Vec<_>, _>>()?;
    FeatureTrack::new(cfg.hop as u32, cfg.sample_rate, frames)
}

/// Segmental SNR in dB between a reference clip and a processed one,
/// framed per `cfg`. Per-frame SNRs are clamped to [-10, 35] dB before
/// averaging (standard practice: one silent or perfect frame should not
/// dominate the mean), and frames where the reference is silent are
/// skipped.
pub fn segmental_snr_db(
    reference: &AudioClip,
    test: &AudioClip,
    cfg: &FrameConfig,
) -> Result<f64, EvwfError> {
    if reference.samples.len() != test.samples.len() {
        return Err(EvwfError::BadConfig(format!(
            "length mismatch: reference {} samples, test {}",
            reference.samples.len(),
            test.samples.len()
        )));
    }
    let stft = Stft::new(cfg);
    let n_frames = stft.frame_count(reference.samples.len())?;

    let mut sum = 0.0;
    let mut used = 0usize;
    for m in 0..n_frames {
        let lo = m * cfg.hop;
        let hi = lo + cfg.frame_len;
        let mut signal = 0.0;
        let mut error = 0.0;
        for i in lo..hi {
            let r = reference.samples[i] as f64;
            let t = test.samples[i] as f64;
            signal += r * r;
            error += (r - t) * (r - t);
        }
        if signal == 0.0 {
            continue;
        }
        let snr = if error == 0.0 {
            35.0
        } else {
            (10.0 * (signal / error).log10()).clamp(-10.0, 35.0)
        };
        sum += snr;
        used += 1;
    }
    if used == 0 {
        return Err(EvwfError::BadConfig("reference is silent".into()));
    }
    Ok(sum / used as f64)
}

fn apply_gains(spectrum: &mut [Complex<f64>], gains: &[f64]) {
    for (c, &g) in spectrum.iter_mut().zip(gains) {
        *c *= g;
    }
}

fn normalize(samples: &[i16]) -> Vec<f64> {
    samples.iter().map(|&s| s as f64 / 32768.0).collect()
}

fn quantize(x: &[f64]) -> Vec<i16> {
    x.iter()
        .map(|&v| (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
        .collect()
}
