//! Deterministic test-signal generators: natural-looking images with high
//! adjacent-pixel correlation, speech-shaped audio, and noise mixing at a
//! prescribed SNR. Everything is seeded, so analysis runs and benchmarks
//! are reproducible without shipping binary fixtures.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::media::{AudioClip, GrayImage};

/// A smooth sinusoidal field plus mild noise. Neighboring pixels move
/// together, so adjacency correlations come out high (typically > 0.9),
/// which is the regime plain photographs live in.
pub fn natural_image(width: usize, height: usize, seed: u64) -> GrayImage {
    assert!(width > 0 && height > 0, "empty image");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // A handful of low-frequency plane waves with decaying amplitude.
    let amps = [52.0, 34.0, 22.0, 12.0, 7.0];
    let waves: Vec<(f64, f64, f64, f64)> = amps
        .iter()
        .map(|&a| {
            (
                a,
                rng.gen_range(0.4..2.5) / width as f64,
                rng.gen_range(0.4..2.5) / height as f64,
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();

    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let mut v = 128.0;
            for &(a, fx, fy, phase) in &waves {
                v += a * (2.0 * PI * (fx * c as f64 + fy * r as f64) + phase).sin();
            }
            v += rng.gen_range(-4.0..4.0);
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, pixels).unwrap()
}

/// Speech-shaped audio: a slowly gliding fundamental with harmonics rolled
/// off through two formant-like resonances, syllabic amplitude modulation,
/// and a little breath noise. It is not intelligible, but its spectral and
/// temporal envelope statistics are in the right ballpark for testing the
/// enhancement chain.
pub fn speech_shaped(sample_rate: u32, len: usize, seed: u64) -> AudioClip {
    assert!(len > 0, "empty clip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = sample_rate as f64;

    let f0_base = rng.gen_range(95.0..190.0);
    let glide = rng.gen_range(0.5..1.5);
    let syllable_rate = rng.gen_range(2.5..4.0);
    let formants = [
        (rng.gen_range(400.0..700.0), 180.0),
        (rng.gen_range(1200.0..1900.0), 300.0),
    ];

    let mut phase = 0.0f64;
    let mut raw = Vec::with_capacity(len);
    for i in 0..len {
        let t = i as f64 / rate;
        let f0 = f0_base * (1.0 + 0.08 * (2.0 * PI * glide * t).sin());
        phase += 2.0 * PI * f0 / rate;

        let mut v = 0.0;
        let mut k = 1;
        while f0 * k as f64 <= 4000.0 {
            let fk = f0 * k as f64;
            // Resonance weighting: each formant contributes a Lorentzian bump.
            let mut w = 0.2;
            for &(fc, bw) in &formants {
                w += 1.0 / (1.0 + ((fk - fc) / bw).powi(2));
            }
            v += w / (k as f64) * (phase * k as f64).sin();
            k += 1;
        }

        // Syllabic envelope with brief pauses between "syllables".
        let env = (PI * syllable_rate * t).sin().abs().powf(0.7);
        let gate = if (syllable_rate * t).fract() < 0.85 { 1.0 } else { 0.1 };
        v = v * env * gate + rng.gen_range(-0.02..0.02);
        raw.push(v);
    }

    let peak = raw.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-12);
    let scale = 0.25 * 32767.0 / peak;
    let samples = raw.iter().map(|&v| (v * scale).round() as i16).collect();
    AudioClip::new(sample_rate, samples).unwrap()
}

/// Uniform white noise at a quarter of full scale.
pub fn white_noise(sample_rate: u32, len: usize, seed: u64) -> AudioClip {
    assert!(len > 0, "empty clip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..len)
        .map(|_| (rng.gen_range(-1.0f64..1.0) * 0.25 * 32767.0).round() as i16)
        .collect();
    AudioClip::new(sample_rate, samples).unwrap()
}

/// Mix `noise` into `clean` so the result sits at `snr_db`, then scale the
/// pair jointly if the mixture would clip. Returns (mixture, reference):
/// the reference is the clean signal after the same joint scaling, so
/// SNR measurements against it see only the added noise.
///
/// The clips are truncated to the shorter length. Panics if either power
/// is zero; a silent operand has no defined SNR.
pub fn mix_at_snr(clean: &AudioClip, noise: &AudioClip, snr_db: f64) -> (AudioClip, AudioClip) {
    assert_eq!(clean.sample_rate, noise.sample_rate, "sample-rate mismatch");
    let n = clean.samples.len().min(noise.samples.len());
    let c: Vec<f64> = clean.samples[..n].iter().map(|&s| s as f64).collect();
    let w: Vec<f64> = noise.samples[..n].iter().map(|&s| s as f64).collect();

    let pc: f64 = c.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let pw: f64 = w.iter().map(|v| v * v).sum::<f64>() / n as f64;
    assert!(pc > 0.0 && pw > 0.0, "silent operand");

    // Gain on the noise so that pc / (g^2 pw) = 10^(snr/10).
    let g = (pc / (pw * 10f64.powf(snr_db / 10.0))).sqrt();

    let mix: Vec<f64> = c.iter().zip(&w).map(|(cv, wv)| cv + g * wv).collect();
    let peak = mix.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let s = if peak > 32000.0 { 32000.0 / peak } else { 1.0 };

    let mixture = AudioClip::new(
        clean.sample_rate,
        mix.iter().map(|&v| (v * s).round() as i16).collect(),
    )
    .unwrap();
    let reference = AudioClip::new(
        clean.sample_rate,
        c.iter().map(|&v| (v * s).round() as i16).collect(),
    )
    .unwrap();
    (mixture, reference)
}
