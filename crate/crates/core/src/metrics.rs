//! Security-analysis suite: adjacency correlation, Shannon entropy, GLCM
//! contrast and energy, NPCR/UACI/NSCR, and the one-bit differential
//! harness that drives them end to end through the cipher.

use serde::Serialize;
use thiserror::Error;

use crate::cipher::ByteMatrix;
use crate::media::{AudioClip, GrayImage};
use crate::pipeline::{self, PipelineError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("zero variance")]
    ZeroVariance,
    #[error("empty input")]
    Empty,
    #[error("inputs must have equal dimensions")]
    ShapeMismatch,
    #[error("image too small for this measurement")]
    TooSmall,
    #[error("GLCM levels must be in 2..=256, got {0}")]
    BadLevels(usize),
    #[error("GLCM offset must be nonzero")]
    ZeroOffset,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Adjacent-pair direction for correlation measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

/// Pearson correlation of two equal-length byte sequences.
pub fn pearson_u8(a: &[u8], b: &[u8]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::ShapeMismatch);
    }
    if a.len() < 2 {
        return Err(MetricsError::TooSmall);
    }
    let n = a.len() as f64;
    let ma = a.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x as f64 - ma;
        let dy = y as f64 - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Pearson correlation over every adjacent pixel pair in one direction.
/// All pairs are used (no sampling), so the result is deterministic.
pub fn adjacency_correlation(img: &GrayImage, dir: Direction) -> Result<f64, MetricsError> {
    if img.width < 2 || img.height < 2 {
        return Err(MetricsError::TooSmall);
    }
    let (dr, dc) = match dir {
        Direction::Horizontal => (0usize, 1usize),
        Direction::Vertical => (1, 0),
        Direction::Diagonal => (1, 1),
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in 0..img.height - dr {
        for c in 0..img.width - dc {
            xs.push(img.at(r, c));
            ys.push(img.at(r + dr, c + dc));
        }
    }
    pearson_u8(&xs, &ys)
}

/// Shannon entropy of a byte stream over 256 symbol bins, in bits.
pub fn entropy_bits(data: &[u8]) -> Result<f64, MetricsError> {
    if data.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let n = data.len() as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Gray-level co-occurrence configuration. Defaults match the texture
/// statistics reported for this cipher: 8 levels, offset one pixel to the
/// right, symmetric counting.
#[derive(Debug, Clone, Copy)]
pub struct GlcmConfig {
    pub levels: usize,
    /// (row, col) displacement from each pixel to its neighbour.
    pub offset: (isize, isize),
    pub symmetric: bool,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self {
            levels: 8,
            offset: (0, 1),
            symmetric: true,
        }
    }
}

/// GLCM contrast and energy of an image under `cfg`.
///
/// Pixels quantize as floor(p * levels / 256); the co-occurrence matrix is
/// normalized to probabilities; contrast = sum |i-j|^2 p(i,j) and
/// energy = sum p(i,j)^2.
pub fn glcm_stats(img: &GrayImage, cfg: &GlcmConfig) -> Result<(f64, f64), MetricsError> {
    if !(2..=256).contains(&cfg.levels) {
        return Err(MetricsError::BadLevels(cfg.levels));
    }
    if cfg.offset == (0, 0) {
        return Err(MetricsError::ZeroOffset);
    }

    let (dr, dc) = cfg.offset;
    let quant = |p: u8| (p as usize * cfg.levels) / 256;
    let mut counts = vec![0u64; cfg.levels * cfg.levels];
    let mut total = 0u64;
    for r in 0..img.height {
        for c in 0..img.width {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr < 0 || nc < 0 || nr as usize >= img.height || nc as usize >= img.width {
                continue;
            }
            let i = quant(img.at(r, c));
            let j = quant(img.at(nr as usize, nc as usize));
            counts[i * cfg.levels + j] += 1;
            total += 1;
            if cfg.symmetric {
                counts[j * cfg.levels + i] += 1;
                total += 1;
            }
        }
    }
    if total == 0 {
        return Err(MetricsError::TooSmall);
    }

    let mut contrast = 0.0;
    let mut energy = 0.0;
    for i in 0..cfg.levels {
        for j in 0..cfg.levels {
            let p = counts[i * cfg.levels + j] as f64 / total as f64;
            let d = i as f64 - j as f64;
            contrast += d * d * p;
            energy += p * p;
        }
    }
    Ok((contrast, energy))
}

/// NPCR and UACI between two equal-shape ciphertext matrices, in percent.
pub fn npcr_uaci(c1: &ByteMatrix, c2: &ByteMatrix) -> Result<(f64, f64), MetricsError> {
    if c1.rows() != c2.rows() || c1.cols() != c2.cols() {
        return Err(MetricsError::ShapeMismatch);
    }
    change_rates(c1.data(), c2.data())
}

/// NSCR and UACI between two ciphered byte streams (the audio flavour of
/// [`npcr_uaci`]; identical formulas over sample bytes).
pub fn nscr_uaci(a: &[u8], b: &[u8]) -> Result<(f64, f64), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::ShapeMismatch);
    }
    change_rates(a, b)
}

/// Sample-level change metrics for ciphered audio. The byte views are read
/// as little-endian 16-bit samples and the same formulas apply with cell
/// width 16: NSCR counts differing samples, UACI normalizes the mean
/// absolute difference by 65535. This matters for the change rate — two
/// unrelated byte streams already agree on ~1/256 of bytes, but unrelated
/// sample streams agree on only ~1/65536 of samples, which is what lets a
/// sound audio cipher clear 99.9%. A trailing odd byte (matrix padding) is
/// ignored.
pub fn nscr_uaci_samples(a: &[u8], b: &[u8]) -> Result<(f64, f64), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::ShapeMismatch);
    }
    if a.len() < 2 {
        return Err(MetricsError::Empty);
    }
    let pairs = a.chunks_exact(2).zip(b.chunks_exact(2));
    let n = (a.len() / 2) as f64;
    let mut changed = 0u64;
    let mut abs_sum = 0.0f64;
    for (x, y) in pairs {
        let sx = u16::from_le_bytes([x[0], x[1]]);
        let sy = u16::from_le_bytes([y[0], y[1]]);
        if sx != sy {
            changed += 1;
        }
        abs_sum += (sx as i32 - sy as i32).abs() as f64;
    }
    Ok((
        100.0 * changed as f64 / n,
        100.0 * abs_sum / (65535.0 * n),
    ))
}

fn change_rates(a: &[u8], b: &[u8]) -> Result<(f64, f64), MetricsError> {
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = a.len() as f64;
    let changed = a.iter().zip(b).filter(|(x, y)| x != y).count() as f64;
    let abs_sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as i32 - y as i32).abs() as f64)
        .sum();
    Ok((100.0 * changed / n, 100.0 * abs_sum / (255.0 * n)))
}

/// Mean and spread of the change-rate metrics over one-bit differential
/// trials. `change` is NPCR for images and NSCR for audio.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DifferentialReport {
    pub trials: u32,
    pub mean_change_pct: f64,
    pub std_change_pct: f64,
    pub mean_uaci_pct: f64,
    pub std_uaci_pct: f64,
}

/// One-bit differential test on an image: per trial, flip the least
/// significant bit of one uniformly chosen pixel, encrypt both versions end
/// to end (the key re-derives from each plaintext), and compare the
/// ciphertexts. Trials are individually seeded from `seed`, so reports are
/// reproducible.
pub fn differential_image(
    img: &GrayImage,
    trials: u32,
    seed: u64,
    poly: u16,
) -> Result<DifferentialReport, MetricsError> {
    use rand::{Rng, SeedableRng};
    if trials == 0 {
        return Err(MetricsError::NoTrials);
    }
    let base = pipeline::encrypt_image(img, poly)?;
    let mut npcr = Vec::with_capacity(trials as usize);
    let mut uaci = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut flipped = img.clone();
        let cell = rng.gen_range(0..flipped.pixels.len());
        flipped.pixels[cell] ^= 1;
        let env = pipeline::encrypt_image(&flipped, poly)?;
        let (n, u) = nscr_uaci(&base.payload, &env.payload)?;
        npcr.push(n);
        uaci.push(u);
    }
    Ok(report_from(trials, &npcr, &uaci))
}

/// Audio counterpart of [`differential_image`]: flips the least significant
/// bit of one uniformly chosen sample. Ciphertexts are compared at 16-bit
/// sample granularity (see [`nscr_uaci_samples`]), so the reported change
/// rate is NSCR over samples, not bytes.
pub fn differential_audio(
    clip: &AudioClip,
    trials: u32,
    seed: u64,
    poly: u16,
) -> Result<DifferentialReport, MetricsError> {
    use rand::{Rng, SeedableRng};
    if trials == 0 {
        return Err(MetricsError::NoTrials);
    }
    let base = pipeline::encrypt_audio(clip, poly)?;
    let mut nscr = Vec::with_capacity(trials as usize);
    let mut uaci = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut flipped = clip.clone();
        let cell = rng.gen_range(0..flipped.samples.len());
        flipped.samples[cell] ^= 1;
        let env = pipeline::encrypt_audio(&flipped, poly)?;
        let (n, u) = nscr_uaci_samples(&base.payload, &env.payload)?;
        nscr.push(n);
        uaci.push(u);
    }
    Ok(report_from(trials, &nscr, &uaci))
}

fn report_from(trials: u32, change: &[f64], uaci: &[f64]) -> DifferentialReport {
    let (mc, sc) = mean_std(change);
    let (mu, su) = mean_std(uaci);
    DifferentialReport {
        trials,
        mean_change_pct: mc,
        std_change_pct: sc,
        mean_uaci_pct: mu,
        std_uaci_pct: su,
    }
}

// Population standard deviation, so a single trial reports 0 rather than
// dividing by zero.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

/// Flat report of every metric a CLI analysis run can produce. Fields stay
/// `None` when a metric does not apply to the analyzed media; serialization
/// skips them. Field names are a stable interface.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc_plain_cipher: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrast: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub npcr_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub npcr_std_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uaci_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uaci_std_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nscr_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nscr_std_pct: Option<f64>,
}

impl MetricsReport {
    /// Flat `name value` lines, one per populated metric, in declaration
    /// order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |name: &str, v: &Option<f64>| {
            if let Some(v) = v {
                out.push_str(&format!("{name} {v}\n"));
            }
        };
        put("cc_h", &self.cc_h);
        put("cc_v", &self.cc_v);
        put("cc_d", &self.cc_d);
        put("cc_plain_cipher", &self.cc_plain_cipher);
        put("entropy_bits", &self.entropy_bits);
        put("contrast", &self.contrast);
        put("energy", &self.energy);
        put("npcr_pct", &self.npcr_pct);
        put("npcr_std_pct", &self.npcr_std_pct);
        put("uaci_pct", &self.uaci_pct);
        put("uaci_std_pct", &self.uaci_std_pct);
        put("nscr_pct", &self.nscr_pct);
        put("nscr_std_pct", &self.nscr_std_pct);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ramp_image(w: usize, h: usize) -> GrayImage {
        let pixels = (0..h)
            .flat_map(|_| (0..w).map(|c| (c % 256) as u8))
            .collect();
        GrayImage::new(w, h, pixels).unwrap()
    }

    fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
        GrayImage::new(w, h, (0..w * h).map(|_| rng.gen()).collect()).unwrap()
    }

    #[test]
    fn vertical_correlation_of_column_ramp_is_one() {
        // pixels(r, c) = c: every vertical pair is equal-valued.
        let cc = adjacency_correlation(&ramp_image(16, 8), Direction::Vertical).unwrap();
        assert!((cc - 1.0).abs() < 1e-12, "cc_v = {cc}");
    }

    #[test]
    fn horizontal_correlation_of_checkerboard_is_minus_one() {
        let pixels = (0..4)
            .flat_map(|r| (0..4).map(move |c| if (r + c) % 2 == 0 { 0u8 } else { 255 }))
            .collect();
        let img = GrayImage::new(4, 4, pixels).unwrap();
        let cc = adjacency_correlation(&img, Direction::Horizontal).unwrap();
        assert!((cc + 1.0).abs() < 1e-12, "cc_h = {cc}");
    }

    #[test]
    fn constant_image_has_no_defined_correlation() {
        let img = GrayImage::new(4, 4, vec![7; 16]).unwrap();
        assert!(matches!(
            adjacency_correlation(&img, Direction::Diagonal).unwrap_err(),
            MetricsError::ZeroVariance
        ));
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(entropy_bits(&[42; 1000]).unwrap(), 0.0);
        let uniform: Vec<u8> = (0..2048).map(|i| (i % 256) as u8).collect();
        assert_eq!(entropy_bits(&uniform).unwrap(), 8.0);
        assert!(entropy_bits(&[]).is_err());
    }

    #[test]
    fn entropy_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut data: Vec<u8> = (0..5000).map(|_| rng.gen()).collect();
        let before = entropy_bits(&data).unwrap();
        data.reverse();
        data.rotate_left(1234);
        assert_eq!(entropy_bits(&data).unwrap(), before);
    }

    #[test]
    fn glcm_constant_image() {
        let img = GrayImage::new(8, 8, vec![100; 64]).unwrap();
        let (contrast, energy) = glcm_stats(&img, &GlcmConfig::default()).unwrap();
        assert_eq!(contrast, 0.0);
        assert_eq!(energy, 1.0);
    }

    // Lyndon-word construction of a de Bruijn sequence B(k, 2): every
    // ordered symbol pair appears exactly once in the cyclic sequence.
    fn de_bruijn_pairs(k: usize) -> Vec<u8> {
        fn rec(t: usize, p: usize, k: usize, n: usize, a: &mut [usize], seq: &mut Vec<u8>) {
            if t > n {
                if n % p == 0 {
                    seq.extend(a[1..=p].iter().map(|&v| v as u8));
                }
            } else {
                a[t] = a[t - p];
                rec(t + 1, p, k, n, a, seq);
                for j in a[t - p] + 1..k {
                    a[t] = j;
                    rec(t + 1, t, k, n, a, seq);
                }
            }
        }
        let mut a = vec![0usize; 2 * 2 + 2];
        let mut seq = Vec::new();
        rec(1, 1, k, 2, &mut a, &mut seq);
        seq
    }

    #[test]
    fn glcm_of_debruijn_rows_hits_the_analytic_ideals() {
        // Each row visits all 64 ordered 8-level pairs exactly once, so the
        // symmetric co-occurrence distribution is exactly uniform: energy
        // 1/64 and contrast E|i-j|^2 = 10.5 with no sampling error.
        let mut row = de_bruijn_pairs(8);
        assert_eq!(row.len(), 64);
        row.push(row[0]); // close the cycle
        let scaled: Vec<u8> = row.iter().map(|&v| v * 32).collect(); // spread over 0..255
        let pixels = [scaled.clone(), scaled].concat();
        let img = GrayImage::new(65, 2, pixels).unwrap();
        let (contrast, energy) = glcm_stats(&img, &GlcmConfig::default()).unwrap();
        assert_eq!(energy, 1.0 / 64.0);
        assert_eq!(contrast, 10.5);
    }

    #[test]
    fn glcm_of_uniform_noise_is_near_ideal() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let img = random_image(&mut rng, 512, 512);
        let (contrast, energy) = glcm_stats(&img, &GlcmConfig::default()).unwrap();
        assert!((contrast - 10.5).abs() < 0.6, "contrast {contrast}");
        assert!((energy - 1.0 / 64.0).abs() < 0.002, "energy {energy}");
    }

    #[test]
    fn glcm_validates_config() {
        let img = ramp_image(8, 8);
        assert!(matches!(
            glcm_stats(&img, &GlcmConfig { levels: 1, ..Default::default() }).unwrap_err(),
            MetricsError::BadLevels(1)
        ));
        assert!(matches!(
            glcm_stats(&img, &GlcmConfig { offset: (0, 0), ..Default::default() }).unwrap_err(),
            MetricsError::ZeroOffset
        ));
    }

    #[test]
    fn npcr_uaci_identical_and_inverted() {
        let m1 = ByteMatrix::new(16, 16, (0..256).map(|i| i as u8).collect()).unwrap();
        assert_eq!(npcr_uaci(&m1, &m1).unwrap(), (0.0, 0.0));

        let m2 = ByteMatrix::new(16, 16, m1.data().iter().map(|&b| !b).collect()).unwrap();
        let (npcr, uaci) = npcr_uaci(&m1, &m2).unwrap();
        assert_eq!(npcr, 100.0);
        // mean |x - (255 - x)| over the full ramp is 128, so
        // 100 * 128 / 255 = 50.19607...
        assert!((uaci - 50.19607843137255).abs() < 1e-12, "uaci {uaci}");

        let m3 = ByteMatrix::new(2, 2, vec![0; 4]).unwrap();
        assert!(matches!(
            npcr_uaci(&m1, &m3).unwrap_err(),
            MetricsError::ShapeMismatch
        ));
    }

    #[test]
    fn change_rates_of_independent_noise_match_expectation() {
        // For i.i.d. uniform bytes: NPCR -> 100 * 255/256 = 99.609...% and
        // UACI -> 100 * (256^2 - 1) / (3 * 256 * 255) = 33.4641...%.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 512 * 512;
        let a: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
        let (nscr, uaci) = nscr_uaci(&a, &b).unwrap();
        assert!((nscr - 99.609375).abs() < 0.1, "nscr {nscr}");
        assert!((uaci - 33.46405228758170).abs() < 0.5, "uaci {uaci}");
    }

    #[test]
    fn sample_change_rates_of_independent_noise_match_expectation() {
        // Same analytic forms with 16-bit cells: NSCR -> 100 * (1 - 2^-16)
        // = 99.9985% and UACI -> 100 * (65536 + 1) / (3 * 65536) = 33.334%.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 1 << 20;
        let a: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
        let (nscr, uaci) = nscr_uaci_samples(&a, &b).unwrap();
        assert!((nscr - 99.99847412109375).abs() < 0.01, "nscr {nscr}");
        assert!((uaci - 33.33384195963542).abs() < 0.5, "uaci {uaci}");
    }

    #[test]
    fn sample_change_rates_edge_cases() {
        let a = [1u8, 2, 3, 4, 9];
        assert_eq!(nscr_uaci_samples(&a, &a).unwrap(), (0.0, 0.0));
        // Different only in the dangling odd byte: still identical, because
        // the tail cannot form a sample.
        let b = [1u8, 2, 3, 4, 7];
        assert_eq!(nscr_uaci_samples(&a, &b).unwrap(), (0.0, 0.0));
        // Complement the second sample: 0x0403 becomes 0xFBFC, a gap of
        // 63481, and half the samples changed.
        let c = [1u8, 2, 0xFF ^ 3, 0xFF ^ 4, 9];
        let (nscr, uaci) = nscr_uaci_samples(&a, &c).unwrap();
        assert_eq!(nscr, 50.0);
        assert!((uaci - 100.0 * 63481.0 / (2.0 * 65535.0)).abs() < 1e-12);
        assert!(matches!(
            nscr_uaci_samples(&a, &[1]).unwrap_err(),
            MetricsError::ShapeMismatch
        ));
        assert!(matches!(
            nscr_uaci_samples(&[1], &[1]).unwrap_err(),
            MetricsError::Empty
        ));
    }

    #[test]
    fn differential_image_is_seeded_and_strong() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let img = random_image(&mut rng, 32, 32);
        let r1 = differential_image(&img, 20, 7, crate::sbox::POLY_PRIMARY).unwrap();
        let r2 = differential_image(&img, 20, 7, crate::sbox::POLY_PRIMARY).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.mean_change_pct > 99.0, "npcr {}", r1.mean_change_pct);
        assert!(
            (r1.mean_uaci_pct - 33.46).abs() < 1.5,
            "uaci {}",
            r1.mean_uaci_pct
        );
        assert!(r1.std_change_pct >= 0.0 && r1.std_uaci_pct >= 0.0);

        let r3 = differential_image(&img, 20, 8, crate::sbox::POLY_PRIMARY).unwrap();
        assert_ne!(r1, r3, "different seeds should move the estimates");
    }

    #[test]
    fn differential_audio_clears_the_sample_level_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let samples: Vec<i16> = (0..4000).map(|_| rng.gen()).collect();
        let clip = AudioClip::new(50_000, samples).unwrap();
        let r = differential_audio(&clip, 5, 3, crate::sbox::POLY_PRIMARY).unwrap();
        assert!(r.mean_change_pct >= 99.9, "nscr {}", r.mean_change_pct);
        assert!(
            (r.mean_uaci_pct - 33.39).abs() < 1.0,
            "uaci {}",
            r.mean_uaci_pct
        );
        assert!(differential_audio(&clip, 0, 3, crate::sbox::POLY_PRIMARY).is_err());
    }

    #[test]
    fn report_text_and_json_use_stable_field_names() {
        let report = MetricsReport {
            cc_h: Some(0.5),
            entropy_bits: Some(7.99),
            npcr_pct: Some(99.6),
            ..Default::default()
        };
        let text = report.to_text();
        assert_eq!(text, "cc_h 0.5\nentropy_bits 7.99\nnpcr_pct 99.6\n");
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"cc_h": 0.5, "entropy_bits": 7.99, "npcr_pct": 99.6})
        );
    }
}
