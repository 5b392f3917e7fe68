//! Mel-spaced triangular filterbank and its Moore-Penrose pseudoinverse.
//!
//! The 23 channels span 0 Hz to Nyquist with unit-peak triangles on the
//! one-sided FFT bin grid. The rows are linearly independent, so the right
//! pseudoinverse W+ = W^T (W W^T)^-1 exists; it maps channel energies back
//! to a least-norm power spectrum.

use super::{EvwfError, FrameConfig};

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

#[derive(Debug, Clone)]
pub struct FilterBank {
    n_channels: usize,
    n_bins: usize,
    /// Row-major n_channels x n_bins triangle weights.
    weights: Vec<f64>,
    /// Row-major n_bins x n_channels pseudoinverse.
    pinv: Vec<f64>,
}

impl FilterBank {
    pub fn new(cfg: &FrameConfig) -> Result<Self, EvwfError> {
        let n_bins = cfg.fft_size / 2 + 1;
        let n_channels = cfg.n_channels;
        if n_channels == 0 || n_channels >= n_bins {
            return Err(EvwfError::BadConfig(format!(
                "need 0 < channels < bins, got {n_channels} channels over {n_bins} bins"
            )));
        }

        // Channel edges: n_channels + 2 points equally spaced on the mel
        // axis from 0 to Nyquist.
        let nyquist = cfg.sample_rate as f64 / 2.0;
        let top_mel = hz_to_mel(nyquist);
        let edges_hz: Vec<f64> = (0..n_channels + 2)
            .map(|i| mel_to_hz(top_mel * i as f64 / (n_channels + 1) as f64))
            .collect();

        let bin_hz = cfg.sample_rate as f64 / cfg.fft_size as f64;
        let mut weights = vec![0.0; n_channels * n_bins];
        for ch in 0..n_channels {
            let (lo, center, hi) = (edges_hz[ch], edges_hz[ch + 1], edges_hz[ch + 2]);
            let row = &mut weights[ch * n_bins..(ch + 1) * n_bins];
            for (k, w) in row.iter_mut().enumerate() {
                let f = k as f64 * bin_hz;
                *w = if f > lo && f < center {
                    (f - lo) / (center - lo)
                } else if f == center {
                    1.0
                } else if f > center && f < hi {
                    (hi - f) / (hi - center)
                } else {
                    0.0
                };
            }
            if row.iter().sum::<f64>() <= 0.0 {
                return Err(EvwfError::BadConfig(format!(
                    "channel {ch} covers no FFT bin (triangle {lo:.1}..{hi:.1} Hz)"
                )));
            }
        }

        let pinv = right_pseudoinverse(&weights, n_channels, n_bins)?;
        Ok(Self {
            n_channels,
            n_bins,
            weights,
            pinv,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn weight(&self, ch: usize, bin: usize) -> f64 {
        self.weights[ch * self.n_bins + bin]
    }

    /// Channel energies: weights x power.
    pub fn apply(&self, power: &[f64]) -> Result<Vec<f64>, EvwfError> {
        if power.len() != self.n_bins {
            return Err(EvwfError::BadConfig(format!(
                "power frame has {} bins, filterbank expects {}",
                power.len(),
                self.n_bins
            )));
        }
        Ok((0..self.n_channels)
            .map(|ch| {
                self.weights[ch * self.n_bins..(ch + 1) * self.n_bins]
                    .iter()
                    .zip(power)
                    .map(|(w, p)| w * p)
                    .sum()
            })
            .collect())
    }

    /// Least-norm spectrum reconstruction: pinv x energies. Negative values
    /// are NOT floored here; see `features_to_power`.
    pub fn reconstruct(&self, energies: &[f64]) -> Result<Vec<f64>, EvwfError> {
        if energies.len() != self.n_channels {
            return Err(EvwfError::BadConfig(format!(
                "{} energies for {} channels",
                energies.len(),
                self.n_channels
            )));
        }
        Ok((0..self.n_bins)
            .map(|k| {
                self.pinv[k * self.n_channels..(k + 1) * self.n_channels]
                    .iter()
                    .zip(energies)
                    .map(|(w, e)| w * e)
                    .sum()
            })
            .collect())
    }
}

// W+ = W^T (W W^T)^-1 for a full-row-rank W (rows x cols, rows << cols).
// Returned row-major as cols x rows. Solves (W W^T) Y = W by Gaussian
// elimination with partial pivoting; the Gram matrix is tiny (23 x 23).
fn right_pseudoinverse(w: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>, EvwfError> {
    // Gram matrix G = W W^T, rows x rows.
    let mut g = vec![0.0; rows * rows];
    for i in 0..rows {
        for j in i..rows {
            let dot: f64 = (0..cols).map(|k| w[i * cols + k] * w[j * cols + k]).sum();
            g[i * rows + j] = dot;
            g[j * rows + i] = dot;
        }
    }

    // Augment with W and eliminate: [G | W] -> [I | G^-1 W].
    let width = rows + cols;
    let mut aug = vec![0.0; rows * width];
    for i in 0..rows {
        aug[i * width..i * width + rows].copy_from_slice(&g[i * rows..(i + 1) * rows]);
        aug[i * width + rows..(i + 1) * width].copy_from_slice(&w[i * cols..(i + 1) * cols]);
    }
    for col in 0..rows {
        let pivot_row = (col..rows)
            .max_by(|&a, &b| {
                aug[a * width + col]
                    .abs()
                    .total_cmp(&aug[b * width + col].abs())
            })
            .expect("non-empty pivot range");
        if aug[pivot_row * width + col].abs() < 1e-12 {
            return Err(EvwfError::BadConfig(
                "filterbank Gram matrix is numerically singular".into(),
            ));
        }
        if pivot_row != col {
            for k in 0..width {
                aug.swap(col * width + k, pivot_row * width + k);
            }
        }
        let pivot = aug[col * width + col];
        for k in col..width {
            aug[col * width + k] /= pivot;
        }
        for r in 0..rows {
            if r == col {
                continue;
            }
            let factor = aug[r * width + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..width {
                aug[r * width + k] -= factor * aug[col * width + k];
            }
        }
    }

    // aug now holds Y = G^-1 W (rows x cols); the pseudoinverse is Y^T.
    let mut pinv = vec![0.0; cols * rows];
    for i in 0..rows {
        for k in 0..cols {
            pinv[k * rows + i] = aug[i * width + rows + k];
        }
    }
    Ok(pinv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank() -> FilterBank {
        FilterBank::new(&FrameConfig::default()).unwrap()
    }

    #[test]
    fn shape_and_coverage() {
        let fb = bank();
        assert_eq!(fb.n_channels(), 23);
        assert_eq!(fb.n_bins(), 1025);
        for ch in 0..23 {
            let sum: f64 = (0..1025).map(|k| fb.weight(ch, k)).sum();
            assert!(sum > 0.0, "channel {ch} is empty");
            let peak = (0..1025).map(|k| fb.weight(ch, k)).fold(0.0f64, f64::max);
            assert!(peak <= 1.0 + 1e-12, "channel {ch} peak {peak} > 1");
            // Unit-peak triangles: some bin should get close to the apex.
            assert!(peak > 0.5, "channel {ch} peak {peak} suspiciously low");
        }
        // Every bin except DC belongs to at least one triangle... not true
        // at the extremes (bin 0 sits below the first rising edge), so
        // check the interior instead.
        for k in 1..1024 {
            let any = (0..23).any(|ch| fb.weight(ch, k) > 0.0);
            assert!(any, "bin {k} uncovered");
        }
    }

    #[test]
    fn triangles_rise_and_fall_monotonically() {
        let fb = bank();
        for ch in 0..23 {
            let row: Vec<f64> = (0..1025).map(|k| fb.weight(ch, k)).collect();
            let peak_bin = (0..1025)
                .max_by(|&a, &b| row[a].total_cmp(&row[b]))
                .unwrap();
            let support: Vec<usize> = (0..1025).filter(|&k| row[k] > 0.0).collect();
            for pair in support.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                assert_eq!(b, a + 1, "channel {ch} support has a hole at bin {b}");
                if b <= peak_bin {
                    assert!(row[b] >= row[a], "channel {ch} not rising at {b}");
                } else {
                    assert!(row[b] <= row[a], "channel {ch} not falling at {b}");
                }
            }
        }
    }

    #[test]
    fn moore_penrose_reconstruction_property() {
        // W W+ W = W within 1e-6, elementwise against the largest weight.
        let fb = bank();
        let (rows, cols) = (23, 1025);
        // W W+ (23 x 23).
        let mut wwp = vec![0.0; rows * rows];
        for i in 0..rows {
            for j in 0..rows {
                wwp[i * rows + j] = (0..cols)
                    .map(|k| fb.weight(i, k) * fb.pinv[k * rows + j])
                    .sum();
            }
        }
        // For a right inverse, W W+ should be the identity.
        for i in 0..rows {
            for j in 0..rows {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = wwp[i * rows + j];
                assert!(
                    (got - want).abs() < 1e-8,
                    "(W W+)[{i}][{j}] = {got}, want {want}"
                );
            }
        }
        // And therefore W W+ W = W.
        for i in 0..rows {
            for k in 0..cols {
                let recon: f64 = (0..rows).map(|j| wwp[i * rows + j] * fb.weight(j, k)).sum();
                assert!(
                    (recon - fb.weight(i, k)).abs() < 1e-6,
                    "W W+ W mismatch at ({i}, {k})"
                );
            }
        }
    }

    #[test]
    fn pinv_matches_svd_oracle() {
        // Independent route: nalgebra's SVD pseudoinverse of the same
        // weight matrix, compared elementwise.
        let fb = bank();
        let (rows, cols) = (23usize, 1025usize);
        let w = nalgebra::DMatrix::from_fn(rows, cols, |i, k| fb.weight(i, k));
        let oracle = w.pseudo_inverse(1e-10).expect("SVD pseudoinverse");
        assert_eq!((oracle.nrows(), oracle.ncols()), (cols, rows));
        let mut worst = 0.0f64;
        for k in 0..cols {
            for i in 0..rows {
                worst = worst.max((oracle[(k, i)] - fb.pinv[k * rows + i]).abs());
            }
        }
        assert!(worst < 1e-8, "max |pinv - svd| = {worst}");
    }

    #[test]
    fn apply_then_reconstruct_recovers_row_space_vectors() {
        // p = W^T c lies in the row space, so W+ (W p) = p exactly (up to
        // rounding).
        let fb = bank();
        let c: Vec<f64> = (0..23).map(|i| 0.3 + 0.1 * i as f64).collect();
        let p: Vec<f64> = (0..1025)
            .map(|k| (0..23).map(|ch| fb.weight(ch, k) * c[ch]).sum())
            .collect();
        let energies = fb.apply(&p).unwrap();
        let back = fb.reconstruct(&energies).unwrap();
        let num: f64 = p.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = p.iter().map(|a| a * a).sum();
        assert!((num / den).sqrt() < 1e-6, "rel err {}", (num / den).sqrt());
    }

    #[test]
    fn rejects_degenerate_configs() {
        let mut cfg = FrameConfig::default();
        cfg.n_channels = 0;
        assert!(FilterBank::new(&cfg).is_err());
        let mut cfg = FrameConfig::default();
        cfg.n_channels = 2000;
        assert!(FilterBank::new(&cfg).is_err());
    }
}
