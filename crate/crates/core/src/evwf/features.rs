//! Log-filterbank features and their (approximate) inversion back to power
//! spectra, plus the plain-text track format used to feed externally
//! estimated features into the enhancer.

use std::path::Path;

use super::filterbank::FilterBank;
use super::{EvwfError, FrameConfig};

/// Acoustic feature dimension: one value per filterbank channel.
pub const FEATURE_DIM: usize = 23;

/// Log-compressed channel energies of one power frame: natural log of
/// max(W p, eps) per channel.
pub fn logfb(power: &[f64], fb: &FilterBank, eps: f64) -> Result<Vec<f64>, EvwfError> {
    Ok(fb
        .apply(power)?
        .into_iter()
        .map(|e| e.max(eps).ln())
        .collect())
}

/// Approximate inverse of [`logfb`]: exponentiate, multiply by the
/// pseudoinverse, floor at eps (the least-norm solution can dip negative).
pub fn features_to_power(
    feat: &[f64],
    fb: &FilterBank,
    eps: f64,
) -> Result<Vec<f64>, EvwfError> {
    let energies: Vec<f64> = feat.iter().map(|&v| v.exp()).collect();
    Ok(fb
        .reconstruct(&energies)?
        .into_iter()
        .map(|p| p.max(eps))
        .collect())
}

/// A sequence of per-frame feature vectors with the framing parameters they
/// were computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTrack {
    pub hop: u32,
    pub sample_rate: u32,
    pub frames: Vec<Vec<f64>>,
}

impl FeatureTrack {
    pub fn new(hop: u32, sample_rate: u32, frames: Vec<Vec<f64>>) -> Result<Self, EvwfError> {
        if let Some(bad) = frames.iter().position(|f| f.len() != FEATURE_DIM) {
            return Err(EvwfError::BadFeatureDim {
                frame: bad,
                got: frames[bad].len(),
            });
        }
        Ok(Self {
            hop,
            sample_rate,
            frames,
        })
    }

    pub fn matches_config(&self, cfg: &FrameConfig) -> bool {
        self.hop == cfg.hop as u32 && self.sample_rate == cfg.sample_rate
    }

    /// Plain-text serialization: a header line
    /// `logfb23 <frame_count> <hop> <sample_rate>` followed by one
    /// comma-separated 23-value line per frame. Values print in Rust's
    /// shortest round-trip form, so parse(to_text(t)) == t bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "logfb23 {} {} {}\n",
            self.frames.len(),
            self.hop,
            self.sample_rate
        );
        for frame in &self.frames {
            let line: Vec<String> = frame.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, EvwfError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut parts = header.split_ascii_whitespace();
        if parts.next() != Some("logfb23") {
            return Err(bad("header must start with 'logfb23'"));
        }
        let count: usize = parse_field(parts.next(), "frame count")?;
        let hop: u32 = parse_field(parts.next(), "hop")?;
        let sample_rate: u32 = parse_field(parts.next(), "sample rate")?;
        if parts.next().is_some() {
            return Err(bad("trailing fields in header"));
        }

        let mut frames = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse()).collect();
            let vals = vals.map_err(|_| bad(format!("unparseable value on frame line {i}")))?;
            if vals.len() != FEATURE_DIM {
                return Err(EvwfError::BadFeatureDim {
                    frame: i,
                    got: vals.len(),
                });
            }
            frames.push(vals);
        }
        if frames.len() != count {
            return Err(bad(format!(
                "header promises {count} frames, file has {}",
                frames.len()
            )));
        }
        Self::new(hop, sample_rate, frames)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvwfError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("read: {e}")))?;
        Self::parse_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EvwfError> {
        std::fs::write(path, self.to_text()).map_err(|e| bad(format!("write: {e}")))
    }
}

fn bad(detail: impl Into<String>) -> EvwfError {
    EvwfError::BadTrack(detail.into())
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    name: &str,
) -> Result<T, EvwfError> {
    field
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(format!("missing or invalid {name} in header")))
}
