//! Latency bookkeeping. Each enhancement request yields one
//! [`StageSample`]; a [`LatencyReport`] aggregates a batch into p50, p95,
//! and max per stage. Round-trip time is measured on the client clock and
//! the three server stages on the server clock, so the round trip is not
//! asserted to bound their sum.

use serde::Serialize;

/// Millisecond timings for a single request.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageSample {
    /// Client-side encrypt + message build.
    pub serialize_ms: f64,
    /// Send to fully-received reply, client clock.
    pub round_trip_ms: f64,
    /// Server: envelope parse + decrypt + verify.
    pub decrypt_ms: f64,
    /// Server: Wiener enhancement.
    pub enhance_ms: f64,
    /// Server: re-key + encrypt of the enhanced clip.
    pub reencrypt_ms: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageStats {
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatencyReport {
    pub samples: usize,
    pub serialize: StageStats,
    pub round_trip: StageStats,
    pub decrypt: StageStats,
    pub enhance: StageStats,
    pub reencrypt: StageStats,
}

impl LatencyReport {
    /// Aggregate a non-empty batch of samples. Returns None on an empty
    /// batch; there is no meaningful percentile of nothing.
    pub fn from_samples(samples: &[StageSample]) -> Option<LatencyReport> {
        if samples.is_empty() {
            return None;
        }
        let stat = |f: fn(&StageSample) -> f64| {
            let mut v: Vec<f64> = samples.iter().map(f).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            StageStats {
                p50_ms: percentile(&v, 50.0),
                p95_ms: percentile(&v, 95.0),
                max_ms: *v.last().unwrap(),
            }
        };
        Some(LatencyReport {
            samples: samples.len(),
            serialize: stat(|s| s.serialize_ms),
            round_trip: stat(|s| s.round_trip_ms),
            decrypt: stat(|s| s.decrypt_ms),
            enhance: stat(|s| s.enhance_ms),
            reencrypt: stat(|s| s.reencrypt_ms),
        })
    }

    /// One line per stage: "name p50 p95 max" in milliseconds.
    pub fn to_text(&self) -> String {
        let mut out = format!("samples {}\n", self.samples);
        for (name, s) in [
            ("serialize", &self.serialize),
            ("round_trip", &self.round_trip),
            ("decrypt", &self.decrypt),
            ("enhance", &self.enhance),
            ("reencrypt", &self.reencrypt),
        ] {
            out.push_str(&format!(
                "{name} p50 {:.3} p95 {:.3} max {:.3}\n",
                s.p50_ms, s.p95_ms, s.max_ms
            ));
        }
        out
    }
}

// Nearest-rank percentile on a sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
