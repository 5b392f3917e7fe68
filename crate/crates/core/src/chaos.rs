//! The three 1-D chaotic maps that drive the cipher: a piece-wise linear
//! chaotic map (PWLCM) for row permutation, a degree-4 Chebyshev map for
//! column permutation, and a combined logistic-sine map for the keystream.
//!
//! All arithmetic is IEEE-754 binary64 with the literal evaluation order of
//! the defining formulas, so sequences are bit-reproducible for identical
//! seeds.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChaosError {
    #[error("PWLCM control parameter must lie in (0, 0.5], got {0}")]
    BadLambda(f64),
    #[error("PWLCM seed must lie in (0, 1), got {0}")]
    BadPwlcmSeed(f64),
    #[error("Chebyshev seed must lie in [-1, 1], got {0}")]
    BadChebyshevSeed(f64),
    #[error("logistic-sine parameter must lie in [0, 4], got {0}")]
    BadLogisticSineParam(f64),
    #[error("logistic-sine seed must lie in [0, 1), got {0}")]
    BadLogisticSineSeed(f64),
}

/// Common interface for the iterated maps: advance the state one step and
/// return the new value.
pub trait ChaoticMap {
    fn next_value(&mut self) -> f64;

    /// Next `n` iterates in order. `n = 0` yields an empty vector.
    fn generate(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_value()).collect()
    }
}

/// Piece-wise linear chaotic map.
///
/// y' = y/lambda            for y in [0, lambda]
/// y' = (1-y)/(1-lambda)    for y in (lambda, 0.5]
/// y' = f(1-y)              for y in (0.5, 1]
///
/// The middle branch can round to exactly 1.0 as y approaches lambda from
/// above; every step therefore ends with a mod-1 wrap, and an exact 0 or 1
/// is replaced by lambda/2 to keep the orbit inside (0, 1).
#[derive(Debug, Clone)]
pub struct PwlcmState {
    lambda: f64,
    y: f64,
}

impl PwlcmState {
    pub fn new(lambda: f64, y0: f64) -> Result<Self, ChaosError> {
        if !(lambda > 0.0 && lambda <= 0.5) {
            return Err(ChaosError::BadLambda(lambda));
        }
        if !(y0 > 0.0 && y0 < 1.0) {
            return Err(ChaosError::BadPwlcmSeed(y0));
        }
        Ok(Self { lambda, y: y0 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn value(&self) -> f64 {
        self.y
    }

    // Branch evaluation for arguments in [0, 0.5]; the (0.5, 1] branch folds
    // its argument into this range first.
    fn half_branch(v: f64, lambda: f64) -> f64 {
        if v <= lambda {
            v / lambda
        } else {
            (1.0 - v) / (1.0 - lambda)
        }
    }
}

impl ChaoticMap for PwlcmState {
    fn next_value(&mut self) -> f64 {
        let raw = if self.y <= 0.5 {
            Self::half_branch(self.y, self.lambda)
        } else {
            Self::half_branch(1.0 - self.y, self.lambda)
        };
        let mut v = raw % 1.0;
        if v == 0.0 || v == 1.0 {
            v = self.lambda / 2.0;
        }
        self.y = v;
        v
    }
}

/// Chebyshev map of fixed degree 4: x' = 8x^4 - 8x^2 + 1, the closed form of
/// cos(4 arccos x) on [-1, 1].
#[derive(Debug, Clone)]
pub struct ChebyshevState {
    x: f64,
}

/// Degree of the Chebyshev polynomial used throughout.
pub const CHEBYSHEV_DEGREE: u32 = 4;

impl ChebyshevState {
    pub fn new(x0: f64) -> Result<Self, ChaosError> {
        if !(-1.0..=1.0).contains(&x0) {
            return Err(ChaosError::BadChebyshevSeed(x0));
        }
        Ok(Self { x: x0 })
    }

    pub fn value(&self) -> f64 {
        self.x
    }
}

impl ChaoticMap for ChebyshevState {
    fn next_value(&mut self) -> f64 {
        let x = self.x;
        let x2 = x * x;
        let v = 8.0 * (x2 * x2) - 8.0 * x2 + 1.0;
        self.x = v;
        v
    }
}

/// Combined logistic-sine map:
/// z' = (r z (1-z) + (4-r) sin(pi z)/4) mod 1.
#[derive(Debug, Clone)]
pub struct LogisticSineState {
    r: f64,
    z: f64,
}

impl LogisticSineState {
    pub fn new(r: f64, z0: f64) -> Result<Self, ChaosError> {
        if !(0.0..=4.0).contains(&r) {
            return Err(ChaosError::BadLogisticSineParam(r));
        }
        if !(0.0..1.0).contains(&z0) {
            return Err(ChaosError::BadLogisticSineSeed(z0));
        }
        Ok(Self { r, z: z0 })
    }

    pub fn value(&self) -> f64 {
        self.z
    }
}

impl ChaoticMap for LogisticSineState {
    fn next_value(&mut self) -> f64 {
        let (r, z) = (self.r, self.z);
        let v = (r * z * (1.0 - z) + (4.0 - r) * ((PI * z).sin() / 4.0)) % 1.0;
        self.z = v;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Straight-line reference evaluators, kept independent of the state
    // machinery above. Expected values in the tests below were computed with
    // these (and cross-checked by hand where the arithmetic is short).
    mod reference {
        use std::f64::consts::PI;

        pub fn pwlcm(y: f64, lambda: f64) -> f64 {
            let raw = if y <= lambda {
                y / lambda
            } else if y <= 0.5 {
                (1.0 - y) / (1.0 - lambda)
            } else {
                let w = 1.0 - y;
                if w <= lambda {
                    w / lambda
                } else {
                    (1.0 - w) / (1.0 - lambda)
                }
            };
            let v = raw % 1.0;
            if v == 0.0 || v == 1.0 {
                lambda / 2.0
            } else {
                v
            }
        }

        pub fn chebyshev4(x: f64) -> f64 {
            8.0 * x.powi(4) - 8.0 * x.powi(2) + 1.0
        }

        pub fn logistic_sine(z: f64, r: f64) -> f64 {
            (r * z * (1.0 - z) + (4.0 - r) * ((PI * z).sin() / 4.0)) % 1.0
        }
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (x, y) in a.iter().zip(b) {
            cov += (x - ma) * (y - mb);
            va += (x - ma) * (x - ma);
            vb += (y - mb) * (y - mb);
        }
        cov / (va.sqrt() * vb.sqrt())
    }

    #[test]
    fn pwlcm_first_branch() {
        let mut s = PwlcmState::new(0.4, 0.2).unwrap();
        assert_eq!(s.next_value(), 0.5);
    }

    #[test]
    fn pwlcm_upper_branch_folds() {
        // y = 0.7 > 0.5 folds to f(1 - 0.7); the subtraction is exact in
        // binary (0.30000000000000004) and dividing by fl(0.4) rounds the
        // real quotient up one ulp from 3/4.
        let mut s = PwlcmState::new(0.4, 0.7).unwrap();
        assert_eq!(s.next_value(), 0.7500000000000001);

        // With dyadic inputs every step is exact: fold 0.875 to 0.125,
        // then 0.125 / 0.25 is exactly one half.
        let mut s = PwlcmState::new(0.25, 0.875).unwrap();
        assert_eq!(s.next_value(), 0.5);
    }

    #[test]
    fn pwlcm_tent_midpoint() {
        let mut s = PwlcmState::new(0.5, 0.25).unwrap();
        assert_eq!(s.next_value(), 0.5);
    }

    #[test]
    fn pwlcm_two_step_sequence() {
        // 0.2/0.4 = 0.5, then 0.5 in (0.4, 0.5] -> (1-0.5)/(1-0.4).
        let mut s = PwlcmState::new(0.4, 0.2).unwrap();
        assert_eq!(s.generate(2), vec![0.5, 0.8333333333333334]);
    }

    #[test]
    fn pwlcm_sanitizes_exact_one() {
        // y = lambda sends the first branch to exactly 1.0.
        let mut s = PwlcmState::new(0.4, 0.4).unwrap();
        assert_eq!(s.next_value(), 0.2);
    }

    #[test]
    fn pwlcm_rejects_bad_params() {
        assert_eq!(
            PwlcmState::new(0.0, 0.2).unwrap_err(),
            ChaosError::BadLambda(0.0)
        );
        assert_eq!(
            PwlcmState::new(0.6, 0.2).unwrap_err(),
            ChaosError::BadLambda(0.6)
        );
        assert!(PwlcmState::new(0.4, 0.0).is_err());
        assert!(PwlcmState::new(0.4, 1.0).is_err());
    }

    #[test]
    fn pwlcm_matches_reference_orbit() {
        let mut s = PwlcmState::new(0.37, 0.123456789).unwrap();
        let mut y = 0.123456789;
        for _ in 0..10_000 {
            y = reference::pwlcm(y, 0.37);
            assert_eq!(s.next_value(), y);
        }
    }

    #[test]
    fn chebyshev_examples() {
        let mut s = ChebyshevState::new(0.5).unwrap();
        assert_eq!(s.next_value(), -0.5);
        assert_eq!(ChebyshevState::new(1.0).unwrap().next_value(), 1.0);
        assert_eq!(ChebyshevState::new(0.0).unwrap().next_value(), 1.0);
    }

    #[test]
    fn chebyshev_rejects_out_of_range_seed() {
        assert!(ChebyshevState::new(1.5).is_err());
        assert!(ChebyshevState::new(-1.0001).is_err());
    }

    #[test]
    fn chebyshev_equals_trig_form() {
        // 8x^4 - 8x^2 + 1 must agree with cos(4 arccos x) across [-1, 1].
        let mut worst = 0.0f64;
        for i in 0..1000 {
            // low-discrepancy sweep of [-1, 1]
            let x = -1.0 + 2.0 * ((i as f64 * 0.618_033_988_749_895) % 1.0);
            let poly = reference::chebyshev4(x);
            let trig = (4.0 * x.acos()).cos();
            worst = worst.max((poly - trig).abs());
            let mut s = ChebyshevState::new(x).unwrap();
            assert!((s.next_value() - trig).abs() < 1e-9);
        }
        assert!(worst < 1e-9, "max |poly - trig| = {worst}");
    }

    #[test]
    fn logistic_sine_examples() {
        let mut s = LogisticSineState::new(3.5, 0.5).unwrap();
        assert_eq!(s.next_value(), 0.0);
        let mut s = LogisticSineState::new(4.0, 0.5).unwrap();
        assert_eq!(s.next_value(), 0.0);
        // z = 0 is a fixed point for every r.
        for r in [0.0, 1.3, 2.7, 4.0] {
            let mut s = LogisticSineState::new(r, 0.0).unwrap();
            assert_eq!(s.next_value(), 0.0);
        }
    }

    #[test]
    fn logistic_sine_rejects_bad_params() {
        assert!(LogisticSineState::new(4.0001, 0.5).is_err());
        assert!(LogisticSineState::new(-0.1, 0.5).is_err());
        assert!(LogisticSineState::new(3.9, 1.0).is_err());
    }

    #[test]
    fn logistic_sine_matches_reference_orbit() {
        let mut s = LogisticSineState::new(3.9, 0.37).unwrap();
        let mut z = 0.37;
        for _ in 0..10_000 {
            z = reference::logistic_sine(z, 3.9);
            let v = s.next_value();
            assert_eq!(v, z);
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn generate_zero_is_empty() {
        let mut s = PwlcmState::new(0.4, 0.2).unwrap();
        assert!(s.generate(0).is_empty());
        assert_eq!(s.generate(1).len(), 1);
    }

    #[test]
    fn identical_seeds_are_bitwise_identical() {
        let mut a = LogisticSineState::new(3.7711, 0.2024).unwrap();
        let mut b = LogisticSineState::new(3.7711, 0.2024).unwrap();
        assert_eq!(a.generate(10_000), b.generate(10_000));

        let mut a = PwlcmState::new(0.41, 0.77).unwrap();
        let mut b = PwlcmState::new(0.41, 0.77).unwrap();
        assert_eq!(a.generate(10_000), b.generate(10_000));

        let mut a = ChebyshevState::new(0.31).unwrap();
        let mut b = ChebyshevState::new(0.31).unwrap();
        assert_eq!(a.generate(10_000), b.generate(10_000));
    }

    #[test]
    fn emitted_values_stay_in_range() {
        let mut p = PwlcmState::new(0.23, 0.6181).unwrap();
        let mut c = ChebyshevState::new(0.6181).unwrap();
        let mut l = LogisticSineState::new(3.321, 0.6181).unwrap();
        for _ in 0..10_000 {
            let y = p.next_value();
            assert!(y > 0.0 && y < 1.0, "pwlcm out of range: {y}");
            let x = c.next_value();
            assert!((-1.0..=1.0).contains(&x), "chebyshev out of range: {x}");
            let z = l.next_value();
            assert!((0.0..1.0).contains(&z), "logistic-sine out of range: {z}");
        }
    }

    #[test]
    fn pwlcm_seed_sensitivity() {
        // Seeds 2^-40 apart decorrelate once the transient has passed.
        let eps = (2.0f64).powi(-40);
        let mut a = PwlcmState::new(0.4, 0.3).unwrap();
        let mut b = PwlcmState::new(0.4, 0.3 + eps).unwrap();
        let sa = a.generate(1100);
        let sb = b.generate(1100);
        let corr = pearson(&sa[100..], &sb[100..]);
        assert!(corr.abs() < 0.2, "correlation too high: {corr}");
    }
}
