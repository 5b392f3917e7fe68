//! Chaotic audio-visual encryption with plaintext-derived keys, the security
//! metrics used to evaluate it, and a visually-driven Wiener filter for
//! speech enhancement in the encrypted-transport pipeline.
//!
//! The crate is organized bottom-up:
//!
//! * [`chaos`]: the three iterated maps (PWLCM, Chebyshev, logistic-sine).
//! * [`keyschedule`]: SHA-512 of the plaintext sliced into map seeds.
//! * [`sbox`]: GF(2^8) inverse + affine substitution box.
//! * [`cipher`]: permute-rows, permute-columns, XOR keystream, substitute.
//! * [`media`]: PGM images, WAV audio, the cipher envelope container.
//! * [`pipeline`]: one-call encrypt/decrypt over media buffers.
//! * [`metrics`]: correlation, entropy, GLCM, NPCR/UACI/NSCR.
//! * [`synth`]: deterministic test-signal and test-image generators.
//! * [`evwf`]: STFT, mel filterbank, visual feature codec, Wiener filter.

pub mod chaos;
pub mod cipher;
pub mod evwf;
pub mod keyschedule;
pub mod media;
pub mod metrics;
pub mod pipeline;
pub mod sbox;
pub mod synth;
