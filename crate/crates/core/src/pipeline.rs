//! End-to-end encryption and decryption of media objects: derive the key
//! from the plaintext, build the S-box, run the cipher, and wrap or unwrap
//! the envelope. The key is always re-derived from whatever is being
//! encrypted, so identical plaintexts give identical envelopes.

use thiserror::Error;

use crate::cipher::{decrypt_matrix, encrypt_matrix, ByteMatrix, CipherError};
use crate::keyschedule::{KeyError, KeyMaterial};
use crate::media::{
    audio_to_matrix, image_to_matrix, matrix_to_audio, matrix_to_image, AudioClip, CipherEnvelope,
    GrayImage, MediaError, MediaKind,
};
use crate::sbox::{Sbox, SboxError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("envelope carries {found:?}, expected {expected:?}")]
    WrongMediaKind {
        expected: MediaKind,
        found: MediaKind,
    },
    #[error("recovered plaintext does not match the envelope digest")]
    Verification,
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error(transparent)]
    Sbox(#[from] SboxError),
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error(transparent)]
    Matrix(#[from] CipherError),
}

/// Encrypt a grayscale image. `preferred_poly` selects the S-box modulus,
/// subject to the bijectivity fallback; the modulus actually used is
/// recorded in the envelope.
pub fn encrypt_image(
    img: &GrayImage,
    preferred_poly: u16,
) -> Result<CipherEnvelope, PipelineError> {
    let key = KeyMaterial::derive(&img.pixels)?;
    let sbox = Sbox::build_or_fallback(preferred_poly)?;
    let c = encrypt_matrix(&image_to_matrix(img), &key, &sbox);
    Ok(CipherEnvelope {
        media_kind: MediaKind::Image,
        rows: c.rows() as u32,
        cols: c.cols() as u32,
        orig_len: img.pixels.len() as u64,
        poly_used: sbox.poly(),
        digest: key.digest,
        payload: c.into_data(),
    })
}

/// Decrypt an image envelope and verify the recovered pixels against the
/// digest. A mismatch means a corrupted envelope (or a tampered digest) and
/// is reported as [`PipelineError::Verification`].
pub fn decrypt_image(env: &CipherEnvelope) -> Result<GrayImage, PipelineError> {
    let key = KeyMaterial::from_digest(&env.digest);
    let (img, verified) = decrypt_image_with_key(env, &key)?;
    if !verified {
        return Err(PipelineError::Verification);
    }
    Ok(img)
}

/// Decrypt an image envelope with an explicit key, reporting whether the
/// result hashes back to the envelope digest instead of failing. This is
/// the hook for key-sensitivity experiments, which decrypt with perturbed
/// keys on purpose.
pub fn decrypt_image_with_key(
    env: &CipherEnvelope,
    key: &KeyMaterial,
) -> Result<(GrayImage, bool), PipelineError> {
    if env.media_kind != MediaKind::Image {
        return Err(PipelineError::WrongMediaKind {
            expected: MediaKind::Image,
            found: env.media_kind,
        });
    }
    let sbox = Sbox::build(env.poly_used)?;
    let c = ByteMatrix::new(env.rows as usize, env.cols as usize, env.payload.clone())?;
    let img = matrix_to_image(&decrypt_matrix(&c, key, &sbox));
    let verified = KeyMaterial::derive(&img.pixels)?.digest == env.digest;
    Ok((img, verified))
}

/// Encrypt an audio clip. The key is derived from the pre-padding sample
/// bytes, so the zero padding added by the matrix reshape cannot influence
/// it. The envelope does not carry the sample rate; supply it on decrypt.
pub fn encrypt_audio(
    clip: &AudioClip,
    preferred_poly: u16,
) -> Result<CipherEnvelope, PipelineError> {
    let key = KeyMaterial::derive(&clip.sample_bytes())?;
    let sbox = Sbox::build_or_fallback(preferred_poly)?;
    let (m, orig_len) = audio_to_matrix(clip)?;
    let c = encrypt_matrix(&m, &key, &sbox);
    Ok(CipherEnvelope {
        media_kind: MediaKind::Audio,
        rows: c.rows() as u32,
        cols: c.cols() as u32,
        orig_len,
        poly_used: sbox.poly(),
        digest: key.digest,
        payload: c.into_data(),
    })
}

/// Decrypt an audio envelope and verify against the digest.
pub fn decrypt_audio(env: &CipherEnvelope, sample_rate: u32) -> Result<AudioClip, PipelineError> {
    let key = KeyMaterial::from_digest(&env.digest);
    let (clip, verified) = decrypt_audio_with_key(env, &key, sample_rate)?;
    if !verified {
        return Err(PipelineError::Verification);
    }
    Ok(clip)
}

/// Explicit-key variant of [`decrypt_audio`]; see [`decrypt_image_with_key`].
pub fn decrypt_audio_with_key(
    env: &CipherEnvelope,
    key: &KeyMaterial,
    sample_rate: u32,
) -> Result<(AudioClip, bool), PipelineError> {
    if env.media_kind != MediaKind::Audio {
        return Err(PipelineError::WrongMediaKind {
            expected: MediaKind::Audio,
            found: env.media_kind,
        });
    }
    let sbox = Sbox::build(env.poly_used)?;
    let c = ByteMatrix::new(env.rows as usize, env.cols as usize, env.payload.clone())?;
    let clip = matrix_to_audio(&decrypt_matrix(&c, key, &sbox), env.orig_len, sample_rate)?;
    let verified = KeyMaterial::derive(&clip.sample_bytes())?.digest == env.digest;
    Ok((clip, verified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{parse_envelope, serialize_envelope};
    use crate::sbox::{POLY_AES, POLY_PRIMARY};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn image_round_trip_through_serialized_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pixels: Vec<u8> = (0..48 * 32).map(|_| rng.gen()).collect();
        let img = GrayImage::new(48, 32, pixels).unwrap();

        let env = encrypt_image(&img, POLY_PRIMARY).unwrap();
        // The default modulus is reducible, so the envelope must record the
        // fallback.
        assert_eq!(env.poly_used, POLY_AES);
        assert_eq!(env.orig_len, 48 * 32);
        assert_ne!(env.payload, img.pixels);

        let parsed = parse_envelope(&serialize_envelope(&env)).unwrap();
        assert_eq!(decrypt_image(&parsed).unwrap(), img);
    }

    #[test]
    fn audio_round_trip_preserves_samples_and_padding_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for len in [1usize, 2, 3, 999, 12_345] {
            let samples: Vec<i16> = (0..len).map(|_| rng.gen()).collect();
            let clip = AudioClip::new(50_000, samples).unwrap();
            let env = encrypt_audio(&clip, POLY_PRIMARY).unwrap();
            assert_eq!(env.orig_len, len as u64);
            let back = decrypt_audio(&env, clip.sample_rate).unwrap();
            assert_eq!(back, clip, "len {len}");
        }
    }

    #[test]
    fn encryption_is_deterministic_per_plaintext() {
        let img = GrayImage::new(16, 16, (0..=255).collect()).unwrap();
        let a = serialize_envelope(&encrypt_image(&img, POLY_PRIMARY).unwrap());
        let b = serialize_envelope(&encrypt_image(&img, POLY_PRIMARY).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn media_kind_is_enforced() {
        let img = GrayImage::new(4, 4, vec![9; 16]).unwrap();
        let env = encrypt_image(&img, POLY_PRIMARY).unwrap();
        assert!(matches!(
            decrypt_audio(&env, 50_000).unwrap_err(),
            PipelineError::WrongMediaKind { .. }
        ));
    }

    #[test]
    fn tampered_payload_fails_verification() {
        let img = GrayImage::new(8, 8, (0..64).collect()).unwrap();
        let mut env = encrypt_image(&img, POLY_PRIMARY).unwrap();
        env.payload[10] ^= 0xFF;
        assert!(matches!(
            decrypt_image(&env).unwrap_err(),
            PipelineError::Verification
        ));
    }

    #[test]
    fn perturbed_digest_scrambles_but_still_decrypts_via_explicit_key() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pixels: Vec<u8> = (0..64 * 64).map(|_| rng.gen()).collect();
        let img = GrayImage::new(64, 64, pixels).unwrap();
        let env = encrypt_image(&img, POLY_PRIMARY).unwrap();

        let mut digest = env.digest;
        digest[0] ^= 0x01;
        let wrong = KeyMaterial::from_digest(&digest);
        let (garbled, verified) = decrypt_image_with_key(&env, &wrong).unwrap();
        assert!(!verified);
        let diff = garbled
            .pixels
            .iter()
            .zip(&img.pixels)
            .filter(|(a, b)| a != b)
            .count();
        assert!(diff as f64 / 4096.0 > 0.99, "only {diff} bytes differ");

        // The strict API refuses the same tampered envelope outright.
        let mut bad = env.clone();
        bad.digest = digest;
        assert!(matches!(
            decrypt_image(&bad).unwrap_err(),
            PipelineError::Verification
        ));
    }
}
