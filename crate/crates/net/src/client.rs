//! Blocking client over one reusable connection. The protocol is
//! self-delimiting, so any number of requests can run back to back on the
//! same stream.

use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use avc_core::media::{parse_envelope, serialize_envelope, AudioClip};
use avc_core::pipeline::{decrypt_audio, encrypt_audio};
use avc_core::evwf::FeatureTrack;
use avc_core::sbox::POLY_PRIMARY;

use crate::latency::StageSample;
use crate::wire::{
    encode_blobs, read_message, split_blobs, write_message, MsgType, ServerTiming, WireMessage,
};
use crate::NetError;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

pub struct Client {
    stream: TcpStream,
    /// Preferred S-box modulus for request encryption (subject to the
    /// usual bijectivity fallback).
    pub poly: u16,
}

impl Client {
    /// Connect with [`DEFAULT_TIMEOUT`] applied to connect, send, and
    /// receive.
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Client, NetError> {
        Client::connect_with_timeout(addr, DEFAULT_TIMEOUT)
    }

    pub fn connect_with_timeout(
        addr: impl ToSocketAddrs,
        timeout: Duration,
    ) -> Result<Client, NetError> {
        let addr = addr.to_socket_addrs()?.next().ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "address resolved to nothing")
        })?;
        let stream = TcpStream::connect_timeout(&addr, timeout)?;
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        let _ = stream.set_nodelay(true);
        Ok(Client {
            stream,
            poly: POLY_PRIMARY,
        })
    }

    /// PING with arbitrary bytes; the server echoes them verbatim.
    pub fn ping(&mut self, payload: &[u8]) -> Result<Vec<u8>, NetError> {
        write_message(
            &mut self.stream,
            &WireMessage::new(MsgType::Ping, payload.to_vec()),
        )?;
        let reply = self.read_reply(MsgType::Ping)?;
        Ok(reply.payload)
    }

    /// Encrypt `noisy`, send it with `feats`, and decrypt the enhanced
    /// reply. Returns the enhanced clip plus this request's stage timings
    /// (client stages on our clock, server stages from the reply).
    pub fn request_enhance(
        &mut self,
        noisy: &AudioClip,
        feats: &FeatureTrack,
    ) -> Result<(AudioClip, StageSample), NetError> {
        let t = Instant::now();
        let env = encrypt_audio(noisy, self.poly)?;
        let payload = encode_blobs(&[&serialize_envelope(&env), feats.to_text().as_bytes()]);
        let serialize_ms = elapsed_ms(t);

        let t = Instant::now();
        write_message(
            &mut self.stream,
            &WireMessage::new(MsgType::EnhanceReq, payload),
        )?;
        let reply = self.read_reply(MsgType::EnhanceResp)?;
        let round_trip_ms = elapsed_ms(t);

        let blobs = split_blobs(&reply.payload, 2)?;
        let resp_env = parse_envelope(blobs[0])?;
        let timing = ServerTiming::from_bytes(blobs[1])?;
        let enhanced = decrypt_audio(&resp_env, noisy.sample_rate)?;

        Ok((
            enhanced,
            StageSample {
                serialize_ms,
                round_trip_ms,
                decrypt_ms: timing.decrypt_ns as f64 / 1e6,
                enhance_ms: timing.enhance_ns as f64 / 1e6,
                reencrypt_ms: timing.reencrypt_ns as f64 / 1e6,
            },
        ))
    }

    fn read_reply(&mut self, expected: MsgType) -> Result<WireMessage, NetError> {
        let reply = read_message(&mut self.stream).map_err(|e| match e {
            NetError::Io(ref io)
                if matches!(
                    io.kind(),
                    std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                ) =>
            {
                NetError::Timeout
            }
            other => other,
        })?;
        match reply.msg_type {
            t if t == expected => Ok(reply),
            MsgType::Error => Err(NetError::Remote(reply.reason())),
            got => Err(NetError::UnexpectedReply { expected, got }),
        }
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}
