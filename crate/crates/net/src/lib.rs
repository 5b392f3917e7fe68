//! Loopback client/server harness for remote enhancement of encrypted
//! audio. A client encrypts a noisy clip, ships it with a clean feature
//! track, and gets back an encrypted enhanced clip; the server decrypts,
//! runs the Wiener enhancer, re-encrypts under a key derived from the
//! enhanced samples, and reports how long each stage took.
//!
//! Transport is plain TCP with length-prefixed frames (see [`wire`]); no
//! TLS, no authentication. The harness exists to exercise and time the
//! cipher + enhancer composition over a socket, not to be a deployment.

use avc_core::evwf::EvwfError;
use avc_core::media::MediaError;
use avc_core::pipeline::PipelineError;
use thiserror::Error;

pub mod client;
pub mod latency;
pub mod server;
pub mod wire;

pub use client::Client;
pub use latency::{LatencyReport, StageSample};
pub use server::Server;
pub use wire::{MsgType, ServerTiming, WireMessage, DEFAULT_PORT};

#[derive(Debug, Error)]
pub enum NetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad frame magic {0:02x?}")]
    BadFrameMagic([u8; 4]),
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("frame of {0} bytes exceeds the {max} byte cap", max = wire::MAX_PAYLOAD)]
    Oversized(u32),
    #[error("malformed payload: {0}")]
    BadPayload(String),
    #[error("request timed out")]
    Timeout,
    #[error("server reported an error: {0}")]
    Remote(String),
    #[error("expected a {expected:?} reply, got {got:?}")]
    UnexpectedReply { expected: MsgType, got: MsgType },
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error(transparent)]
    Evwf(#[from] EvwfError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}
