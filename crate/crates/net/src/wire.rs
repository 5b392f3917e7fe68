//! Frame format: magic "AVHA", one type byte, a little-endian u32 payload
//! length, then the payload. Frames are self-delimiting, so any number of
//! messages can share one stream.
//!
//! Payload conventions (all integers little-endian):
//! - PING: arbitrary bytes, echoed back verbatim in a PING reply.
//! - ENHANCE_REQ: two length-prefixed blobs: a serialized audio envelope
//!   and a feature-track text file.
//! - ENHANCE_RESP: two length-prefixed blobs: the enhanced audio envelope
//!   and a 24-byte server timing record (decrypt, enhance, re-encrypt, as
//!   u64 nanoseconds each).
//! - ERROR: a UTF-8 reason string. An ERROR reply never closes the
//!   connection; the peer may go on to send further requests.

use std::io::{Read, Write};

use crate::NetError;

pub const WIRE_MAGIC: [u8; 4] = *b"AVHA";
pub const DEFAULT_PORT: u16 = 7050;

/// Upper bound on a frame payload. A 512x512 image envelope is ~256 KiB;
/// a minute of 50 kHz audio ~6 MiB. The cap is far above both and exists
/// so a garbage length prefix cannot trigger a huge allocation.
pub const MAX_PAYLOAD: u32 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Ping = 1,
    EnhanceReq = 2,
    EnhanceResp = 3,
    Error = 4,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<MsgType> {
        match b {
            1 => Some(MsgType::Ping),
            2 => Some(MsgType::EnhanceReq),
            3 => Some(MsgType::EnhanceResp),
            4 => Some(MsgType::Error),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(msg_type: MsgType, payload: Vec<u8>) -> WireMessage {
        WireMessage { msg_type, payload }
    }

    /// An ERROR message carrying a reason string.
    pub fn error(reason: impl Into<String>) -> WireMessage {
        WireMessage::new(MsgType::Error, reason.into().into_bytes())
    }

    /// The reason string of an ERROR message.
    pub fn reason(&self) -> String {
        String::from_utf8_lossy(&self.payload).into_owned()
    }
}

pub fn write_message(w: &mut impl Write, msg: &WireMessage) -> Result<(), NetError> {
    debug_assert!(msg.payload.len() <= MAX_PAYLOAD as usize);
    w.write_all(&WIRE_MAGIC)?;
    w.write_all(&[msg.msg_type as u8])?;
    w.write_all(&(msg.payload.len() as u32).to_le_bytes())?;
    w.write_all(&msg.payload)?;
    w.flush()?;
    Ok(())
}

/// Read one frame. On an unknown type byte the payload has still been
/// consumed, so the stream stays aligned and the caller may answer with an
/// ERROR and keep reading; bad magic or a bogus length leave the stream
/// unusable.
pub fn read_message(r: &mut impl Read) -> Result<WireMessage, NetError> {
    let mut header = [0u8; 9];
    r.read_exact(&mut header)?;
    let magic: [u8; 4] = header[..4].try_into().unwrap();
    if magic != WIRE_MAGIC {
        return Err(NetError::BadFrameMagic(magic));
    }
    let len = u32::from_le_bytes(header[5..9].try_into().unwrap());
    if len > MAX_PAYLOAD {
        return Err(NetError::Oversized(len));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload)?;
    let msg_type = MsgType::from_byte(header[4]).ok_or(NetError::UnknownType(header[4]))?;
    Ok(WireMessage { msg_type, payload })
}

/// Concatenate blobs, each prefixed with its u32 length.
pub fn encode_blobs(blobs: &[&[u8]]) -> Vec<u8> {
    let total: usize = blobs.iter().map(|b| 4 + b.len()).sum();
    let mut out = Vec::with_capacity(total);
    for b in blobs {
        out.extend_from_slice(&(b.len() as u32).to_le_bytes());
        out.extend_from_slice(b);
    }
    out
}

/// Split a payload into exactly `count` length-prefixed blobs.
pub fn split_blobs(payload: &[u8], count: usize) -> Result<Vec<&[u8]>, NetError> {
    let mut blobs = Vec::with_capacity(count);
    let mut rest = payload;
    for i in 0..count {
        if rest.len() < 4 {
            return Err(NetError::BadPayload(format!(
                "blob {i} length prefix missing"
            )));
        }
        let len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
        rest = &rest[4..];
        if rest.len() < len {
            return Err(NetError::BadPayload(format!(
                "blob {i} truncated: {len} declared, {} present",
                rest.len()
            )));
        }
        blobs.push(&rest[..len]);
        rest = &rest[len..];
    }
    if !rest.is_empty() {
        return Err(NetError::BadPayload(format!(
            "{} trailing bytes after blob {}",
            rest.len(),
            count - 1
        )));
    }
    Ok(blobs)
}

/// Server-side stage durations for one enhancement request, in
/// nanoseconds. Travels as the second ENHANCE_RESP blob.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServerTiming {
    pub decrypt_ns: u64,
    pub enhance_ns: u64,
    pub reencrypt_ns: u64,
}

impl ServerTiming {
    pub fn to_bytes(self) -> [u8; 24] {
        let mut out = [0u8; 24];
        out[..8].copy_from_slice(&self.decrypt_ns.to_le_bytes());
        out[8..16].copy_from_slice(&self.enhance_ns.to_le_bytes());
        out[16..].copy_from_slice(&self.reencrypt_ns.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ServerTiming, NetError> {
        if bytes.len() != 24 {
            return Err(NetError::BadPayload(format!(
                "timing blob is {} bytes, expected 24",
                bytes.len()
            )));
        }
        Ok(ServerTiming {
            decrypt_ns: u64::from_le_bytes(bytes[..8].try_into().unwrap()),
            enhance_ns: u64::from_le_bytes(bytes[8..16].try_into().unwrap()),
            reencrypt_ns: u64::from_le_bytes(bytes[16..].try_into().unwrap()),
        })
    }
}
