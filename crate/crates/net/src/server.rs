//! Thread-per-connection TCP server. Each enhancement request is decrypted,
//! enhanced against the feature track it carried, re-encrypted under a key
//! derived from the enhanced samples, and returned with stage timings.
//! Anything malformed becomes an ERROR reply; the connection stays open.

use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use avc_core::evwf::{enhance, FeatureTrack, FrameConfig};
use avc_core::media::{parse_envelope, serialize_envelope};
use avc_core::pipeline::{decrypt_audio, encrypt_audio};

use crate::wire::{read_message, write_message, MsgType, ServerTiming, WireMessage};
use crate::NetError;

/// How often idle connection threads wake to check the shutdown flag.
const POLL_INTERVAL: Duration = Duration::from_millis(200);

/// A running server. Dropping it (or calling [`Server::stop`]) shuts the
/// accept loop down; connection handlers exit as their peers disconnect or
/// at the next idle poll.
pub struct Server {
    addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    accept_handle: Option<JoinHandle<()>>,
}

impl Server {
    /// Bind and start serving in background threads. Pass port 0 to let
    /// the OS pick one; the bound address is available via
    /// [`Server::local_addr`].
    pub fn bind(addr: impl ToSocketAddrs, cfg: FrameConfig) -> Result<Server, NetError> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let shutdown = Arc::new(AtomicBool::new(false));
        let flag = shutdown.clone();
        let accept_handle = thread::spawn(move || accept_loop(listener, flag, cfg));
        log::info!("serving on {addr}");
        Ok(Server {
            addr,
            shutdown,
            accept_handle: Some(accept_handle),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Signal shutdown and wait for the accept loop to exit.
    pub fn stop(&mut self) {
        if !self.shutdown.swap(true, Ordering::SeqCst) {
            // The accept loop is blocked in accept(); poke it awake.
            let _ = TcpStream::connect(self.addr);
        }
        if let Some(handle) = self.accept_handle.take() {
            let _ = handle.join();
        }
    }

    /// Serve on the calling thread until the process is interrupted.
    /// This is the entry point for a foreground server binary.
    pub fn run_forever(addr: impl ToSocketAddrs, cfg: FrameConfig) -> Result<(), NetError> {
        let listener = TcpListener::bind(addr)?;
        log::info!("serving on {}", listener.local_addr()?);
        accept_loop(listener, Arc::new(AtomicBool::new(false)), cfg);
        Ok(())
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.stop();
    }
}

fn accept_loop(listener: TcpListener, shutdown: Arc<AtomicBool>, cfg: FrameConfig) {
    for stream in listener.incoming() {
        if shutdown.load(Ordering::SeqCst) {
            break;
        }
        match stream {
            Ok(stream) => {
                let flag = shutdown.clone();
                let cfg = cfg.clone();
                thread::spawn(move || handle_connection(stream, flag, cfg));
            }
            Err(e) => log::warn!("accept failed: {e}"),
        }
    }
}

fn handle_connection(mut stream: TcpStream, shutdown: Arc<AtomicBool>, cfg: FrameConfig) {
    let peer = stream
        .peer_addr()
        .map(|a| a.to_string())
        .unwrap_or_else(|_| "?".into());
    if stream.set_read_timeout(Some(POLL_INTERVAL)).is_err() {
        return;
    }
    log::debug!("{peer}: connected");

    loop {
        // Idle-wait with a peek so a poll timeout can never split a frame.
        let mut probe = [0u8; 1];
        match stream.peek(&mut probe) {
            Ok(0) => break, // peer closed
            Ok(_) => {}
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                if shutdown.load(Ordering::SeqCst) {
                    break;
                }
                continue;
            }
            Err(_) => break,
        }

        match read_message(&mut stream) {
            Ok(msg) => {
                let reply = dispatch(msg, &cfg);
                if write_message(&mut stream, &reply).is_err() {
                    break;
                }
            }
            // The frame was consumed but carried an unknown type byte:
            // report and keep serving this connection.
            Err(NetError::UnknownType(t)) => {
                let reply = WireMessage::error(format!("unknown message type {t}"));
                if write_message(&mut stream, &reply).is_err() {
                    break;
                }
            }
            // Anything else desynchronizes the stream (bad magic, bogus
            // length, mid-frame EOF): report once and hang up.
            Err(e) => {
                log::debug!("{peer}: unrecoverable frame error: {e}");
                let _ = write_message(&mut stream, &WireMessage::error(e.to_string()));
                break;
            }
        }
    }
    log::debug!("{peer}: closing");
}

fn dispatch(msg: WireMessage, cfg: &FrameConfig) -> WireMessage {
    match msg.msg_type {
        MsgType::Ping => WireMessage::new(MsgType::Ping, msg.payload),
        MsgType::EnhanceReq => match process_enhance(&msg.payload, cfg) {
            Ok(payload) => WireMessage::new(MsgType::EnhanceResp, payload),
            Err(reason) => {
                log::debug!("enhance request rejected: {reason}");
                WireMessage::error(reason)
            }
        },
        MsgType::EnhanceResp | MsgType::Error => {
            WireMessage::error(format!("unexpected {:?} from client", msg.msg_type))
        }
    }
}

// The enhancement pipeline for one request. All failures come back as the
// reason string for an ERROR reply.
fn process_enhance(payload: &[u8], cfg: &FrameConfig) -> Result<Vec<u8>, String> {
    let blobs = crate::wire::split_blobs(payload, 2).map_err(|e| e.to_string())?;

    let t = Instant::now();
    let env = parse_envelope(blobs[0]).map_err(|e| e.to_string())?;
    let noisy = decrypt_audio(&env, cfg.sample_rate).map_err(|e| e.to_string())?;
    let decrypt_ns = t.elapsed().as_nanos() as u64;

    let text = std::str::from_utf8(blobs[1]).map_err(|_| "feature blob is not UTF-8")?;
    let feats = FeatureTrack::parse_text(text).map_err(|e| e.to_string())?;

    let t = Instant::now();
    let enhanced = enhance(&noisy, &feats, cfg).map_err(|e| e.to_string())?;
    let enhance_ns = t.elapsed().as_nanos() as u64;

    let t = Instant::now();
    let resp_env = encrypt_audio(&enhanced, env.poly_used).map_err(|e| e.to_string())?;
    let resp_bytes = serialize_envelope(&resp_env);
    let reencrypt_ns = t.elapsed().as_nanos() as u64;

    let timing = ServerTiming {
        decrypt_ns,
        enhance_ns,
        reencrypt_ns,
    };
    Ok(crate::wire::encode_blobs(&[&resp_bytes, &timing.to_bytes()]))
}
