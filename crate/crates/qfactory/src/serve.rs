//! The TCP server loop: one thread and one isolated session per connection.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::Mutex;
use std::thread;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use qfactory_core::protocol::{AbortReason, Backend, Outcome, ServerSession, PROTOCOL_VERSION};
use qfactory_core::seeded_stream;
use serde::Serialize;

use crate::codec::{image_bytes, public_key_bytes};
use crate::session::{key_hash, run_server, ServerPolicy};
use crate::transport::{TcpTransport, Transport};

/// How each connection's server randomness is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Every session uses `seeded_stream(seed, 1)`, matching an in-process
    /// run with the same seed.
    Fixed(u64),
    /// Connection `i` (from 0) uses `seeded_stream(seed, 2i + 1)`.
    PerConnection(u64),
    /// A fresh OS-random seed per connection.
    Entropy,
}

impl SeedPolicy {
    fn seed_for(self, connection: u64) -> (u64, u64) {
        match self {
            SeedPolicy::Fixed(seed) => (seed, 1),
            SeedPolicy::PerConnection(seed) => (seed, 2 * connection + 1),
            SeedPolicy::Entropy => (rand::random(), 1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub policy: ServerPolicy,
    pub backend: Backend,
    pub seeds: SeedPolicy,
    /// Stop accepting after this many connections.
    pub max_sessions: Option<usize>,
    /// Append one JSON line per session here.
    pub log_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionResult {
    Ok,
    Abort { reason: AbortReason },
    Error { detail: String },
}

/// The server's side of a session.
#[derive(Clone, Debug, Serialize)]
pub struct ServerRecord {
    pub version: u8,
    pub connection: u64,
    pub family: String,
    pub n: usize,
    pub k_hash: Option<String>,
    pub y_b64: Option<String>,
    pub b: Option<Vec<u8>>,
    pub result: SessionResult,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ServeSummary {
    pub sessions: usize,
    pub completed: usize,
    pub failed: usize,
}

fn handle_connection(
    stream: std::net::TcpStream,
    connection: u64,
    config: &ServeConfig,
) -> ServerRecord {
    let (seed, stream_id) = config.seeds.seed_for(connection);
    let mut server = ServerSession::new(config.backend, seeded_stream(seed, stream_id));
    let result = TcpTransport::from_stream(stream)
        .map_err(Into::into)
        .and_then(|mut t| {
            let r = run_server(&mut t, &mut server, &config.policy);
            t.close();
            r
        });
    let result = match (result, server.result()) {
        (Ok(()), Some(Outcome::Ok)) => SessionResult::Ok,
        (Ok(()), Some(Outcome::Abort(reason))) => SessionResult::Abort { reason },
        (Ok(()), None) => SessionResult::Error {
            detail: "session ended without a result".into(),
        },
        (Err(e), _) => SessionResult::Error {
            detail: e.to_string(),
        },
    };
    ServerRecord {
        version: PROTOCOL_VERSION,
        connection,
        family: config.policy.family.as_str().into(),
        n: config.policy.n,
        k_hash: server.key().map(|k| key_hash(&public_key_bytes(k))),
        y_b64: server.y().map(|y| B64.encode(image_bytes(&y))),
        b: server.b().map(|b| b.as_slice().to_vec()),
        result,
        seed,
        stream: stream_id,
    }
}

/// Accepts connections until `max_sessions` is reached (or forever).
pub fn serve(listener: TcpListener, config: ServeConfig) -> std::io::Result<ServeSummary> {
    let log = match &config.log_path {
        Some(p) => Some(BufWriter::new(
            File::options().create(true).append(true).open(p)?,
        )),
        None => None,
    };
    let log = Mutex::new(log);
    let summary = Mutex::new(ServeSummary::default());
    thread::scope(|scope| -> std::io::Result<()> {
        for (i, stream) in listener.incoming().enumerate() {
            let stream = stream?;
            let (config, log, summary) = (&config, &log, &summary);
            scope.spawn(move || {
                let record = handle_connection(stream, i as u64, config);
                log::info!("connection {i}: {:?}", record.result);
                {
                    let mut s = summary.lock().expect("summary lock");
                    s.sessions += 1;
                    match record.result {
                        SessionResult::Error { .. } => s.failed += 1,
                        _ => s.completed += 1,
                    }
                }
                if let Some(w) = log.lock().expect("log lock").as_mut() {
                    let line = serde_json::to_string(&record).expect("records serialize");
                    if let Err(e) = writeln!(w, "{line}").and_then(|()| w.flush()) {
                        log::warn!("could not write session log: {e}");
                    }
                }
            });
            if config.max_sessions.is_some_and(|max| i + 1 >= max) {
                break;
            }
        }
        Ok(())
    })?;
    Ok(summary.into_inner().expect("summary lock"))
}
