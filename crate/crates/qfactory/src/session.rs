//! Runs the protocol state machines over a [`Transport`].
//!
//! Message flow:
//!
//! ```text
//! client                         server
//!   Hello ───────────────────────▶
//!         ◀─────────────────────── Hello
//!   PublicKey ───────────────────▶
//!         ◀─────────────────────── MeasuredY
//!   MeasureInstruction | Result ─▶
//!         ◀─────────────────────── Outcomes
//!   Result ──────────────────────▶
//! ```

use qfactory_core::params::gen_params;
use qfactory_core::protocol::{ClientSession, FamilyId, Message, ServerSession, PROTOCOL_VERSION};
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::transport::Transport;
use crate::wire::{code, WireError};

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("peer reported error {code}: {detail}")]
    Remote { code: u8, detail: String },
    #[error("rejected peer with error {code}: {detail}")]
    Rejected { code: u8, detail: String },
    #[error(transparent)]
    Protocol(#[from] qfactory_core::Error),
}

/// SHA-256 over everything both parties must agree on before a key is sent.
pub fn params_digest(family: FamilyId, n: usize) -> Result<[u8; 32], qfactory_core::Error> {
    let mut h = Sha256::new();
    h.update(b"qfactory-params");
    h.update([PROTOCOL_VERSION, family.code()]);
    h.update((n as u64).to_le_bytes());
    h.update((family.register_bits(n)? as u64).to_le_bytes());
    if family == FamilyId::Reg2 {
        let p = gen_params(n)?;
        h.update(p.k.to_le_bytes());
        h.update((p.m as u64).to_le_bytes());
        h.update(p.mu.to_le_bytes());
        h.update(p.mu_prime.num.to_le_bytes());
        h.update(p.mu_prime.den.to_le_bytes());
    }
    Ok(h.finalize().into())
}

/// Hex SHA-256 of an encoded public key.
pub fn key_hash(key_bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(key_bytes))
}

fn reject<T: Transport>(t: &mut T, code: u8, detail: String) -> SessionError {
    let _ = t.send(&Message::Error {
        code,
        detail: detail.clone(),
    });
    t.close();
    SessionError::Rejected { code, detail }
}

fn receive_or_reject<T: Transport>(t: &mut T) -> Result<Message, SessionError> {
    match t.receive() {
        Ok(Message::Error { code, detail }) => Err(SessionError::Remote { code, detail }),
        Ok(msg) => Ok(msg),
        Err(WireError::Closed) => Err(WireError::Closed.into()),
        Err(e) => Err(reject(t, code::FRAME, e.to_string())),
    }
}

/// Drives `client` to completion: afterwards it is either done or aborted.
pub fn run_client<T: Transport>(
    t: &mut T,
    client: &mut ClientSession,
    n: usize,
) -> Result<(), SessionError> {
    let family = client.family();
    let digest = params_digest(family, n)?;
    t.send(&Message::Hello {
        version: PROTOCOL_VERSION,
        params_digest: digest,
        family,
    })?;
    match receive_or_reject(t)? {
        Message::Hello {
            version,
            params_digest,
            ..
        } if version == PROTOCOL_VERSION && params_digest == digest => {}
        other => {
            return Err(reject(
                t,
                code::UNEXPECTED,
                format!("bad handshake reply {}", other.name()),
            ))
        }
    }
    t.send(&client.key_message())?;
    loop {
        let msg = receive_or_reject(t)?;
        let reply = match client.handle(msg) {
            Ok(reply) => reply,
            Err(e) => return Err(reject(t, code::UNEXPECTED, e.to_string())),
        };
        let last = matches!(reply, Message::Result(_));
        t.send(&reply)?;
        if last {
            t.close();
            return Ok(());
        }
    }
}

/// What a server accepts.
#[derive(Clone, Debug)]
pub struct ServerPolicy {
    pub family: FamilyId,
    pub n: usize,
}

/// Drives `server` through one session.
pub fn run_server<T: Transport, R: Rng>(
    t: &mut T,
    server: &mut ServerSession<R>,
    policy: &ServerPolicy,
) -> Result<(), SessionError> {
    let expected = params_digest(policy.family, policy.n)?;
    match receive_or_reject(t)? {
        Message::Hello { version, .. } if version != PROTOCOL_VERSION => {
            return Err(reject(
                t,
                code::VERSION,
                format!("protocol version {version} unsupported"),
            ));
        }
        Message::Hello { family, .. } if family != policy.family => {
            return Err(reject(
                t,
                code::FAMILY,
                format!("this server runs {}, not {family}", policy.family),
            ));
        }
        Message::Hello { params_digest, .. } if params_digest != expected => {
            return Err(reject(t, code::DIGEST, "parameter digest mismatch".into()));
        }
        Message::Hello { family, .. } => t.send(&Message::Hello {
            version: PROTOCOL_VERSION,
            params_digest: expected,
            family,
        })?,
        other => {
            return Err(reject(
                t,
                code::UNEXPECTED,
                format!("expected Hello, got {}", other.name()),
            ))
        }
    }
    loop {
        let msg = receive_or_reject(t)?;
        if let Message::PublicKey(key) = &msg {
            if key.family() != policy.family || key.size() != policy.n {
                return Err(reject(
                    t,
                    code::DIGEST,
                    "public key does not match the agreed parameters".into(),
                ));
            }
        }
        match server.handle(msg) {
            Ok(Some(reply)) => t.send(&reply)?,
            Ok(None) => {
                t.close();
                return Ok(());
            }
            Err(e @ qfactory_core::Error::Protocol(_)) => {
                return Err(reject(t, code::UNEXPECTED, e.to_string()))
            }
            Err(e) => return Err(reject(t, code::INTERNAL, e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::channel_pair;
    use qfactory_core::protocol::{Backend, ClientPhase};
    use qfactory_core::{seeded_stream, SeededRng};

    #[test]
    fn digests_differ_by_family_and_size() {
        let a = params_digest(FamilyId::ToyLinear, 6).unwrap();
        assert_ne!(a, params_digest(FamilyId::ToyPerm, 6).unwrap());
        assert_ne!(a, params_digest(FamilyId::ToyLinear, 7).unwrap());
        assert_eq!(a, params_digest(FamilyId::ToyLinear, 6).unwrap());
    }

    fn serve_one(
        policy: ServerPolicy,
        t: crate::transport::ChannelTransport,
    ) -> std::thread::JoinHandle<Result<(), SessionError>> {
        std::thread::spawn(move || {
            let mut t = t;
            let mut server: ServerSession<SeededRng> =
                ServerSession::new(Backend::StateVector, seeded_stream(1, 1));
            run_server(&mut t, &mut server, &policy)
        })
    }

    #[test]
    fn honest_session_over_channels() {
        let (mut c, s) = channel_pair();
        let handle = serve_one(
            ServerPolicy {
                family: FamilyId::ToyPerm,
                n: 5,
            },
            s,
        );
        let mut client =
            ClientSession::new(FamilyId::ToyPerm, 5, &mut seeded_stream(1, 0)).unwrap();
        run_client(&mut c, &mut client, 5).unwrap();
        assert_eq!(client.phase(), ClientPhase::Done);
        handle.join().unwrap().unwrap();
    }

    #[test]
    fn family_mismatch_is_reported() {
        let (mut c, s) = channel_pair();
        let handle = serve_one(
            ServerPolicy {
                family: FamilyId::ToyPerm,
                n: 5,
            },
            s,
        );
        let mut client =
            ClientSession::new(FamilyId::ToyLinear, 5, &mut seeded_stream(1, 0)).unwrap();
        let err = run_client(&mut c, &mut client, 5).unwrap_err();
        assert!(matches!(
            err,
            SessionError::Remote {
                code: code::FAMILY,
                ..
            }
        ));
        assert!(matches!(
            handle.join().unwrap(),
            Err(SessionError::Rejected {
                code: code::FAMILY,
                ..
            })
        ));
    }

    #[test]
    fn size_mismatch_fails_the_digest() {
        let (mut c, s) = channel_pair();
        let handle = serve_one(
            ServerPolicy {
                family: FamilyId::ToyPerm,
                n: 6,
            },
            s,
        );
        let mut client =
            ClientSession::new(FamilyId::ToyPerm, 5, &mut seeded_stream(1, 0)).unwrap();
        let err = run_client(&mut c, &mut client, 5).unwrap_err();
        assert!(matches!(
            err,
            SessionError::Remote {
                code: code::DIGEST,
                ..
            }
        ));
        assert!(handle.join().unwrap().is_err());
    }

    #[test]
    fn version_mismatch_is_reported() {
        let (mut c, s) = channel_pair();
        let handle = serve_one(
            ServerPolicy {
                family: FamilyId::ToyPerm,
                n: 5,
            },
            s,
        );
        c.send(&Message::Hello {
            version: PROTOCOL_VERSION + 1,
            params_digest: [0; 32],
            family: FamilyId::ToyPerm,
        })
        .unwrap();
        assert!(matches!(
            c.receive().unwrap(),
            Message::Error {
                code: code::VERSION,
                ..
            }
        ));
        assert!(handle.join().unwrap().is_err());
    }

    #[test]
    fn truncated_frame_gets_frame_error() {
        let (mut c, s) = channel_pair();
        let handle = serve_one(
            ServerPolicy {
                family: FamilyId::ToyPerm,
                n: 5,
            },
            s,
        );
        c.send_raw(&[0, 0, 0, 9, 1, 1]).unwrap();
        c.close();
        assert!(matches!(
            c.receive().unwrap(),
            Message::Error {
                code: code::FRAME,
                ..
            }
        ));
        assert!(matches!(
            handle.join().unwrap(),
            Err(SessionError::Rejected {
                code: code::FRAME,
                ..
            })
        ));
    }
}
