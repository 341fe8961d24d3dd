//! JSON-lines run records. They hold no timing, so identical seeds give
//! identical bytes.

use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use qfactory_core::protocol::{AbortReason, ClientSession, ThetaOutcome, PROTOCOL_VERSION};
use serde::{Deserialize, Serialize};

use crate::codec::{image_bytes, public_key_bytes};
use crate::session::key_hash;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptOutcome {
    ThetaR(u8),
    Abort { reason: AbortReason },
}

/// Where each party's randomness came from: `seeded_stream(seed, stream)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub seed: u64,
    pub client_stream: u64,
    pub server_stream: u64,
}

impl Seeds {
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            client_stream: 0,
            server_stream: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: u8,
    pub family: String,
    pub n: usize,
    pub k_hash: String,
    pub alpha: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y_b64: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<Vec<u8>>,
    pub outcome: TranscriptOutcome,
    pub seeds: Seeds,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fidelity: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error("session has not finished")]
    Unfinished,
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Transcript {
    /// Everything the client saw. Fails while the session is still open.
    pub fn from_client(
        client: &ClientSession,
        n: usize,
        seeds: Seeds,
    ) -> Result<Self, TranscriptError> {
        let outcome = match client.outcome().ok_or(TranscriptError::Unfinished)? {
            ThetaOutcome::Theta(r) => TranscriptOutcome::ThetaR(r.r()),
            ThetaOutcome::Abort(reason) => TranscriptOutcome::Abort { reason },
        };
        Ok(Self {
            version: PROTOCOL_VERSION,
            family: client.family().as_str().to_string(),
            n,
            k_hash: key_hash(&public_key_bytes(client.public_key())),
            alpha: client.alphas().to_vec(),
            y_b64: client.y().map(|y| B64.encode(image_bytes(y))),
            b: client.b().map(|b| b.as_slice().to_vec()),
            outcome,
            seeds,
            fidelity: None,
        })
    }

    pub fn theta_r(&self) -> Option<u8> {
        match self.outcome {
            TranscriptOutcome::ThetaR(r) => Some(r),
            TranscriptOutcome::Abort { .. } => None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }
}

pub fn write_transcripts<W: Write>(w: &mut W, transcripts: &[Transcript]) -> std::io::Result<()> {
    for t in transcripts {
        writeln!(w, "{}", t.to_json_line())?;
    }
    Ok(())
}

/// Reads one transcript per non-empty line.
pub fn read_transcripts<R: BufRead>(r: R) -> Result<Vec<Transcript>, TranscriptError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|source| TranscriptError::Parse {
                line: i + 1,
                source,
            })?,
        );
    }
    Ok(out)
}
