//! Networked and file-based plumbing around `qfactory-core`: binary
//! codecs, framed wire messages, in-process and TCP transports, session
//! drivers, transcripts, the statistics harness and the CLI.

pub mod cli;
pub mod codec;
pub mod harness;
pub mod keyfile;
pub mod serve;
pub mod session;
pub mod transcript;
pub mod transport;
pub mod wire;
