//! Client and server state machines, the client's angle recovery and the
//! hard-core bit decomposition.
//!
//! The state machines do no IO: each handler consumes one incoming
//! [`Message`] and returns the reply. The std crate moves them over a
//! transport.

pub mod client;
pub mod family;
pub mod hardcore;
pub mod message;
pub mod server;
pub mod theta;

pub use client::{ClientPhase, ClientSession};
pub use family::{generate, FamilyId, Image, Inversion, PublicKey, Trapdoor};
pub use message::{AbortReason, Message, Outcome, PROTOCOL_VERSION};
pub use server::{Backend, ServerOutput, ServerPhase, ServerSession};
pub use theta::{client_theta, client_theta_with_len, ThetaOutcome};
