//! Lattice trapdoor functions, two-regular function constructions and quantum
//! back-ends for QFactory, a protocol in which a purely classical client makes a
//! quantum server prepare a random qubit `|+_θ⟩` whose angle only the client
//! can compute.
//!
//! The crate is `no_std` (with `alloc`) and contains only computation:
//!
//! - [`zq`]: dense linear algebra over `ℤ_q` with `q = 2^k`, the gadget matrix,
//!   rounded Gaussian sampling and bit strings.
//! - [`mp12`]: the injective LWE trapdoor function `g_K(s, e) = sᵀK + eᵀ`.
//! - [`params`] and [`reg2`]: the δ-2 regular function built on it, its
//!   parameter generator and constraint checker.
//! - [`stats`]: Monte Carlo estimators for the two-preimage rate.
//! - [`constructions`]: generic two-regular constructions from injective
//!   homomorphic or bijective trapdoor families, plus insecure toy families.
//! - [`quantum`]: a state-vector simulator and an analytic two-branch engine.
//! - [`protocol`]: client and server state machines, the client's angle
//!   recovery and the three-bit hard-core decomposition.
//!
//! IO, framing, CLI and threading live in the `qfactory` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod constructions;
pub mod encoding;
mod error;
pub mod mp12;
pub mod params;
pub mod protocol;
pub mod quantum;
pub mod reg2;
pub mod stats;
pub mod zq;

pub use error::{Error, Result};

use rand::SeedableRng;

/// The deterministic generator used throughout: every operation that consumes
/// randomness is a pure function of the seed it was started from.
pub type SeededRng = rand_chacha::ChaCha20Rng;

/// Builds a [`SeededRng`] from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Builds the `stream`-th independent generator derived from `seed`. Used to
/// give each worker or each protocol party its own reproducible stream.
pub fn seeded_stream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = SeededRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
