//! Quantum back-ends for the server's two stages.
//!
//! After the image `y` is measured the first register holds
//! `(|x⟩ + |x′⟩)/√2`. Qubits `1..n−1` are then measured in the equatorial
//! bases `|0⟩ ± e^{iα_iπ/4}|1⟩` and the last qubit is left in `|+_θ⟩`.
//!
//! Qubit `i` (1-based) is bit `i − 1` of a basis-state index, so `x_n`, the
//! branch bit `c`, is the most significant bit.
//!
//! Both engines consume one uniform `f64` per measured qubit and report
//! outcome 1 when the draw is at least the probability of outcome 0. Every
//! honest outcome has probability exactly 1/2, so under a shared seed the two
//! engines produce the same outcomes.

mod analytic;
mod angle;
mod statevector;

pub use analytic::{
    analytic_run_stage2, sample_outcomes, AnalyticOutput, AnalyticRun, TwoBranchState,
};
pub use angle::{claw_angle, fidelity, omega_power, plus_state, QubitAngle};
pub use statevector::{
    sv_prepare_claw, sv_run_stage2, sv_run_stage2_ordered, Stage2Output, StateVector, MAX_QUBITS,
};

pub use num_complex::Complex64;

/// Draws the uniform number that decides one measurement outcome.
pub(crate) fn outcome_draw<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
