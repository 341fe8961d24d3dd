//! The client's view of the prepared qubit.

use crate::quantum::{claw_angle, QubitAngle};
use crate::zq::BitString;
use crate::Result;

use super::message::AbortReason;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaOutcome {
    Theta(QubitAngle),
    Abort(AbortReason),
}

/// `θ = rπ/4` for the server's outcomes `b`, or an abort when the two
/// preimages agree on the last bit. The order of `x` and `x′` is irrelevant.
pub fn client_theta(
    x: &BitString,
    x_prime: &BitString,
    alphas: &[u8],
    b: &BitString,
) -> Result<ThetaOutcome> {
    client_theta_with_len(x, x_prime, alphas, b, x.len().saturating_sub(1))
}

/// [`client_theta`] summing over the first `len` positions.
pub fn client_theta_with_len(
    x: &BitString,
    x_prime: &BitString,
    alphas: &[u8],
    b: &BitString,
    len: usize,
) -> Result<ThetaOutcome> {
    let angle = claw_angle(x, x_prime, alphas, b, len)?;
    if x.last() == x_prime.last() {
        return Ok(ThetaOutcome::Abort(AbortReason::EqualLastBits));
    }
    Ok(ThetaOutcome::Theta(angle))
}
