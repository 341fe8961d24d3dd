//! Closed-form Stage 2: tracks the relative phase of the two branches of
//! `(|x⟩ + |x′⟩)/√2` instead of `2^n` amplitudes.
//!
//! Measuring a qubit where the branches agree only changes the global phase.
//! Where they differ, projecting onto `|0⟩ + (−1)^b ω^α |1⟩` multiplies the
//! branch holding 1 by `ω^{4b − α}`.

use alloc::vec::Vec;

use rand::Rng;

use super::angle::QubitAngle;
use super::outcome_draw;
use crate::zq::BitString;
use crate::{Error, Result};

/// `(|x⟩ + ω^φ |x′⟩)/√2` up to global phase, with φ in units of π/4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoBranchState {
    x: BitString,
    x_prime: BitString,
    /// Phase of the `x` branch relative to the `x′` branch.
    phase: u8,
    /// Qubits already measured.
    measured: Vec<bool>,
}

/// What remains on the last qubit after Stage 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticOutput {
    /// `|+_{rπ/4}⟩`.
    Angle(QubitAngle),
    /// The branches agree on the last bit: a computational basis state.
    Fixed(u8),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticRun {
    pub b: BitString,
    pub output: AnalyticOutput,
}

impl TwoBranchState {
    pub fn new(x: BitString, x_prime: BitString) -> Result<Self> {
        if x.len() != x_prime.len() || x.is_empty() {
            return Err(Error::DimensionMismatch {
                op: "two-branch state",
                left: (1, x.len()),
                right: (1, x_prime.len()),
            });
        }
        if x == x_prime {
            return Err(Error::InvalidArgument("claw branches must differ"));
        }
        let n = x.len();
        Ok(Self {
            x,
            x_prime,
            phase: 0,
            measured: alloc::vec![false; n],
        })
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Measures `qubit` with outcome probability 1/2 each: outcome 1 iff
    /// `u ≥ 1/2`.
    pub fn measure_with(&mut self, qubit: usize, alpha: u8, u: f64) -> Result<u8> {
        if qubit >= self.x.len() || self.measured[qubit] {
            return Err(Error::InvalidArgument(
                "qubit out of range or already measured",
            ));
        }
        let b = u8::from(u >= 0.5);
        let (xi, xpi) = (self.x.get(qubit), self.x_prime.get(qubit));
        if xi != xpi {
            let factor = 4 * i64::from(b) - i64::from(alpha);
            let delta = if xi == 1 { factor } else { -factor };
            self.phase = (i64::from(self.phase) + delta).rem_euclid(8) as u8;
        }
        self.measured[qubit] = true;
        Ok(b)
    }

    /// The last qubit, once the others have been measured.
    pub fn output(&self) -> Result<AnalyticOutput> {
        let n = self.x.len();
        if self.measured[..n - 1].iter().any(|m| !m) {
            return Err(Error::InvalidArgument("unmeasured qubits remain"));
        }
        let (xn, xpn) = (self.x.get(n - 1), self.x_prime.get(n - 1));
        if xn == xpn {
            return Ok(AnalyticOutput::Fixed(xn));
        }
        // x branch carries ω^φ; put the |1⟩ component's phase relative to |0⟩.
        let r = if xn == 1 {
            i64::from(self.phase)
        } else {
            -i64::from(self.phase)
        };
        Ok(AnalyticOutput::Angle(QubitAngle::new(r)))
    }
}

/// Measures qubits `1..n−1` in order, one draw each, and reports the state
/// left on the last qubit.
pub fn analytic_run_stage2<R: Rng + ?Sized>(
    x: &BitString,
    x_prime: &BitString,
    alphas: &[u8],
    rng: &mut R,
) -> Result<AnalyticRun> {
    let mut state = TwoBranchState::new(x.clone(), x_prime.clone())?;
    let n = x.len();
    if alphas.len() != n - 1 || alphas.iter().any(|&a| a > 7) {
        return Err(Error::DimensionMismatch {
            op: "analytic stage 2",
            left: (1, alphas.len()),
            right: (1, n - 1),
        });
    }
    let mut b = BitString::zeros(n - 1);
    for (q, &alpha) in alphas.iter().enumerate() {
        b.set(q, state.measure_with(q, alpha, outcome_draw(rng))? == 1);
    }
    Ok(AnalyticRun {
        b,
        output: state.output()?,
    })
}

/// `count` Born-uniform outcomes, drawn exactly as the engines draw them.
/// Used when the partner preimage is unknown to the simulator.
pub fn sample_outcomes<R: Rng + ?Sized>(count: usize, rng: &mut R) -> BitString {
    (0..count)
        .map(|_| u8::from(outcome_draw(rng) >= 0.5))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::angle::claw_angle;
    use crate::quantum::fidelity;
    use crate::quantum::statevector::{sv_prepare_claw, sv_run_stage2};
    use crate::seeded_rng;

    fn bits(v: &[u8]) -> BitString {
        BitString::new(v.to_vec()).unwrap()
    }

    #[test]
    fn last_bit_only_gives_zero() {
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            let alphas: Vec<u8> = (0..4).map(|_| rng.random_range(0..8u8)).collect();
            let run = analytic_run_stage2(
                &bits(&[1, 0, 1, 1, 0]),
                &bits(&[1, 0, 1, 1, 1]),
                &alphas,
                &mut rng,
            )
            .unwrap();
            assert_eq!(run.output, AnalyticOutput::Angle(QubitAngle::new(0)));
        }
    }

    #[test]
    fn three_qubit_instance() {
        // b = (0, 0) needs both draws below 1/2
        let mut state = TwoBranchState::new(bits(&[1, 0, 1]), bits(&[0, 1, 0])).unwrap();
        state.measure_with(0, 1, 0.1).unwrap();
        state.measure_with(1, 2, 0.3).unwrap();
        assert_eq!(
            state.output().unwrap(),
            AnalyticOutput::Angle(QubitAngle::new(1))
        );
    }

    #[test]
    fn equal_last_bits_are_fixed() {
        let run = analytic_run_stage2(
            &bits(&[1, 0, 1]),
            &bits(&[0, 0, 1]),
            &[3, 4],
            &mut seeded_rng(2),
        )
        .unwrap();
        assert_eq!(run.output, AnalyticOutput::Fixed(1));
    }

    #[test]
    fn agrees_with_formula_and_state_vector() {
        let mut rng = seeded_rng(3);
        for _ in 0..1000 {
            let n = rng.random_range(2..=12usize);
            let x: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            let mut xp: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            xp.set(n - 1, x.get(n - 1) == 0);
            let alphas: Vec<u8> = (0..n - 1).map(|_| rng.random_range(0..8u8)).collect();
            let seed = rng.random::<u64>();
            let a = analytic_run_stage2(&x, &xp, &alphas, &mut seeded_rng(seed)).unwrap();
            let s = sv_run_stage2(
                sv_prepare_claw(&x, &xp).unwrap(),
                &alphas,
                &mut seeded_rng(seed),
            )
            .unwrap();
            assert_eq!(a.b, s.b);
            let AnalyticOutput::Angle(r) = a.output else {
                panic!("claw differs in last bit")
            };
            assert_eq!(r, claw_angle(&x, &xp, &alphas, &a.b, n - 1).unwrap());
            assert!(fidelity(s.output, r) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn sampled_outcomes_match_engine_draws() {
        let x = bits(&[1, 1, 0, 1]);
        let xp = bits(&[0, 1, 1, 0]);
        let run = analytic_run_stage2(&x, &xp, &[1, 2, 3], &mut seeded_rng(4)).unwrap();
        assert_eq!(sample_outcomes(3, &mut seeded_rng(4)), run.b);
    }

    #[test]
    fn double_measurement_rejected() {
        let mut state = TwoBranchState::new(bits(&[1, 0]), bits(&[0, 1])).unwrap();
        state.measure_with(0, 0, 0.2).unwrap();
        assert!(state.measure_with(0, 0, 0.2).is_err());
    }
}
