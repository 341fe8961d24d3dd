//! A literal state-vector simulator for the first register.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::angle::omega_power;
use super::outcome_draw;
use crate::zq::BitString;
use crate::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 14;

/// `2^n` complex amplitudes; qubit `i` (0-based) is bit `i` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Outcomes of the equatorial measurements and the state of the last qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage2Output {
    pub b: BitString,
    pub output: [Complex64; 2],
}

fn index_of(bits: &BitString) -> usize {
    bits.iter()
        .enumerate()
        .fold(0usize, |acc, (i, b)| acc | (usize::from(b) << i))
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n,
                max: MAX_QUBITS,
            });
        }
        Ok(())
    }

    /// The computational basis state `|bits⟩`.
    pub fn basis(bits: &BitString) -> Result<Self> {
        Self::check_size(bits.len())?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << bits.len()];
        amps[index_of(bits)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits: bits.len(),
            amps,
        })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(
                "amplitude count must be a power of two",
            ));
        }
        let n = amps.len().trailing_zeros() as usize;
        Self::check_size(n)?;
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &BitString) -> Complex64 {
        self.amps[index_of(bits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨m_b|` applied to the pair `(ψ₀, ψ₁)` where
    /// `|m_b⟩ = (|0⟩ + (−1)^b ω^α |1⟩)/√2`.
    fn project(pair: (Complex64, Complex64), alpha: u8, b: u8) -> Complex64 {
        let sign = if b == 1 { -1.0 } else { 1.0 };
        (pair.0 + omega_power(i64::from(alpha)).conj() * pair.1 * sign) * FRAC_1_SQRT_2
    }

    fn pairs(&self, qubit: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let bit = 1usize << qubit;
        (0..self.amps.len())
            .filter(move |i| i & bit == 0)
            .map(move |i| (i, i | bit))
    }

    /// Born probability of outcome 0 for an equatorial measurement.
    pub fn probability_zero(&self, qubit: usize, alpha: u8) -> f64 {
        self.pairs(qubit)
            .map(|(i0, i1)| Self::project((self.amps[i0], self.amps[i1]), alpha, 0).norm_sqr())
            .sum::<f64>()
            / self.norm_sqr()
    }

    /// Measures `qubit` in the basis `|0⟩ ± e^{iαπ/4}|1⟩` with a given uniform
    /// draw `u ∈ [0, 1)`: outcome 1 iff `u ≥ Pr[0]`. The qubit stays in the
    /// register in its post-measurement state and the vector is renormalised.
    pub fn measure_equatorial_with(&mut self, qubit: usize, alpha: u8, u: f64) -> Result<u8> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument("qubit index out of range"));
        }
        if alpha > 7 {
            return Err(Error::InvalidArgument("measurement angle must be in 0..8"));
        }
        let p0 = self.probability_zero(qubit, alpha);
        let b = u8::from(u >= p0);
        let p = if b == 0 { p0 } else { 1.0 - p0 };
        if p <= 0.0 {
            return Err(Error::ZeroProbabilityBranch);
        }
        let basis_one = if b == 1 {
            -omega_power(i64::from(alpha))
        } else {
            omega_power(i64::from(alpha))
        };
        let scale = FRAC_1_SQRT_2 / libm::sqrt(p * self.norm_sqr());
        let bit = 1usize << qubit;
        for i0 in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let c = Self::project((self.amps[i0], self.amps[i1]), alpha, b);
            self.amps[i0] = c * scale;
            self.amps[i1] = c * basis_one * scale;
        }
        Ok(b)
    }

    pub fn measure_equatorial<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        alpha: u8,
        rng: &mut R,
    ) -> Result<u8> {
        self.measure_equatorial_with(qubit, alpha, outcome_draw(rng))
    }

    /// The state of `qubit`, assuming it is unentangled with the rest: read
    /// off at the configuration of the other qubits with the largest weight.
    pub fn qubit_state(&self, qubit: usize) -> Result<[Complex64; 2]> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument("qubit index out of range"));
        }
        let (i0, i1) = self
            .pairs(qubit)
            .max_by(|a, b| {
                let wa = self.amps[a.0].norm_sqr() + self.amps[a.1].norm_sqr();
                let wb = self.amps[b.0].norm_sqr() + self.amps[b.1].norm_sqr();
                wa.total_cmp(&wb)
            })
            .ok_or(Error::InvalidArgument("empty register"))?;
        let pair = [self.amps[i0], self.amps[i1]];
        let norm = libm::sqrt(pair[0].norm_sqr() + pair[1].norm_sqr());
        if norm == 0.0 {
            return Err(Error::ZeroProbabilityBranch);
        }
        Ok([pair[0] / norm, pair[1] / norm])
    }
}

/// `(|x⟩ + |x′⟩)/√2` for `x ≠ x′`.
pub fn sv_prepare_claw(x: &BitString, x_prime: &BitString) -> Result<StateVector> {
    if x.len() != x_prime.len() {
        return Err(Error::DimensionMismatch {
            op: "prepare claw",
            left: (1, x.len()),
            right: (1, x_prime.len()),
        });
    }
    if x == x_prime {
        return Err(Error::InvalidArgument("claw branches must differ"));
    }
    let mut state = StateVector::basis(x)?;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    state.amps[index_of(x)] = h;
    state.amps[index_of(x_prime)] = h;
    Ok(state)
}

/// Measures qubits `1..n−1` in order with angles `alphas` and returns the
/// outcomes together with the state of the last qubit.
pub fn sv_run_stage2<R: Rng + ?Sized>(
    state: StateVector,
    alphas: &[u8],
    rng: &mut R,
) -> Result<Stage2Output> {
    let order: Vec<usize> = (0..state.n_qubits().saturating_sub(1)).collect();
    sv_run_stage2_ordered(state, alphas, &order, rng)
}

/// Like [`sv_run_stage2`] but measuring in the given order of 0-based qubit
/// indices; outcome draws are consumed in that order.
pub fn sv_run_stage2_ordered<R: Rng + ?Sized>(
    mut state: StateVector,
    alphas: &[u8],
    order: &[usize],
    rng: &mut R,
) -> Result<Stage2Output> {
    let n = state.n_qubits();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if alphas.len() != n - 1 || sorted != (0..n - 1).collect::<Vec<_>>() {
        return Err(Error::DimensionMismatch {
            op: "stage 2",
            left: (1, alphas.len()),
            right: (1, n - 1),
        });
    }
    let mut b = BitString::zeros(n - 1);
    for &q in order {
        let outcome = state.measure_equatorial(q, alphas[q], rng)?;
        b.set(q, outcome == 1);
    }
    let output = state.qubit_state(n - 1)?;
    Ok(Stage2Output { b, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::angle::{claw_angle, fidelity, plus_state, QubitAngle};
    use crate::seeded_rng;

    fn bits(v: &[u8]) -> BitString {
        BitString::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_qubit_claw() {
        let s = sv_prepare_claw(&bits(&[0]), &bits(&[1])).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(
            s.amplitudes(),
            &[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
        );
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((s.amplitude(&bits(&[0])).re - h).abs() < 1e-15);
    }

    #[test]
    fn size_limit() {
        let big = BitString::zeros(15);
        let mut other = big.clone();
        other.set(0, true);
        assert!(matches!(
            sv_prepare_claw(&big, &other),
            Err(Error::TooManyQubits { .. })
        ));
    }

    #[test]
    fn product_qubit_measurement_leaves_rest() {
        // qubit 0 is |0⟩, qubits 1,2 hold |+_{π/4}⟩ ⊗ |1⟩
        let plus = plus_state(QubitAngle::new(1));
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0b100] = plus[0];
        amps[0b110] = plus[1];
        let mut rng = seeded_rng(1);
        let mut zeros = 0;
        for _ in 0..200 {
            let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
            assert!((s.probability_zero(0, 3) - 0.5).abs() < 1e-12);
            zeros += usize::from(s.measure_equatorial(0, 3, &mut rng).unwrap() == 0);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let q1 = s.qubit_state(1).unwrap();
            assert!((fidelity(q1, QubitAngle::new(1)) - 1.0).abs() < 1e-12);
        }
        assert!((60..140).contains(&zeros));
    }

    #[test]
    fn ghz2_hand_computation() {
        // (|00⟩ + |11⟩)/√2, measure qubit 0 with α = 0:
        // ⟨±|⊗I gives (|0⟩ ± |1⟩)/2, i.e. |+⟩ for b=0 and |−⟩ = |+_π⟩ for b=1.
        for (u, expect_b, r) in [(0.1, 0u8, 0i64), (0.9, 1, 4)] {
            let mut s = sv_prepare_claw(&bits(&[0, 0]), &bits(&[1, 1])).unwrap();
            let b = s.measure_equatorial_with(0, 0, u).unwrap();
            assert_eq!(b, expect_b);
            let out = s.qubit_state(1).unwrap();
            assert!((fidelity(out, QubitAngle::new(r)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_stage2() {
        // x = 01 (x₁=0, x₂=1), x′ = 10: bit 0 is x₁.
        let x = bits(&[0, 1]);
        let xp = bits(&[1, 0]);
        let s = sv_prepare_claw(&x, &xp).unwrap();
        let mut s2 = s.clone();
        assert_eq!(s2.measure_equatorial_with(0, 0, 0.0).unwrap(), 0);
        let out = s2.qubit_state(1).unwrap();
        assert!((fidelity(out, QubitAngle::new(0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_qubit_ignores_alpha() {
        let x = bits(&[1, 0, 1]);
        let xp = bits(&[1, 1, 0]);
        let mut outputs = Vec::new();
        for a1 in 0..8u8 {
            let run = sv_run_stage2(
                sv_prepare_claw(&x, &xp).unwrap(),
                &[a1, 5],
                &mut seeded_rng(4),
            )
            .unwrap();
            outputs.push((run.b.get(1), run.output));
        }
        for (b, out) in &outputs {
            let r = claw_angle(
                &x,
                &xp,
                &[0, 5],
                &BitString::new(alloc::vec![0, *b]).unwrap(),
                2,
            )
            .unwrap();
            assert!((fidelity(*out, r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_angle_formula() {
        let mut rng = seeded_rng(7);
        for _ in 0..300 {
            let n = rng.random_range(2..=8usize);
            let x: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            let mut xp: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            if xp == x {
                xp.set(n - 1, x.get(n - 1) == 0);
            }
            let alphas: Vec<u8> = (0..n - 1).map(|_| rng.random_range(0..8u8)).collect();
            let run = sv_run_stage2(sv_prepare_claw(&x, &xp).unwrap(), &alphas, &mut rng).unwrap();
            if x.get(n - 1) == xp.get(n - 1) {
                continue;
            }
            let r = claw_angle(&x, &xp, &alphas, &run.b, n - 1).unwrap();
            assert!((fidelity(run.output, r) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn measurement_order_is_irrelevant() {
        // positions 0 and 2 are fixed (x_i = x′_i); each qubit keeps its own draw
        let x = bits(&[1, 1, 0, 0, 1]);
        let xp = bits(&[1, 0, 0, 1, 0]);
        let alphas = [3u8, 6, 1, 2];
        let draws = [0.7, 0.2, 0.4, 0.9];
        let run = |order: [usize; 4]| {
            let mut s = sv_prepare_claw(&x, &xp).unwrap();
            let mut b = BitString::zeros(4);
            for q in order {
                b.set(
                    q,
                    s.measure_equatorial_with(q, alphas[q], draws[q]).unwrap() == 1,
                );
            }
            (b, s.qubit_state(4).unwrap())
        };
        let (b1, out1) = run([0, 1, 2, 3]);
        let (b2, out2) = run([2, 1, 0, 3]);
        assert_eq!(b1, b2);
        let overlap = (out1[0].conj() * out2[0] + out1[1].conj() * out2[1]).norm_sqr();
        assert!((overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn outcome_statistics() {
        let x = bits(&[0, 1, 1]);
        let xp = bits(&[1, 1, 0]);
        let mut rng = seeded_rng(12);
        let mut counts = [0u64; 4];
        for _ in 0..10_000 {
            let run = sv_run_stage2(sv_prepare_claw(&x, &xp).unwrap(), &[2, 7], &mut rng).unwrap();
            counts[(run.b.get(0) + 2 * run.b.get(1)) as usize] += 1;
        }
        let chi2 = crate::stats::chi_square_uniform(&counts);
        // χ²(3) survival at 16.27 is 0.001
        assert!(chi2 < 16.27, "chi2 {chi2}");
    }

    #[test]
    fn rejects_wrong_alpha_count() {
        let s = sv_prepare_claw(&bits(&[0, 0, 0]), &bits(&[1, 1, 1])).unwrap();
        assert!(sv_run_stage2(s, &[1], &mut seeded_rng(0)).is_err());
    }
}
