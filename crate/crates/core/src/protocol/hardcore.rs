//! The three bits `B̃₁B̃₂B̃₃` of the output angle as closed-form functions
//! of `z = x − x′`, `x̃ = x ⊕ x′`, the bit planes of `α` and `b`.
//!
//! With `α_i = 4α_i⁽¹⁾ + 2α_i⁽²⁾ + α_i⁽³⁾`, `S₀ = Σ z_i b_i` and
//! `S_j = Σ z_i α_i⁽ʲ⁾`:
//!
//! ```text
//! B̃₃ = ⟨x̃, α⁽³⁾⟩ mod 2
//! B̃₂ = ⟨x̃, α⁽²⁾⟩ mod 2 ⊕ h₂,     h₂ = (S₃ mod 4 − S₃ mod 2)/2
//! B̃₁ = ⟨x̃, α⁽¹⁾⟩ mod 2 ⊕ h₁,     h₁ = ⟨z, b⟩ mod 2 ⊕ ((T − T mod 2)/2 mod 2)
//!                                   T = S₂ + (S₃ − S₃ mod 2)/2
//! ```
//!
//! so that `4B̃₁ + 2B̃₂ + B̃₃ = Σ z_i(4b_i + α_i) mod 8`. The sign
//! `(−1)^{x_n}` of the protocol angle is not part of these bits. All `mod`
//! operations are Euclidean.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::zq::BitString;
use crate::{Error, Result};

/// Inputs to the decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardcoreInputs {
    z: Vec<i8>,
    x_tilde: BitString,
    alpha1: BitString,
    alpha2: BitString,
    alpha3: BitString,
    b: BitString,
}

impl HardcoreInputs {
    /// From `z ∈ {−1, 0, 1}^len`, angles in `0..8` and outcome bits.
    pub fn new(z: Vec<i8>, alphas: &[u8], b: BitString) -> Result<Self> {
        if alphas.len() != z.len() || b.len() != z.len() {
            return Err(Error::DimensionMismatch {
                op: "hardcore inputs",
                left: (1, z.len()),
                right: (alphas.len(), b.len()),
            });
        }
        if z.iter().any(|v| !(-1..=1).contains(v)) || alphas.iter().any(|&a| a > 7) {
            return Err(Error::InvalidArgument(
                "z must be in {-1,0,1} and alpha in 0..8",
            ));
        }
        let plane = |shift: u8| {
            alphas
                .iter()
                .map(|&a| (a >> shift) & 1)
                .collect::<BitString>()
        };
        Ok(Self {
            x_tilde: z.iter().map(|&v| u8::from(v != 0)).collect(),
            alpha1: plane(2),
            alpha2: plane(1),
            alpha3: plane(0),
            z,
            b,
        })
    }

    /// From a claw, summing over the first `len` positions.
    pub fn from_claw(
        x: &BitString,
        x_prime: &BitString,
        alphas: &[u8],
        b: &BitString,
        len: usize,
    ) -> Result<Self> {
        if x.len() != x_prime.len() || len > x.len() || alphas.len() < len || b.len() < len {
            return Err(Error::DimensionMismatch {
                op: "hardcore inputs from claw",
                left: (x.len(), x_prime.len()),
                right: (alphas.len(), b.len()),
            });
        }
        let z = (0..len)
            .map(|i| x.get(i) as i8 - x_prime.get(i) as i8)
            .collect();
        Self::new(z, &alphas[..len], b.iter().take(len).collect())
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[i8] {
        &self.z
    }

    pub fn x_tilde(&self) -> &BitString {
        &self.x_tilde
    }

    fn signed_sum(&self, plane: &BitString) -> i64 {
        self.z
            .iter()
            .zip(plane.iter())
            .map(|(&z, bit)| i64::from(z) * i64::from(bit))
            .sum()
    }

    fn parity_with(&self, plane: &BitString) -> u8 {
        (self
            .x_tilde
            .iter()
            .zip(plane.iter())
            .map(|(a, b)| a & b)
            .sum::<u8>())
            & 1
    }

    /// `(S₀, S₁, S₂, S₃)`.
    pub fn sums(&self) -> [i64; 4] {
        [
            self.signed_sum(&self.b),
            self.signed_sum(&self.alpha1),
            self.signed_sum(&self.alpha2),
            self.signed_sum(&self.alpha3),
        ]
    }

    /// `Σ z_i (4b_i + α_i) mod 8` computed directly.
    pub fn direct_value(&self) -> u8 {
        let total: i64 = (0..self.len())
            .map(|i| {
                let alpha = 4 * self.alpha1.get(i) + 2 * self.alpha2.get(i) + self.alpha3.get(i);
                i64::from(self.z[i]) * (4 * i64::from(self.b.get(i)) + i64::from(alpha))
            })
            .sum();
        total.rem_euclid(8) as u8
    }
}

/// `h₂(z, α⁽³⁾)`.
pub fn h2(inputs: &HardcoreInputs) -> u8 {
    let s3 = inputs.sums()[3];
    ((s3.rem_euclid(4) - s3.rem_euclid(2)) / 2) as u8
}

/// `h₁(z, α⁽³⁾, α⁽²⁾, b)`.
pub fn h1(inputs: &HardcoreInputs) -> u8 {
    let [s0, _, s2, s3] = inputs.sums();
    let t = s2 + (s3 - s3.rem_euclid(2)) / 2;
    let carry = ((t - t.rem_euclid(2)) / 2).rem_euclid(2) as u8;
    (s0.rem_euclid(2) as u8) ^ carry
}

/// `(B̃₁, B̃₂, B̃₃)`.
pub fn hardcore_bits(inputs: &HardcoreInputs) -> (u8, u8, u8) {
    let b3 = inputs.parity_with(&inputs.alpha3);
    let b2 = inputs.parity_with(&inputs.alpha2) ^ h2(inputs);
    let b1 = inputs.parity_with(&inputs.alpha1) ^ h1(inputs);
    (b1, b2, b3)
}

/// `4B̃₁ + 2B̃₂ + B̃₃`.
pub fn hardcore_value(inputs: &HardcoreInputs) -> u8 {
    let (b1, b2, b3) = hardcore_bits(inputs);
    4 * b1 + 2 * b2 + b3
}

/// The seven modular identities the decomposition is derived from, for
/// `a, b, d, e` natural numbers.
pub mod identities {
    fn m(v: i128, k: i128) -> i128 {
        v.rem_euclid(k)
    }

    pub fn i1(a: i128, b: i128) -> bool {
        m(a + b, 8) == m(m(a, 8) + m(b, 8), 8)
    }

    pub fn i2(a: i128, b: i128) -> bool {
        m(m(a + b, 8), 4) == m(m(a, 4) + m(b, 4), 4)
    }

    pub fn i3(a: i128, b: i128) -> bool {
        m(m(a + b, 4), 2) == m(m(a, 2) + m(b, 2), 2)
    }

    pub fn i4(a: i128) -> bool {
        m(2 * a, 4) == 2 * m(a, 2)
    }

    pub fn i5(a: i128) -> bool {
        m(2 * a, 8) == 2 * m(a, 4)
    }

    pub fn i6(d: i128, e: i128) -> bool {
        m(2 * d + e, 4) - m(e, 2) == m(2 * d + e - m(e, 2), 4)
    }

    pub fn i7(d: i128, e: i128) -> bool {
        m(2 * d + e, 8) - m(e, 2) == m(2 * d + e - m(e, 2), 8)
    }
}

/// One named check and the counterexamples it found (at most
/// [`MAX_REPORTED`] are kept).
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityCheck {
    pub name: String,
    pub trials: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
}

pub const MAX_REPORTED: usize = 10;

impl IdentityCheck {
    fn new(name: &str) -> Self {
        Self {
            name: String::from(name),
            trials: 0,
            failures: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < MAX_REPORTED {
                self.counterexamples.push(describe());
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn total_failures(&self) -> u64 {
        self.checks.iter().map(|c| c.failures).sum()
    }
}

fn random_claw<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> (BitString, BitString, Vec<u8>, BitString) {
    let x: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let xp: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let alphas: Vec<u8> = (0..n).map(|_| rng.random_range(0..8u8)).collect();
    let b: BitString = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    (x, xp, alphas, b)
}

/// Checks the decomposition identity on `trials` random claws of length
/// `1..=n_max`, once summing over `n − 1` positions and once over all `n`.
pub fn check_decomposition_random<R: Rng + ?Sized>(
    trials: u64,
    n_max: usize,
    rng: &mut R,
) -> Result<IdentityReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2"));
    }
    let mut short = IdentityCheck::new("decomposition, sum to n-1");
    let mut full = IdentityCheck::new("decomposition, sum to n");
    for _ in 0..trials {
        let n = rng.random_range(2..=n_max);
        let (x, xp, alphas, b) = random_claw(n, rng);
        for (check, len) in [(&mut short, n - 1), (&mut full, n)] {
            let inputs = HardcoreInputs::from_claw(&x, &xp, &alphas, &b, len)?;
            let got = hardcore_value(&inputs);
            let want = inputs.direct_value();
            check.record(got == want, || {
                format!("x={x:?} x'={xp:?} alpha={alphas:?} b={b:?} len={len}: {got} != {want}")
            });
        }
    }
    Ok(IdentityReport {
        checks: alloc::vec![short, full],
    })
}

/// Every `z ∈ {−1,0,1}^n`, `α ∈ {0..7}^n`, `b ∈ {0,1}^n` for `n = 1..=n_max`.
pub fn check_decomposition_exhaustive(n_max: usize) -> Result<IdentityCheck> {
    if n_max > 5 {
        return Err(Error::InvalidArgument(
            "exhaustive check is limited to n <= 5",
        ));
    }
    let mut check = IdentityCheck::new("decomposition, exhaustive");
    for n in 1..=n_max {
        let z_count = 3usize.pow(n as u32);
        for zi in 0..z_count {
            let z: Vec<i8> = (0..n)
                .map(|i| ((zi / 3usize.pow(i as u32)) % 3) as i8 - 1)
                .collect();
            for ai in 0..(1usize << (3 * n)) {
                let alphas: Vec<u8> = (0..n).map(|i| ((ai >> (3 * i)) & 7) as u8).collect();
                for bi in 0..(1u64 << n) {
                    let b = BitString::from_u64(bi, n);
                    let inputs = HardcoreInputs::new(z.clone(), &alphas, b)?;
                    let got = hardcore_value(&inputs);
                    let want = inputs.direct_value();
                    check.record(got == want, || {
                        format!("z={z:?} alpha={alphas:?} b={bi:b}: {got} != {want}")
                    });
                }
            }
        }
    }
    Ok(check)
}

/// Property-checks I1–I7 on `trials` random tuples of naturals below 2^40,
/// then the decomposition on `trials` random claws up to `n_max`.
pub fn verify_identity_suite<R: Rng + ?Sized>(
    trials: u64,
    n_max: usize,
    rng: &mut R,
) -> Result<IdentityReport> {
    use identities::*;
    let mut checks: Vec<IdentityCheck> = ["I1", "I2", "I3", "I4", "I5", "I6", "I7"]
        .iter()
        .map(|n| IdentityCheck::new(n))
        .collect();
    let bound = 1i128 << 40;
    for _ in 0..trials {
        let a = rng.random_range(0..bound);
        let b = rng.random_range(0..bound);
        let results = [
            i1(a, b),
            i2(a, b),
            i3(a, b),
            i4(a),
            i5(a),
            i6(a, b),
            i7(a, b),
        ];
        for (check, ok) in checks.iter_mut().zip(results) {
            check.record(ok, || format!("a={a} b={b}"));
        }
    }
    let mut report = check_decomposition_random(trials, n_max, rng)?;
    checks.append(&mut report.checks);
    Ok(IdentityReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::claw_angle;
    use crate::seeded_rng;
    use alloc::vec;

    #[test]
    fn zero_z_gives_zero_bits() {
        let inputs =
            HardcoreInputs::new(vec![0, 0, 0], &[5, 3, 7], BitString::from_u64(0b101, 3)).unwrap();
        assert_eq!(hardcore_bits(&inputs), (0, 0, 0));
    }

    #[test]
    fn single_position_all_ones() {
        // z=(1), α=3, b=1: 4 + 3 = 7
        let inputs = HardcoreInputs::new(vec![1], &[3], BitString::from_u64(1, 1)).unwrap();
        assert_eq!(inputs.direct_value(), 7);
        assert_eq!(hardcore_bits(&inputs), (1, 1, 1));
    }

    #[test]
    fn i4_spot_value() {
        assert!(identities::i4(3));
        assert_eq!((2 * 3) % 4, 2 * (3 % 2));
    }

    #[test]
    fn identities_hold_for_negative_integers_too() {
        let mut rng = seeded_rng(1);
        for _ in 0..1000 {
            let a = rng.random_range(-1000i128..1000);
            let b = rng.random_range(-1000i128..1000);
            assert!(identities::i6(a, b) && identities::i7(a, b) && identities::i1(a, b));
        }
    }

    #[test]
    fn exhaustive_small() {
        let check = check_decomposition_exhaustive(3).unwrap();
        assert_eq!(check.failures, 0);
        assert_eq!(check.trials, 3 * 8 * 2 + 9 * 64 * 4 + 27 * 512 * 8);
    }

    #[test]
    fn random_suite_is_clean() {
        let report = verify_identity_suite(2000, 32, &mut seeded_rng(2)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 9);
    }

    #[test]
    fn matches_protocol_angle_up_to_sign() {
        let mut rng = seeded_rng(3);
        for _ in 0..500 {
            let n = rng.random_range(2..=16usize);
            let (x, mut xp, alphas, b) = random_claw(n, &mut rng);
            xp.set(n - 1, x.get(n - 1) == 0);
            let inputs = HardcoreInputs::from_claw(&x, &xp, &alphas, &b, n - 1).unwrap();
            let v = i64::from(hardcore_value(&inputs));
            let sign = if x.get(n - 1) == 1 { -1 } else { 1 };
            let r = claw_angle(&x, &xp, &alphas, &b, n - 1).unwrap();
            assert_eq!(i64::from(r.r()), (sign * v).rem_euclid(8));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(HardcoreInputs::new(vec![2], &[0], BitString::zeros(1)).is_err());
        assert!(HardcoreInputs::new(vec![1], &[8], BitString::zeros(1)).is_err());
        assert!(HardcoreInputs::new(vec![1, 0], &[1], BitString::zeros(2)).is_err());
    }
}
