use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::zq::BitString;
use crate::{Error, Result};

/// An angle `θ = rπ/4` with `r ∈ {0, …, 7}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitAngle(u8);

impl QubitAngle {
    /// Reduces `r` modulo 8.
    pub fn new(r: i64) -> Self {
        Self(r.rem_euclid(8) as u8)
    }

    pub fn r(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * core::f64::consts::FRAC_PI_4
    }
}

/// `ω^r` with `ω = e^{iπ/4}`, from an exact table.
pub fn omega_power(r: i64) -> Complex64 {
    let h = FRAC_1_SQRT_2;
    match r.rem_euclid(8) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(h, h),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-h, h),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-h, -h),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(h, -h),
    }
}

/// `|+_θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2`.
pub fn plus_state(angle: QubitAngle) -> [Complex64; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [h, omega_power(i64::from(angle.r())) * h]
}

/// `|⟨+_θ|a⟩|²`, normalising `a` first.
pub fn fidelity(a: [Complex64; 2], angle: QubitAngle) -> f64 {
    let norm = a[0].norm_sqr() + a[1].norm_sqr();
    if norm == 0.0 {
        return 0.0;
    }
    let overlap = a[0] + omega_power(i64::from(angle.r())).conj() * a[1];
    overlap.norm_sqr() / (2.0 * norm)
}

/// `r = (−1)^{x_n} Σ_{i<len} (x_i − x′_i)(4b_i + α_i) mod 8`, summed over the
/// first `len` positions (normally `n − 1`).
pub fn claw_angle(
    x: &BitString,
    x_prime: &BitString,
    alphas: &[u8],
    b: &BitString,
    len: usize,
) -> Result<QubitAngle> {
    let n = x.len();
    if x_prime.len() != n || n == 0 || len > n || alphas.len() < len || b.len() < len {
        return Err(Error::DimensionMismatch {
            op: "claw angle",
            left: (x.len(), x_prime.len()),
            right: (alphas.len(), b.len()),
        });
    }
    let sum: i64 = (0..len)
        .map(|i| {
            let z = i64::from(x.get(i)) - i64::from(x_prime.get(i));
            z * (4 * i64::from(b.get(i)) + i64::from(alphas[i]))
        })
        .sum();
    let sign = if x.get(n - 1) == 1 { -1 } else { 1 };
    Ok(QubitAngle::new(sign * sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_trigonometry() {
        for r in 0..8 {
            let t = f64::from(r as u8) * core::f64::consts::FRAC_PI_4;
            let w = omega_power(r);
            assert!((w.re - libm::cos(t)).abs() < 1e-15 && (w.im - libm::sin(t)).abs() < 1e-15);
        }
        assert_eq!(omega_power(-1), omega_power(7));
    }

    #[test]
    fn fidelity_cases() {
        let plus = plus_state(QubitAngle::new(0));
        assert!((fidelity(plus, QubitAngle::new(0)) - 1.0).abs() < 1e-15);
        assert!(fidelity(plus, QubitAngle::new(4)).abs() < 1e-15);
        let quarter = plus_state(QubitAngle::new(1));
        assert!((fidelity(quarter, QubitAngle::new(1)) - 1.0).abs() < 1e-15);
        // global phase is irrelevant
        let rotated = [quarter[0] * omega_power(3), quarter[1] * omega_power(3)];
        assert!((fidelity(rotated, QubitAngle::new(1)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_reduction() {
        assert_eq!(QubitAngle::new(-3).r(), 5);
        assert_eq!(QubitAngle::new(17).r(), 1);
    }

    #[test]
    fn last_bit_only_difference_gives_zero() {
        let x = BitString::new(alloc::vec![1, 0, 1, 1]).unwrap();
        let xp = BitString::new(alloc::vec![1, 0, 1, 0]).unwrap();
        let b = BitString::new(alloc::vec![1, 1, 0]).unwrap();
        assert_eq!(claw_angle(&x, &xp, &[3, 5, 7], &b, 3).unwrap().r(), 0);
    }

    #[test]
    fn three_qubit_instance() {
        // x=(1,0,1), x′=(0,1,0), α=(1,2), b=(0,0):
        // (−1)^1 · [(1)(0+1) + (−1)(0+2)] = −(1 − 2) = 1
        let x = BitString::new(alloc::vec![1, 0, 1]).unwrap();
        let xp = BitString::new(alloc::vec![0, 1, 0]).unwrap();
        let b = BitString::zeros(2);
        assert_eq!(claw_angle(&x, &xp, &[1, 2], &b, 2).unwrap().r(), 1);
    }
}
