//! The δ-2 regular function
//!
//! ```text
//! f(s, e, c) = sᵀA + eᵀ + c·b₀      b₀ = s₀ᵀA + e₀ᵀ
//! ```
//!
//! over the domain `ℤ_q^n × [−μ, μ]^m × {0,1}`. An image has two preimages
//! `(s, e, 0)` and `(s − s₀, e − e₀, 1)` exactly when both error vectors stay
//! inside the domain.

use rand::Rng;

use crate::encoding::{decode_preimage, encode_preimage};
use crate::mp12::{eval_raw, lwe_gen, lwe_gen_from, lwe_inv, Mp12Key, Mp12Trapdoor};
use crate::params::LweParams;
use crate::zq::{
    sample_gaussian_vector, BitString, SignedMatrix, SignedVector, ZqMatrix, ZqVector,
};
use crate::{Error, Result};

/// Public index `(A, b₀)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Reg2Key {
    lwe: Mp12Key,
    b0: ZqVector,
}

/// Secret `(R, s₀, e₀)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Reg2Trapdoor {
    lwe: Mp12Trapdoor,
    s0: ZqVector,
    e0: SignedVector,
}

/// A domain point `(s, e, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reg2Preimage {
    pub s: ZqVector,
    pub e: SignedVector,
    pub c: bool,
}

/// Result of inverting an image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reg2Inversion {
    /// The claw: the `c = 0` preimage first, then the `c = 1` preimage.
    Two(Reg2Preimage, Reg2Preimage),
    /// Only one candidate lies in the domain.
    NoSecondPreimage(Reg2Preimage),
}

impl Reg2Key {
    pub fn from_parts(lwe: Mp12Key, b0: ZqVector) -> Result<Self> {
        if b0.len() != lwe.params().m || b0.modulus() != lwe.params().modulus() {
            return Err(Error::DimensionMismatch {
                op: "reg2 key",
                left: (1, b0.len()),
                right: (1, lwe.params().m),
            });
        }
        Ok(Self { lwe, b0 })
    }

    pub fn lwe(&self) -> &Mp12Key {
        &self.lwe
    }

    pub fn b0(&self) -> &ZqVector {
        &self.b0
    }

    pub fn params(&self) -> &LweParams {
        self.lwe.params()
    }
}

impl Reg2Trapdoor {
    pub fn from_parts(lwe: Mp12Trapdoor, s0: ZqVector, e0: SignedVector) -> Self {
        Self { lwe, s0, e0 }
    }

    pub fn lwe(&self) -> &Mp12Trapdoor {
        &self.lwe
    }

    pub fn s0(&self) -> &ZqVector {
        &self.s0
    }

    pub fn e0(&self) -> &SignedVector {
        &self.e0
    }
}

impl Reg2Preimage {
    pub fn encode(&self, params: &LweParams) -> Result<BitString> {
        encode_preimage(&self.s, &self.e, self.c, params)
    }

    pub fn decode(bits: &BitString, params: &LweParams) -> Result<Self> {
        let (s, e, c) = decode_preimage(bits, params)?;
        Ok(Self { s, e, c })
    }

    /// A uniform point of the domain.
    pub fn sample<R: Rng + ?Sized>(params: &LweParams, rng: &mut R) -> Self {
        let s = ZqVector::random(params.n, params.modulus(), rng);
        let e = SignedVector::random_bounded(params.m, params.mu, rng);
        let c = rng.random::<bool>();
        Self { s, e, c }
    }
}

impl Reg2Inversion {
    pub fn is_claw(&self) -> bool {
        matches!(self, Reg2Inversion::Two(..))
    }
}

/// Samples `(A, R)`, then `s₀` uniform and `e₀` with standard deviation `α′q`.
pub fn reg2_gen<R: Rng + ?Sized>(
    params: &LweParams,
    rng: &mut R,
) -> Result<(Reg2Key, Reg2Trapdoor)> {
    let (lwe, td) = lwe_gen(params, rng)?;
    let s0 = ZqVector::random(params.n, params.modulus(), rng);
    let e0 = sample_gaussian_vector(params.m, params.shift_sigma(), rng)?;
    reg2_assemble(lwe, td, s0, e0)
}

/// Like [`reg2_gen`] but with `e₀ = 0`, so every image has two preimages.
pub fn reg2_gen_zero_shift<R: Rng + ?Sized>(
    params: &LweParams,
    rng: &mut R,
) -> Result<(Reg2Key, Reg2Trapdoor)> {
    let (lwe, td) = lwe_gen(params, rng)?;
    let s0 = ZqVector::random(params.n, params.modulus(), rng);
    reg2_assemble(lwe, td, s0, SignedVector::zeros(params.m))
}

/// Builds a key from explicit `A′`, `R`, `s₀`, `e₀`.
pub fn reg2_gen_from(
    params: &LweParams,
    a_prime: ZqMatrix,
    r: SignedMatrix,
    s0: ZqVector,
    e0: SignedVector,
) -> Result<(Reg2Key, Reg2Trapdoor)> {
    let (lwe, td) = lwe_gen_from(params, a_prime, r)?;
    reg2_assemble(lwe, td, s0, e0)
}

fn reg2_assemble(
    lwe: Mp12Key,
    td: Mp12Trapdoor,
    s0: ZqVector,
    e0: SignedVector,
) -> Result<(Reg2Key, Reg2Trapdoor)> {
    let b0 = eval_raw(&lwe, &s0, &e0)?;
    Ok((Reg2Key { lwe, b0 }, Reg2Trapdoor { lwe: td, s0, e0 }))
}

/// `sᵀA + eᵀ + c·b₀`; requires `‖e‖∞ ≤ μ`.
pub fn reg2_eval(key: &Reg2Key, s: &ZqVector, e: &SignedVector, c: bool) -> Result<ZqVector> {
    let y = crate::mp12::lwe_eval(&key.lwe, s, e)?;
    if c {
        y.add(&key.b0)
    } else {
        Ok(y)
    }
}

pub fn reg2_eval_preimage(key: &Reg2Key, x: &Reg2Preimage) -> Result<ZqVector> {
    reg2_eval(key, &x.s, &x.e, x.c)
}

/// Recovers the preimages of `b` that lie in the domain.
///
/// The trapdoor inversion gives `(s₁, e₁)` with `b = s₁ᵀA + e₁ᵀ`. The
/// candidate `(s₁, e₁, 0)` is kept when `‖e₁‖∞ ≤ μ` and `(s₁ − s₀, e₁ − e₀, 1)`
/// when `‖e₁ − e₀‖∞ ≤ μ`. An image with neither candidate in the domain is an
/// error.
pub fn reg2_inv(key: &Reg2Key, td: &Reg2Trapdoor, b: &ZqVector) -> Result<Reg2Inversion> {
    let (s1, e1) = lwe_inv(&key.lwe, &td.lwe, b)?;
    let mu = u128::from(key.params().mu);
    let shifted_e = e1.sub(&td.e0)?;
    let zero = (e1.inf_norm() <= mu).then(|| Reg2Preimage {
        s: s1.clone(),
        e: e1.clone(),
        c: false,
    });
    let one = if shifted_e.inf_norm() <= mu {
        Some(Reg2Preimage {
            s: s1.sub(&td.s0)?,
            e: shifted_e,
            c: true,
        })
    } else {
        None
    };
    match (zero, one) {
        (Some(p0), Some(p1)) => Ok(Reg2Inversion::Two(p0, p1)),
        (Some(p), None) | (None, Some(p)) => Ok(Reg2Inversion::NoSecondPreimage(p)),
        (None, None) => Err(Error::InversionFailed(
            "image has no preimage in the domain",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::gen_params;
    use crate::seeded_rng;

    #[test]
    fn b0_encodes_e0() {
        let p = gen_params(8).unwrap();
        let (key, td) = reg2_gen(&p, &mut seeded_rng(1)).unwrap();
        let diff = key
            .b0()
            .sub(&td.s0().mul_matrix(key.lwe().matrix()).unwrap())
            .unwrap();
        assert_eq!(&diff.lift(), td.e0());
    }

    #[test]
    fn e0_is_small() {
        let p = gen_params(8).unwrap();
        let bound = p.mu_prime.to_f64() * libm::sqrt(p.m as f64);
        for seed in 0..20 {
            let (_, td) = reg2_gen(&p, &mut seeded_rng(seed)).unwrap();
            assert!((td.e0().inf_norm() as f64) <= bound);
        }
    }

    #[test]
    fn deterministic() {
        let p = gen_params(4).unwrap();
        let a = reg2_gen(&p, &mut seeded_rng(9)).unwrap();
        let b = reg2_gen(&p, &mut seeded_rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn c0_matches_lwe_eval() {
        let p = gen_params(4).unwrap();
        let mut rng = seeded_rng(2);
        let (key, _) = reg2_gen(&p, &mut rng).unwrap();
        let x = Reg2Preimage::sample(&p, &mut rng);
        assert_eq!(
            reg2_eval(&key, &x.s, &x.e, false).unwrap(),
            crate::mp12::lwe_eval(key.lwe(), &x.s, &x.e).unwrap()
        );
    }

    #[test]
    fn shifted_input_collides() {
        let p = gen_params(4).unwrap();
        let mut rng = seeded_rng(3);
        let (key, td) = reg2_gen(&p, &mut rng).unwrap();
        let half = p.mu / 2;
        let s = ZqVector::random(p.n, p.modulus(), &mut rng);
        let e = SignedVector::random_bounded(p.m, half, &mut rng);
        let lhs = reg2_eval(&key, &s, &e, true).unwrap();
        let rhs = reg2_eval(
            &key,
            &s.add(td.s0()).unwrap(),
            &e.add(td.e0()).unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn zero_error_has_claw() {
        let p = gen_params(8).unwrap();
        let mut rng = seeded_rng(4);
        let (key, td) = reg2_gen(&p, &mut rng).unwrap();
        let s = ZqVector::random(p.n, p.modulus(), &mut rng);
        let y = reg2_eval(&key, &s, &SignedVector::zeros(p.m), false).unwrap();
        let Reg2Inversion::Two(p0, p1) = reg2_inv(&key, &td, &y).unwrap() else {
            panic!("expected a claw");
        };
        assert_eq!(p0.s, s);
        assert!(!p0.c && p1.c);
        assert_eq!(reg2_eval_preimage(&key, &p1).unwrap(), y);
    }

    #[test]
    fn claws_have_trapdoor_difference() {
        let p = gen_params(8).unwrap();
        let mut rng = seeded_rng(5);
        let (key, td) = reg2_gen(&p, &mut rng).unwrap();
        let mut claws = 0;
        for _ in 0..50 {
            let x = Reg2Preimage::sample(&p, &mut rng);
            let y = reg2_eval_preimage(&key, &x).unwrap();
            match reg2_inv(&key, &td, &y).unwrap() {
                Reg2Inversion::Two(p0, p1) => {
                    claws += 1;
                    assert!(p0 == x || p1 == x);
                    assert_eq!(reg2_eval_preimage(&key, &p0).unwrap(), y);
                    assert_eq!(reg2_eval_preimage(&key, &p1).unwrap(), y);
                    assert_eq!(&p0.s.sub(&p1.s).unwrap(), td.s0());
                    assert_eq!(&p0.e.sub(&p1.e).unwrap(), td.e0());
                }
                Reg2Inversion::NoSecondPreimage(only) => assert_eq!(only, x),
            }
        }
        assert!(claws > 30);
    }

    #[test]
    fn zero_shift_always_claws() {
        let p = gen_params(4).unwrap();
        let mut rng = seeded_rng(6);
        let (key, td) = reg2_gen_zero_shift(&p, &mut rng).unwrap();
        for _ in 0..20 {
            let x = Reg2Preimage::sample(&p, &mut rng);
            let y = reg2_eval_preimage(&key, &x).unwrap();
            assert!(reg2_inv(&key, &td, &y).unwrap().is_claw());
        }
    }

    #[test]
    fn boundary_error_loses_partner() {
        let p = gen_params(4).unwrap();
        let mut rng = seeded_rng(7);
        let (key, td) = reg2_gen(&p, &mut rng).unwrap();
        // Push every coordinate to ±μ against the sign of e₀ so e − e₀ leaves
        // the domain wherever e₀ is non-zero.
        let mu = i128::from(p.mu);
        let e: alloc::vec::Vec<i128> = td
            .e0()
            .entries()
            .iter()
            .map(|&v| if v > 0 { -mu } else { mu })
            .collect();
        if td.e0().inf_norm() == 0 {
            return;
        }
        let s = ZqVector::random(p.n, p.modulus(), &mut rng);
        let y = reg2_eval(&key, &s, &SignedVector::new(e), false).unwrap();
        assert!(
            matches!(reg2_inv(&key, &td, &y).unwrap(), Reg2Inversion::NoSecondPreimage(x) if !x.c)
        );
    }
}
