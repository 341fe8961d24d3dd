//! The injective LWE function `g_A(s, e) = sᵀA + eᵀ` with a gadget trapdoor.
//!
//! `A = [A′ | G − A′R]` with `A′` uniform and `R` a small Gaussian matrix.
//! Since `A·[R; I] = G`, the trapdoor turns an image into a noisy gadget
//! image `sᵀG + eᵀ[R; I]` that [`gadget_invert`] decodes.

use rand::Rng;

use crate::params::{validate, LweParams};
use crate::zq::{
    gadget_invert, gadget_matrix, sample_gaussian_matrix, SignedMatrix, SignedVector, ZqMatrix,
    ZqVector,
};
use crate::{Error, Result};

/// Public key: the `n × m` matrix `A`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mp12Key {
    a: ZqMatrix,
    params: LweParams,
}

/// The `m̄ × ω` gadget trapdoor `R`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mp12Trapdoor {
    r: SignedMatrix,
}

impl Mp12Key {
    /// Reassembles a key, checking its shape against `params`.
    pub fn from_parts(a: ZqMatrix, params: LweParams) -> Result<Self> {
        if a.dims() != (params.n, params.m) || a.modulus() != params.modulus() {
            return Err(Error::DimensionMismatch {
                op: "mp12 key",
                left: a.dims(),
                right: (params.n, params.m),
            });
        }
        Ok(Self { a, params })
    }

    pub fn matrix(&self) -> &ZqMatrix {
        &self.a
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    /// True when the second block of `A` equals `G − A′R`.
    pub fn matches(&self, td: &Mp12Trapdoor) -> bool {
        let p = &self.params;
        if td.r.dims() != (p.m_bar, p.omega) {
            return false;
        }
        let a_prime = self.a.column_block(0, p.m_bar);
        let Ok(g) = gadget_matrix(p.n, p.k) else {
            return false;
        };
        match a_prime
            .matmul(&td.r.to_zq(p.modulus()))
            .and_then(|ar| g.sub(&ar))
        {
            Ok(block) => block == self.a.column_block(p.m_bar, p.m),
            Err(_) => false,
        }
    }
}

impl Mp12Trapdoor {
    pub fn from_matrix(r: SignedMatrix) -> Self {
        Self { r }
    }

    pub fn matrix(&self) -> &SignedMatrix {
        &self.r
    }
}

/// Samples `A′` uniformly and `R` with standard deviation `αq`.
pub fn lwe_gen<R: Rng + ?Sized>(
    params: &LweParams,
    rng: &mut R,
) -> Result<(Mp12Key, Mp12Trapdoor)> {
    validate(params)?;
    let a_prime = ZqMatrix::random(params.n, params.m_bar, params.modulus(), rng);
    let r = sample_gaussian_matrix(params.m_bar, params.omega, params.trapdoor_sigma(), rng)?;
    lwe_gen_from(params, a_prime, r)
}

/// Builds the key for a given `A′` and `R`. Exposed so tests can force
/// degenerate trapdoors such as `R = 0`.
pub fn lwe_gen_from(
    params: &LweParams,
    a_prime: ZqMatrix,
    r: SignedMatrix,
) -> Result<(Mp12Key, Mp12Trapdoor)> {
    let modulus = params.modulus();
    if a_prime.dims() != (params.n, params.m_bar) || r.dims() != (params.m_bar, params.omega) {
        return Err(Error::DimensionMismatch {
            op: "lwe gen",
            left: a_prime.dims(),
            right: r.dims(),
        });
    }
    let g = gadget_matrix(params.n, params.k)?;
    let block = g.sub(&a_prime.matmul(&r.to_zq(modulus))?)?;
    let a = a_prime.hconcat(&block)?;
    Ok((
        Mp12Key {
            a,
            params: params.clone(),
        },
        Mp12Trapdoor { r },
    ))
}

/// `sᵀA + eᵀ` with no bound on `e`.
pub(crate) fn eval_raw(key: &Mp12Key, s: &ZqVector, e: &SignedVector) -> Result<ZqVector> {
    s.mul_matrix(&key.a)?.add_signed(e)
}

/// `sᵀA + eᵀ`; requires `‖e‖∞ ≤ μ`.
pub fn lwe_eval(key: &Mp12Key, s: &ZqVector, e: &SignedVector) -> Result<ZqVector> {
    let bound = u128::from(key.params.mu);
    if e.inf_norm() > bound {
        return Err(Error::NormExceeded {
            bound,
            actual: e.inf_norm(),
        });
    }
    eval_raw(key, s, e)
}

/// Recovers `(s, e)` from `b = sᵀA + eᵀ` when `‖e‖₂ ≤ r_max`.
///
/// The recovered error is the lift of `b − sᵀA` to `(−q/2, q/2]`. Any
/// decoding failure, an error longer than `r_max`, or a result that does not
/// re-evaluate to `b` is reported as an error.
pub fn lwe_inv(key: &Mp12Key, td: &Mp12Trapdoor, b: &ZqVector) -> Result<(ZqVector, SignedVector)> {
    let p = &key.params;
    let modulus = p.modulus();
    if b.len() != p.m || b.modulus() != modulus {
        return Err(Error::DimensionMismatch {
            op: "lwe inv",
            left: (1, b.len()),
            right: (1, p.m),
        });
    }
    if td.r.dims() != (p.m_bar, p.omega) {
        return Err(Error::DimensionMismatch {
            op: "lwe inv trapdoor",
            left: td.r.dims(),
            right: (p.m_bar, p.omega),
        });
    }
    // b′ = bᵀ[R; I]
    let top = b.entries();
    let mut shifted = top[p.m_bar..].to_vec();
    for (i, &bi) in top[..p.m_bar].iter().enumerate() {
        if bi == 0 {
            continue;
        }
        for (acc, &rij) in shifted.iter_mut().zip(td.r.row(i)) {
            *acc = modulus.add(*acc, modulus.mul(bi, modulus.from_signed(i128::from(rij))));
        }
    }
    let s = gadget_invert(&ZqVector::from_entries(shifted, modulus), p.n, p.k)?;
    let e = b.sub(&s.mul_matrix(&key.a)?)?.lift();
    let norm = e.l2_norm();
    if norm > p.r_max {
        return Err(Error::ErrorTooLarge {
            norm,
            r_max: p.r_max,
        });
    }
    if eval_raw(key, &s, &e)? != *b {
        return Err(Error::InversionFailed(
            "recovered input does not re-evaluate to the image",
        ));
    }
    Ok((s, e))
}
