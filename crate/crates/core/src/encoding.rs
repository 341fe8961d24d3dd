//! Canonical bit encoding of a REG2 input `(s, e, c)`.
//!
//! Layout, all fields little-endian:
//!
//! ```text
//! s_0 … s_{n-1}     k bits each
//! e_0 … e_{m-1}     w = ⌈log₂(2μ+1)⌉ bits each, stored as e_i + μ
//! c                 1 bit, always last
//! ```
//!
//! The last bit of the encoding is the last qubit of the protocol register, so
//! the two preimages of an image always differ there.

use alloc::vec::Vec;

use crate::params::LweParams;
use crate::zq::{BitString, SignedVector, ZqVector};
use crate::{Error, Result};

fn push_bits(out: &mut Vec<u8>, value: u128, width: u32) {
    out.extend((0..width).map(|j| ((value >> j) & 1) as u8));
}

fn read_bits(bits: &[u8], width: u32) -> u128 {
    bits.iter()
        .take(width as usize)
        .enumerate()
        .fold(0u128, |acc, (j, &b)| acc | (u128::from(b) << j))
}

/// Encodes `(s, e, c)`; fails if the shapes or `‖e‖∞ ≤ μ` do not hold.
pub fn encode_preimage(
    s: &ZqVector,
    e: &SignedVector,
    c: bool,
    params: &LweParams,
) -> Result<BitString> {
    if s.len() != params.n || e.len() != params.m {
        return Err(Error::DimensionMismatch {
            op: "encode preimage",
            left: (s.len(), e.len()),
            right: (params.n, params.m),
        });
    }
    if s.modulus().log_q() != params.k {
        return Err(Error::ModulusMismatch {
            left: s.modulus().log_q(),
            right: params.k,
        });
    }
    let mu = u128::from(params.mu);
    if e.inf_norm() > mu {
        return Err(Error::NormExceeded {
            bound: mu,
            actual: e.inf_norm(),
        });
    }
    let width = params.error_bits();
    let mut bits = Vec::with_capacity(params.domain_bits());
    for &v in s.entries() {
        push_bits(&mut bits, v, params.k);
    }
    for &v in e.entries() {
        push_bits(&mut bits, (v + mu as i128) as u128, width);
    }
    bits.push(u8::from(c));
    Ok(bits.into_iter().collect())
}

/// Inverse of [`encode_preimage`]. Rejects offsets above `2μ`.
pub fn decode_preimage(
    bits: &BitString,
    params: &LweParams,
) -> Result<(ZqVector, SignedVector, bool)> {
    if bits.len() != params.domain_bits() {
        return Err(Error::Encoding(
            "preimage bit length does not match parameters",
        ));
    }
    let raw = bits.as_slice();
    let k = params.k as usize;
    let width = params.error_bits();
    let mu = u128::from(params.mu);
    let s: Vec<u128> = raw[..params.n * k]
        .chunks(k)
        .map(|chunk| read_bits(chunk, params.k))
        .collect();
    let mut e = Vec::with_capacity(params.m);
    for chunk in raw[params.n * k..raw.len() - 1].chunks(width as usize) {
        let offset = read_bits(chunk, width);
        if offset > 2 * mu {
            return Err(Error::Encoding("error coordinate outside [-mu, mu]"));
        }
        e.push(offset as i128 - mu as i128);
    }
    let c = raw[raw.len() - 1] == 1;
    Ok((
        ZqVector::from_entries(s, params.modulus()),
        SignedVector::new(e),
        c,
    ))
}
