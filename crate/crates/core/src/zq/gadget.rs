//! The gadget matrix `G = I_n ⊗ (1, 2, 4, …, 2^(k-1))` and its noisy inverse.

use alloc::vec::Vec;

use super::{Modulus, ZqMatrix, ZqVector};
use crate::{Error, Result};

/// `G = I_n ⊗ gᵀ` with `g = (1, 2, …, 2^(k-1))`, an `n × nk` matrix over `ℤ_{2^k}`.
pub fn gadget_matrix(n: usize, k: u32) -> Result<ZqMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("gadget dimension must be positive"));
    }
    let modulus = Modulus::new(k)?;
    let k = k as usize;
    Ok(ZqMatrix::from_fn(n, n * k, modulus, |i, j| {
        if j / k == i {
            1u128 << (j % k)
        } else {
            0
        }
    }))
}

/// `sᵀG` without materialising `G`.
pub fn gadget_apply(s: &ZqVector) -> ZqVector {
    let modulus = s.modulus();
    let k = modulus.log_q();
    let entries: Vec<u128> = s
        .entries()
        .iter()
        .flat_map(|&v| (0..k).map(move |j| v << j))
        .collect();
    ZqVector::from_entries(entries, modulus)
}

/// Recovers `s` from `bᵀ = sᵀG + eᵀ` whenever every `|e_j| < q/4`.
///
/// Each coordinate is decoded one bit at a time, starting at the most
/// significant gadget column `2^(k-1)`: after removing the contribution of the
/// bits already known, that column holds `bit·q/2 + e`. The decoded `s` is then
/// re-applied and any residual outside `(-q/4, q/4)` is reported as
/// [`Error::GadgetDecode`].
pub fn gadget_invert(b: &ZqVector, n: usize, k: u32) -> Result<ZqVector> {
    let modulus = b.modulus();
    if modulus.log_q() != k {
        return Err(Error::ModulusMismatch {
            left: modulus.log_q(),
            right: k,
        });
    }
    let width = k as usize;
    if b.len() != n * width {
        return Err(Error::DimensionMismatch {
            op: "gadget invert",
            left: (1, b.len()),
            right: (n, n * width),
        });
    }
    let quarter = modulus.half() >> 1;
    let half = modulus.half();
    let mut s = Vec::with_capacity(n);
    for block in b.entries().chunks(width) {
        let mut value: u128 = 0;
        for t in 0..width {
            let column = width - 1 - t;
            let known = modulus.mul(value, 1u128 << column);
            let v = modulus.sub(block[column], known);
            // v ≈ bit·q/2; the bit is set when v lands in [q/4, 3q/4).
            let distance_to_half = if v >= half { v - half } else { half - v };
            let bit = if k == 1 {
                v & 1
            } else {
                u128::from(distance_to_half < quarter)
            };
            value |= bit << t;
        }
        s.push(value);
    }
    let s = ZqVector::from_entries(s, modulus);
    let residual = b.sub(&gadget_apply(&s))?;
    let bound = if k == 1 { 0 } else { quarter };
    if residual
        .entries()
        .iter()
        .any(|&r| modulus.lift(r).unsigned_abs() >= bound.max(1))
    {
        return Err(Error::GadgetDecode);
    }
    Ok(s)
}
