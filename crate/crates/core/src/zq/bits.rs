use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// An ordered sequence of bits; index 0 is the first bit (the first qubit of
/// the protocol register).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Fails if any entry is not 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("bit values must be 0 or 1"));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    /// The low `len` bits of `value`, least significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self {
            bits: (0..len).map(|i| ((value >> i) & 1) as u8).collect(),
        }
    }

    /// Inverse of [`BitString::from_u64`]; panics above 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too long for u64");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.bits[i] = u8::from(bit);
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(u8::from(bit));
    }

    pub fn last(&self) -> Option<u8> {
        self.bits.last().copied()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                op: "bit xor",
                left: (1, self.len()),
                right: (1, other.len()),
            });
        }
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Packs bits least-significant first into bytes.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            out[i / 8] |= b << (i % 8);
        }
        out
    }

    /// Inverse of [`BitString::to_packed`]. Padding bits must be zero.
    pub fn from_packed(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Encoding("packed bit length does not match"));
        }
        let bits: Vec<u8> = (0..len).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect();
        let out = Self { bits };
        if out.to_packed() != bytes {
            return Err(Error::Encoding("non-zero padding bits"));
        }
        Ok(out)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl FromIterator<u8> for BitString {
    /// Collects bits; any non-zero value is treated as 1.
    fn from_iter<T: IntoIterator<Item = u8>>(iter: T) -> Self {
        Self {
            bits: iter.into_iter().map(|b| u8::from(b != 0)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary() {
        assert!(BitString::new(vec![0, 1, 2]).is_err());
    }

    #[test]
    fn u64_round_trip() {
        let b = BitString::from_u64(0b1011, 6);
        assert_eq!(b.as_slice(), &[1, 1, 0, 1, 0, 0]);
        assert_eq!(b.to_u64(), 0b1011);
    }

    #[test]
    fn packed_round_trip_and_padding() {
        let b = BitString::from_u64(0x2ab, 11);
        let packed = b.to_packed();
        assert_eq!(BitString::from_packed(&packed, 11).unwrap(), b);
        assert!(BitString::from_packed(&[0xff, 0xff], 11).is_err());
    }

    #[test]
    fn xor_length_mismatch() {
        assert!(BitString::zeros(3).xor(&BitString::zeros(4)).is_err());
    }
}
