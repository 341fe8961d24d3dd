//! Enumerable stand-ins for trapdoor families: a random invertible linear map
//! over GF(2) and a random permutation table. Inputs are the low `n − 1` bits
//! of a `u64`, so that together with the branch bit `c` the protocol register
//! has `n` qubits. Neither family is one-way.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Bijective, Homomorphic, TrapdoorFamily};
use crate::{Error, Result};

/// A square matrix over GF(2); row `i` is a bit mask.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BitMatrix {
    dim: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn from_rows(dim: usize, rows: Vec<u64>) -> Result<Self> {
        let mask = low_mask(dim);
        if rows.len() != dim || rows.iter().any(|&r| r & !mask != 0) {
            return Err(Error::InvalidArgument(
                "bit matrix rows do not fit the dimension",
            ));
        }
        Ok(Self { dim, rows })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rows: (0..dim).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// `M·x` over GF(2).
    pub fn apply(&self, x: u64) -> u64 {
        self.rows.iter().enumerate().fold(0u64, |acc, (i, &row)| {
            acc | (u64::from((row & x).count_ones() & 1) << i)
        })
    }

    /// Gauss–Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let mut a = self.rows.clone();
        let mut inv: Vec<u64> = (0..self.dim).map(|i| 1u64 << i).collect();
        for col in 0..self.dim {
            let pivot = (col..self.dim).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..self.dim {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(BitMatrix {
            dim: self.dim,
            rows: inv,
        })
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn register_to_input_bits(n: usize, max: usize) -> Result<usize> {
    if n < 2 || n > max {
        return Err(Error::InvalidArgument(
            "toy family register size out of range",
        ));
    }
    Ok(n - 1)
}

/// `g(x) = M·x` over GF(2) with `M` random invertible; trapdoor `M⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyLinear {
    bits: usize,
}

impl ToyLinear {
    pub const MAX_REGISTER: usize = 24;

    /// `n` is the register size; the inputs have `n − 1` bits.
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            bits: register_to_input_bits(n, Self::MAX_REGISTER)?,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.bits
    }

    fn check(&self, x: u64) -> Result<()> {
        if x & !low_mask(self.bits) != 0 {
            return Err(Error::InvalidArgument("toy input wider than the family"));
        }
        Ok(())
    }
}

impl TrapdoorFamily for ToyLinear {
    type Input = u64;
    type Output = u64;
    type Key = BitMatrix;
    type Trapdoor = BitMatrix;

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(BitMatrix, BitMatrix)> {
        let mask = low_mask(self.bits);
        loop {
            let m = BitMatrix {
                dim: self.bits,
                rows: (0..self.bits).map(|_| rng.random::<u64>() & mask).collect(),
            };
            if let Some(inv) = m.inverse() {
                return Ok((m, inv));
            }
        }
    }

    fn eval(&self, key: &BitMatrix, x: &u64) -> Result<u64> {
        self.check(*x)?;
        Ok(key.apply(*x))
    }

    fn inv(&self, _key: &BitMatrix, td: &BitMatrix, y: &u64) -> Result<u64> {
        self.check(*y)?;
        Ok(td.apply(*y))
    }

    fn sample_input<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random::<u64>() & low_mask(self.bits)
    }

    fn insecure_toy(&self) -> bool {
        true
    }
}

impl Homomorphic for ToyLinear {
    fn identity(&self) -> u64 {
        0
    }

    fn combine(&self, a: &u64, b: &u64) -> u64 {
        a ^ b
    }

    fn combine_outputs(&self, a: &u64, b: &u64) -> u64 {
        a ^ b
    }

    fn difference(&self, a: &u64, b: &u64) -> u64 {
        a ^ b
    }
}

/// A random permutation of `{0,1}^(n−1)` stored as a table; trapdoor is the
/// inverse table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyPermutation {
    bits: usize,
}

/// A permutation table: entry `x` is the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermutationTable {
    table: Vec<u32>,
}

impl PermutationTable {
    pub fn from_table(table: Vec<u32>) -> Result<Self> {
        let mut seen = alloc::vec![false; table.len()];
        for &v in &table {
            let slot = seen
                .get_mut(v as usize)
                .ok_or(Error::InvalidArgument("permutation entry out of range"))?;
            if *slot {
                return Err(Error::InvalidArgument(
                    "permutation table has a repeated entry",
                ));
            }
            *slot = true;
        }
        Ok(Self { table })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            table: (0..len as u32).collect(),
        }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.table
    }

    pub fn inverse(&self) -> PermutationTable {
        let mut inv = alloc::vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        PermutationTable { table: inv }
    }

    pub fn apply(&self, x: u64) -> Result<u64> {
        self.table
            .get(x as usize)
            .map(|&v| u64::from(v))
            .ok_or(Error::InvalidArgument(
                "input outside the permutation domain",
            ))
    }
}

impl ToyPermutation {
    pub const MAX_REGISTER: usize = 20;

    /// `n` is the register size; the inputs have `n − 1` bits.
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            bits: register_to_input_bits(n, Self::MAX_REGISTER)?,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.bits
    }
}

impl TrapdoorFamily for ToyPermutation {
    type Input = u64;
    type Output = u64;
    type Key = PermutationTable;
    type Trapdoor = PermutationTable;

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(PermutationTable, PermutationTable)> {
        let mut table: Vec<u32> = (0..1u32 << self.bits).collect();
        table.shuffle(rng);
        let key = PermutationTable { table };
        let td = key.inverse();
        Ok((key, td))
    }

    fn eval(&self, key: &PermutationTable, x: &u64) -> Result<u64> {
        key.apply(*x)
    }

    fn inv(&self, _key: &PermutationTable, td: &PermutationTable, y: &u64) -> Result<u64> {
        td.apply(*y)
    }

    fn sample_input<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random::<u64>() & low_mask(self.bits)
    }

    fn insecure_toy(&self) -> bool {
        true
    }
}

impl Bijective for ToyPermutation {}
