//! Modular integer linear algebra over `ℤ_q` with `q = 2^k`, `1 ≤ k ≤ 128`.
//!
//! Reduction modulo a power of two is a bit mask, so every product and sum is
//! computed with wrapping `u128` arithmetic and masked once at the end.

mod bits;
mod gadget;
mod gaussian;

pub use bits::BitString;
pub use gadget::{gadget_apply, gadget_invert, gadget_matrix};
pub use gaussian::{sample_gaussian, sample_gaussian_matrix, sample_gaussian_vector};

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::{Error, Result};

/// The modulus `q = 2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Modulus {
    log_q: u32,
}

impl Modulus {
    pub fn new(log_q: u32) -> Result<Self> {
        if log_q == 0 || log_q > 128 {
            return Err(Error::InvalidModulus(log_q));
        }
        Ok(Self { log_q })
    }

    pub fn log_q(self) -> u32 {
        self.log_q
    }

    /// `q` itself, or `None` for `k = 128` where it does not fit a `u128`.
    pub fn q(self) -> Option<u128> {
        1u128.checked_shl(self.log_q)
    }

    /// `q / 2 = 2^(k-1)`.
    pub fn half(self) -> u128 {
        1u128 << (self.log_q - 1)
    }

    pub fn mask(self) -> u128 {
        if self.log_q == 128 {
            u128::MAX
        } else {
            (1u128 << self.log_q) - 1
        }
    }

    #[inline]
    pub fn reduce(self, v: u128) -> u128 {
        v & self.mask()
    }

    #[inline]
    pub fn add(self, a: u128, b: u128) -> u128 {
        self.reduce(a.wrapping_add(b))
    }

    #[inline]
    pub fn sub(self, a: u128, b: u128) -> u128 {
        self.reduce(a.wrapping_sub(b))
    }

    #[inline]
    pub fn mul(self, a: u128, b: u128) -> u128 {
        self.reduce(a.wrapping_mul(b))
    }

    #[inline]
    pub fn neg(self, a: u128) -> u128 {
        self.reduce(a.wrapping_neg())
    }

    /// Embeds a signed integer (two's complement is exact modulo `2^k`).
    #[inline]
    pub fn from_signed(self, v: i128) -> u128 {
        self.reduce(v as u128)
    }

    /// Signed representative in `(-q/2, q/2]`.
    ///
    /// For `k = 128` the value `q/2` has no `i128` representative and maps to
    /// `i128::MIN` instead.
    #[inline]
    pub fn lift(self, v: u128) -> i128 {
        let v = self.reduce(v);
        if v <= self.half() {
            v as i128
        } else {
            // v - q, computed without materialising q.
            (v | !self.mask()) as i128
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> u128 {
        self.reduce(rng.random::<u128>())
    }

    fn check_same(self, other: Modulus) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.log_q,
                right: other.log_q,
            })
        }
    }
}

/// A single element of `ℤ_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZqScalar {
    value: u128,
    modulus: Modulus,
}

impl ZqScalar {
    pub fn new(value: u128, modulus: Modulus) -> Self {
        Self {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn value(self) -> u128 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn lift(self) -> i128 {
        self.modulus.lift(self.value)
    }
}

impl Add for ZqScalar {
    type Output = ZqScalar;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ZqScalar::new(self.modulus.add(self.value, rhs.value), self.modulus)
    }
}

impl Sub for ZqScalar {
    type Output = ZqScalar;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ZqScalar::new(self.modulus.sub(self.value, rhs.value), self.modulus)
    }
}

impl Mul for ZqScalar {
    type Output = ZqScalar;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ZqScalar::new(self.modulus.mul(self.value, rhs.value), self.modulus)
    }
}

impl Neg for ZqScalar {
    type Output = ZqScalar;
    fn neg(self) -> Self {
        ZqScalar::new(self.modulus.neg(self.value), self.modulus)
    }
}

/// A vector over `ℤ_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZqVector {
    modulus: Modulus,
    entries: Vec<u128>,
}

impl ZqVector {
    pub fn zeros(len: usize, modulus: Modulus) -> Self {
        Self {
            modulus,
            entries: vec![0; len],
        }
    }

    /// Builds a vector, reducing every entry modulo `q`.
    pub fn from_entries(entries: Vec<u128>, modulus: Modulus) -> Self {
        let entries = entries.into_iter().map(|v| modulus.reduce(v)).collect();
        Self { modulus, entries }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, modulus: Modulus, rng: &mut R) -> Self {
        Self {
            modulus,
            entries: (0..len).map(|_| modulus.sample(rng)).collect(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u128] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> ZqScalar {
        ZqScalar::new(self.entries[i], self.modulus)
    }

    fn check_compatible(&self, other: &ZqVector, op: &'static str) -> Result<()> {
        self.modulus.check_same(other.modulus)?;
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                op,
                left: (1, self.len()),
                right: (1, other.len()),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ZqVector) -> Result<ZqVector> {
        self.check_compatible(other, "vector add")?;
        let m = self.modulus;
        Ok(Self {
            modulus: m,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &ZqVector) -> Result<ZqVector> {
        self.check_compatible(other, "vector sub")?;
        let m = self.modulus;
        Ok(Self {
            modulus: m,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: u128) -> ZqVector {
        let m = self.modulus;
        Self {
            modulus: m,
            entries: self.entries.iter().map(|&a| m.mul(a, c)).collect(),
        }
    }

    pub fn dot(&self, other: &ZqVector) -> Result<ZqScalar> {
        self.check_compatible(other, "dot")?;
        let acc = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0u128, |acc, (&a, &b)| acc.wrapping_add(a.wrapping_mul(b)));
        Ok(ZqScalar::new(acc, self.modulus))
    }

    /// Adds a signed vector embedded in `ℤ_q`.
    pub fn add_signed(&self, e: &SignedVector) -> Result<ZqVector> {
        if self.len() != e.len() {
            return Err(Error::DimensionMismatch {
                op: "add signed",
                left: (1, self.len()),
                right: (1, e.len()),
            });
        }
        let m = self.modulus;
        Ok(Self {
            modulus: m,
            entries: self
                .entries
                .iter()
                .zip(e.entries())
                .map(|(&a, &x)| m.add(a, m.from_signed(x)))
                .collect(),
        })
    }

    /// Entry-wise signed lift to `(-q/2, q/2]`.
    pub fn lift(&self) -> SignedVector {
        SignedVector::new(self.entries.iter().map(|&v| self.modulus.lift(v)).collect())
    }

    /// `vᵀ · M` as a vector of length `M.cols()`.
    pub fn mul_matrix(&self, m: &ZqMatrix) -> Result<ZqVector> {
        self.modulus.check_same(m.modulus)?;
        if self.len() != m.rows {
            return Err(Error::DimensionMismatch {
                op: "vector-matrix product",
                left: (1, self.len()),
                right: (m.rows, m.cols),
            });
        }
        let mut acc = vec![0u128; m.cols];
        for (i, &v) in self.entries.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let row = m.row(i);
            for (a, &x) in acc.iter_mut().zip(row) {
                *a = a.wrapping_add(v.wrapping_mul(x));
            }
        }
        Ok(ZqVector::from_entries(acc, self.modulus))
    }
}

/// A dense row-major matrix over `ℤ_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZqMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    entries: Vec<u128>,
}

impl ZqMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: Modulus) -> Self {
        Self {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: Modulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        modulus: Modulus,
        mut f: impl FnMut(usize, usize) -> u128,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(modulus.reduce(f(i, j)));
            }
        }
        Self {
            modulus,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from row-major entries, reducing each modulo `q`.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<u128>,
        modulus: Modulus,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "matrix from entries",
                left: (rows, cols),
                right: (1, entries.len()),
            });
        }
        let entries = entries.into_iter().map(|v| modulus.reduce(v)).collect();
        Ok(Self {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        modulus: Modulus,
        rng: &mut R,
    ) -> Self {
        Self {
            modulus,
            rows,
            cols,
            entries: (0..rows * cols).map(|_| modulus.sample(rng)).collect(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[u128] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u128 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u128) {
        self.entries[i * self.cols + j] = self.modulus.reduce(v);
    }

    pub fn row(&self, i: usize) -> &[u128] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ZqMatrix {
        ZqMatrix::from_fn(self.cols, self.rows, self.modulus, |i, j| self.get(j, i))
    }

    fn check_same_shape(&self, other: &ZqMatrix, op: &'static str) -> Result<()> {
        self.modulus.check_same(other.modulus)?;
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.check_same_shape(other, "matrix add")?;
        let m = self.modulus;
        Ok(self.with_entries(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.add(a, b))
                .collect(),
        ))
    }

    pub fn sub(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.check_same_shape(other, "matrix sub")?;
        let m = self.modulus;
        Ok(self.with_entries(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.sub(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, c: u128) -> ZqMatrix {
        let m = self.modulus;
        self.with_entries(self.entries.iter().map(|&a| m.mul(a, c)).collect())
    }

    fn with_entries(&self, entries: Vec<u128>) -> ZqMatrix {
        Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Exact product `self · other` modulo `q`.
    pub fn matmul(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.modulus.check_same(other.modulus)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.dims(),
                right: other.dims(),
            });
        }
        let mut out = vec![0u128; self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o = o.wrapping_add(a.wrapping_mul(b));
                }
            }
        }
        ZqMatrix::from_entries(self.rows, other.cols, out, self.modulus)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.modulus.check_same(other.modulus)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hconcat",
                left: self.dims(),
                right: other.dims(),
            });
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        ZqMatrix::from_entries(self.rows, cols, entries, self.modulus)
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> ZqMatrix {
        ZqMatrix::from_fn(self.rows, end - start, self.modulus, |i, j| {
            self.get(i, start + j)
        })
    }
}

/// A vector of signed integers, used for error terms before they are embedded
/// in `ℤ_q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignedVector {
    entries: Vec<i128>,
}

impl SignedVector {
    pub fn new(entries: Vec<i128>) -> Self {
        Self { entries }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            entries: vec![0; len],
        }
    }

    /// Uniform entries in `[-bound, bound]`.
    pub fn random_bounded<R: Rng + ?Sized>(len: usize, bound: u64, rng: &mut R) -> Self {
        let b = bound as i128;
        Self {
            entries: (0..len).map(|_| rng.random_range(-b..=b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i128] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<i128> {
        self.entries
    }

    pub fn inf_norm(&self) -> u128 {
        self.entries
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.entries.iter().map(|&v| (v as f64) * (v as f64)).sum();
        libm::sqrt(sum)
    }

    fn check_len(&self, other: &SignedVector, op: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                op,
                left: (1, self.len()),
                right: (1, other.len()),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SignedVector) -> Result<SignedVector> {
        self.check_len(other, "signed add")?;
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &SignedVector) -> Result<SignedVector> {
        self.check_len(other, "signed sub")?;
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn to_zq(&self, modulus: Modulus) -> ZqVector {
        ZqVector {
            modulus,
            entries: self
                .entries
                .iter()
                .map(|&v| modulus.from_signed(v))
                .collect(),
        }
    }
}

/// A dense row-major matrix of small signed integers (the gadget trapdoor).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl SignedMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "signed matrix from entries",
                left: (rows, cols),
                right: (1, entries.len()),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_zq(&self, modulus: Modulus) -> ZqMatrix {
        ZqMatrix {
            modulus,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&v| modulus.from_signed(v as i128))
                .collect(),
        }
    }
}
