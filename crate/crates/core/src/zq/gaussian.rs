//! Rounded continuous Gaussian sampling.
//!
//! Entries are `round(N(0, σ²))`. This is not an exact discrete Gaussian and
//! is not constant time; it is what the regularity and correctness statistics
//! need.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{SignedMatrix, SignedVector};
use crate::{Error, Result};

fn normal(sigma: f64) -> Result<Normal<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(
            "gaussian width must be positive and finite",
        ));
    }
    Normal::new(0.0, sigma).map_err(|_| Error::InvalidArgument("invalid gaussian width"))
}

/// One rounded sample with standard deviation `sigma`.
pub fn sample_gaussian<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<i64> {
    let d = normal(sigma)?;
    Ok(libm::round(d.sample(rng)) as i64)
}

/// `len` independent rounded samples with standard deviation `sigma`.
pub fn sample_gaussian_vector<R: Rng + ?Sized>(
    len: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<SignedVector> {
    let d = normal(sigma)?;
    Ok(SignedVector::new(
        (0..len)
            .map(|_| libm::round(d.sample(rng)) as i128)
            .collect(),
    ))
}

/// A `rows × cols` matrix of independent rounded samples, row-major order.
pub fn sample_gaussian_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<SignedMatrix> {
    let d = normal(sigma)?;
    let entries = (0..rows * cols)
        .map(|_| libm::round(d.sample(rng)) as i64)
        .collect();
    SignedMatrix::from_entries(rows, cols, entries)
}
