//! Checks every registered [`TrapdoorFamily`] must pass. Each function
//! returns the offending inputs; an empty result is a pass.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Homomorphic, TrapdoorFamily};
use crate::Result;

/// Inputs for which `inv(eval(x)) ≠ x`.
pub fn round_trip<F: TrapdoorFamily>(
    family: &F,
    key: &F::Key,
    td: &F::Trapdoor,
    inputs: impl IntoIterator<Item = F::Input>,
) -> Result<Vec<F::Input>> {
    let mut bad = Vec::new();
    for x in inputs {
        let y = family.eval(key, &x)?;
        if family.inv(key, td, &y)? != x {
            bad.push(x);
        }
    }
    Ok(bad)
}

/// Pairs of distinct inputs with the same image.
pub fn injective<F: TrapdoorFamily>(
    family: &F,
    key: &F::Key,
    inputs: impl IntoIterator<Item = F::Input>,
) -> Result<Vec<(F::Input, F::Input)>> {
    let mut seen: BTreeMap<F::Output, F::Input> = BTreeMap::new();
    let mut bad = Vec::new();
    for x in inputs {
        let y = family.eval(key, &x)?;
        match seen.get(&y) {
            Some(prev) if *prev != x => bad.push((prev.clone(), x)),
            Some(_) => {}
            None => {
                seen.insert(y, x);
            }
        }
    }
    Ok(bad)
}

/// For a domain enumerated in full: the number of missing images. Zero
/// together with [`injective`] means the function is a bijection.
pub fn surjective_on<F: TrapdoorFamily>(
    family: &F,
    key: &F::Key,
    domain: &[F::Input],
    codomain: &[F::Output],
) -> Result<usize> {
    let mut images = Vec::with_capacity(domain.len());
    for x in domain {
        images.push(family.eval(key, x)?);
    }
    images.sort();
    Ok(codomain
        .iter()
        .filter(|y| images.binary_search(y).is_err())
        .count())
}

/// Pairs violating `g(a □ b) = g(a) ⋆ g(b)` or `(a □ b) △ b = a`.
pub fn homomorphic<F: Homomorphic>(
    family: &F,
    key: &F::Key,
    pairs: impl IntoIterator<Item = (F::Input, F::Input)>,
) -> Result<Vec<(F::Input, F::Input)>> {
    let mut bad = Vec::new();
    for (a, b) in pairs {
        let ab = family.combine(&a, &b);
        let lhs = family.eval(key, &ab)?;
        let rhs = family.combine_outputs(&family.eval(key, &a)?, &family.eval(key, &b)?);
        if lhs != rhs || family.difference(&ab, &b) != a {
            bad.push((a, b));
        }
    }
    Ok(bad)
}
