//! Two-regular functions from trapdoor one-way families.
//!
//! - [`FromInj`]: `f(x, 0) = g(x)`, `f(x, 1) = g(x) ⋆ g(x₀)` for an injective
//!   family homomorphic under `(□, ⋆)`. The two preimages of `y` are
//!   `(x₁, 0)` and `(x₁ △ x₀, 1)` with `x₁ = g⁻¹(y)`.
//! - [`FromBij`]: `f(x, c) = g_{k_c}(x)` for two independent keys of a
//!   bijective family.
//!
//! The toy families in [`toy`] are small enough to enumerate and let the
//! protocol be simulated qubit by qubit. They are not one-way.

pub mod conformance;
pub mod toy;

use core::fmt::Debug;

use rand::Rng;

use crate::{Error, Result};

/// A keyed family of trapdoor functions.
pub trait TrapdoorFamily {
    type Input: Clone + Eq + Debug;
    type Output: Clone + Eq + Ord + Debug;
    type Key: Clone + Debug;
    type Trapdoor: Clone + Debug;

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Self::Key, Self::Trapdoor)>;
    fn eval(&self, key: &Self::Key, x: &Self::Input) -> Result<Self::Output>;
    fn inv(&self, key: &Self::Key, td: &Self::Trapdoor, y: &Self::Output) -> Result<Self::Input>;
    fn sample_input<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Input;
    /// Set for families that exist only to make simulation tractable.
    fn insecure_toy(&self) -> bool;
}

/// An injective family with `g(a □ b) = g(a) ⋆ g(b)` and `(a □ b) △ b = a`.
pub trait Homomorphic: TrapdoorFamily {
    fn identity(&self) -> Self::Input;
    /// `□` on inputs.
    fn combine(&self, a: &Self::Input, b: &Self::Input) -> Self::Input;
    /// `⋆` on outputs.
    fn combine_outputs(&self, a: &Self::Output, b: &Self::Output) -> Self::Output;
    /// `△`, the inverse of `□` in its second argument.
    fn difference(&self, a: &Self::Input, b: &Self::Input) -> Self::Input;
}

/// Marker for families whose functions are permutations of the domain.
pub trait Bijective: TrapdoorFamily {}

/// The two preimages of an image: the `c = 0` one first.
pub type Claw<I> = ((I, bool), (I, bool));

/// Two-regular function from an injective homomorphic family.
#[derive(Clone, Debug)]
pub struct FromInj<F> {
    pub family: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FromInjKey<K, O> {
    pub key: K,
    /// `g(x₀)`.
    pub shift_image: O,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FromInjTrapdoor<T, I> {
    pub trapdoor: T,
    pub x0: I,
}

impl<F: Homomorphic> FromInj<F> {
    pub fn new(family: F) -> Self {
        Self { family }
    }

    /// Samples a key of the underlying family and `x₀ ≠ 0`.
    #[allow(clippy::type_complexity)]
    pub fn gen<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(
        FromInjKey<F::Key, F::Output>,
        FromInjTrapdoor<F::Trapdoor, F::Input>,
    )> {
        let identity = self.family.identity();
        let x0 = loop {
            let candidate = self.family.sample_input(rng);
            if candidate != identity {
                break candidate;
            }
        };
        let (key, trapdoor) = self.family.gen(rng)?;
        self.gen_with(key, trapdoor, x0)
    }

    /// Assembles a key for a chosen `x₀`; rejects the identity.
    #[allow(clippy::type_complexity)]
    pub fn gen_with(
        &self,
        key: F::Key,
        trapdoor: F::Trapdoor,
        x0: F::Input,
    ) -> Result<(
        FromInjKey<F::Key, F::Output>,
        FromInjTrapdoor<F::Trapdoor, F::Input>,
    )> {
        if x0 == self.family.identity() {
            return Err(Error::InvalidArgument("x0 must differ from the identity"));
        }
        let shift_image = self.family.eval(&key, &x0)?;
        Ok((
            FromInjKey { key, shift_image },
            FromInjTrapdoor { trapdoor, x0 },
        ))
    }

    pub fn eval(
        &self,
        key: &FromInjKey<F::Key, F::Output>,
        x: &F::Input,
        c: bool,
    ) -> Result<F::Output> {
        let y = self.family.eval(&key.key, x)?;
        Ok(if c {
            self.family.combine_outputs(&y, &key.shift_image)
        } else {
            y
        })
    }

    pub fn inv(
        &self,
        key: &FromInjKey<F::Key, F::Output>,
        td: &FromInjTrapdoor<F::Trapdoor, F::Input>,
        y: &F::Output,
    ) -> Result<Claw<F::Input>> {
        let x1 = self.family.inv(&key.key, &td.trapdoor, y)?;
        let x2 = self.family.difference(&x1, &td.x0);
        Ok(((x1, false), (x2, true)))
    }
}

/// Two-regular function from two keys of a bijective family.
#[derive(Clone, Debug)]
pub struct FromBij<F> {
    pub family: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FromBijKey<K> {
    pub keys: [K; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct FromBijTrapdoor<T> {
    pub trapdoors: [T; 2],
}

impl<F: Bijective> FromBij<F> {
    pub fn new(family: F) -> Self {
        Self { family }
    }

    pub fn gen<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(FromBijKey<F::Key>, FromBijTrapdoor<F::Trapdoor>)> {
        let (k1, t1) = self.family.gen(rng)?;
        let (k2, t2) = self.family.gen(rng)?;
        Ok((
            FromBijKey { keys: [k1, k2] },
            FromBijTrapdoor {
                trapdoors: [t1, t2],
            },
        ))
    }

    /// Uses one key for both branches, so the two preimages share `x`.
    pub fn gen_same_key<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(FromBijKey<F::Key>, FromBijTrapdoor<F::Trapdoor>)> {
        let (k, t) = self.family.gen(rng)?;
        Ok((
            FromBijKey {
                keys: [k.clone(), k],
            },
            FromBijTrapdoor {
                trapdoors: [t.clone(), t],
            },
        ))
    }

    pub fn eval(&self, key: &FromBijKey<F::Key>, x: &F::Input, c: bool) -> Result<F::Output> {
        self.family.eval(&key.keys[usize::from(c)], x)
    }

    pub fn inv(
        &self,
        key: &FromBijKey<F::Key>,
        td: &FromBijTrapdoor<F::Trapdoor>,
        y: &F::Output,
    ) -> Result<Claw<F::Input>> {
        let x1 = self.family.inv(&key.keys[0], &td.trapdoors[0], y)?;
        let x2 = self.family.inv(&key.keys[1], &td.trapdoors[1], y)?;
        Ok(((x1, false), (x2, true)))
    }
}

#[cfg(test)]
mod tests {
    use super::toy::{ToyLinear, ToyPermutation};
    use super::*;
    use crate::seeded_rng;
    use alloc::collections::BTreeMap;
    use alloc::vec::Vec;

    #[test]
    fn from_inj_claw_re_evaluates() {
        let f = FromInj::new(ToyLinear::new(9).unwrap());
        let mut rng = seeded_rng(1);
        let (key, td) = f.gen(&mut rng).unwrap();
        for x in 0..256u64 {
            for c in [false, true] {
                let y = f.eval(&key, &x, c).unwrap();
                let ((x1, c1), (x2, c2)) = f.inv(&key, &td, &y).unwrap();
                assert_eq!(f.eval(&key, &x1, c1).unwrap(), y);
                assert_eq!(f.eval(&key, &x2, c2).unwrap(), y);
                assert_eq!(x1 ^ x2, td.x0);
                assert!(!c1 && c2);
            }
        }
    }

    #[test]
    fn from_inj_rejects_identity_shift() {
        let fam = ToyLinear::new(5).unwrap();
        let f = FromInj::new(fam.clone());
        let (k, t) = fam.gen(&mut seeded_rng(2)).unwrap();
        assert!(f.gen_with(k, t, 0).is_err());
    }

    #[test]
    fn from_bij_same_key_shares_input() {
        let f = FromBij::new(ToyPermutation::new(7).unwrap());
        let mut rng = seeded_rng(3);
        let (key, td) = f.gen_same_key(&mut rng).unwrap();
        let y = f.eval(&key, &5, false).unwrap();
        let ((x1, _), (x2, _)) = f.inv(&key, &td, &y).unwrap();
        assert_eq!(x1, x2);
    }

    #[test]
    fn from_bij_exactly_two_preimages() {
        let f = FromBij::new(ToyPermutation::new(9).unwrap());
        let (key, td) = f.gen(&mut seeded_rng(4)).unwrap();
        let mut fibres: BTreeMap<u64, Vec<(u64, bool)>> = BTreeMap::new();
        for x in 0..256u64 {
            for c in [false, true] {
                fibres
                    .entry(f.eval(&key, &x, c).unwrap())
                    .or_default()
                    .push((x, c));
            }
        }
        assert_eq!(fibres.len(), 256);
        for (y, pre) in fibres {
            assert_eq!(pre.len(), 2);
            assert_ne!(pre[0].1, pre[1].1);
            let ((x1, _), (x2, _)) = f.inv(&key, &td, &y).unwrap();
            assert!(pre.contains(&(x1, false)) && pre.contains(&(x2, true)));
        }
    }

    #[test]
    fn from_bij_round_trip() {
        let f = FromBij::new(ToyPermutation::new(13).unwrap());
        let mut rng = seeded_rng(5);
        let (key, td) = f.gen(&mut rng).unwrap();
        for _ in 0..1000 {
            let x = f.family.sample_input(&mut rng);
            let c = rng.random::<bool>();
            let y = f.eval(&key, &x, c).unwrap();
            let claw = f.inv(&key, &td, &y).unwrap();
            let found = if c { claw.1 } else { claw.0 };
            assert_eq!(found, (x, c));
        }
    }
}
