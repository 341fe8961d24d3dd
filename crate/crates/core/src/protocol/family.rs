//! The function families the protocol can run on, seen through the protocol
//! register: an `n`-bit string whose last bit is the branch bit `c`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::constructions::toy::{BitMatrix, PermutationTable, ToyLinear, ToyPermutation};
use crate::constructions::{
    FromBij, FromBijKey, FromBijTrapdoor, FromInj, FromInjKey, FromInjTrapdoor, TrapdoorFamily,
};
use crate::params::gen_params;
use crate::reg2::{
    reg2_eval_preimage, reg2_gen, reg2_inv, Reg2Inversion, Reg2Key, Reg2Preimage, Reg2Trapdoor,
};
use crate::zq::{BitString, ZqVector};
use crate::{Error, Result};

/// Largest register [`PublicKey::preimages`] will enumerate.
pub const MAX_ENUMERABLE_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FamilyId {
    Reg2,
    ToyLinear,
    ToyPerm,
}

impl FamilyId {
    pub const ALL: [FamilyId; 3] = [FamilyId::Reg2, FamilyId::ToyLinear, FamilyId::ToyPerm];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Reg2 => "reg2",
            FamilyId::ToyLinear => "toy-linear",
            FamilyId::ToyPerm => "toy-perm",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            FamilyId::Reg2 => 1,
            FamilyId::ToyLinear => 2,
            FamilyId::ToyPerm => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.code() == code)
            .ok_or(Error::Encoding("unknown family code"))
    }

    /// Toy families are not one-way.
    pub fn is_toy(self) -> bool {
        !matches!(self, FamilyId::Reg2)
    }

    /// Register size for size parameter `n`: the lattice dimension for
    /// `reg2`, the register itself for the toy families.
    pub fn register_bits(self, n: usize) -> Result<usize> {
        match self {
            FamilyId::Reg2 => Ok(gen_params(n)?.domain_bits()),
            FamilyId::ToyLinear => Ok(ToyLinear::new(n)?.input_bits() + 1),
            FamilyId::ToyPerm => Ok(ToyPermutation::new(n)?.input_bits() + 1),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or(Error::InvalidArgument(
                "unknown family; expected reg2, toy-linear or toy-perm",
            ))
    }
}

/// A function value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Lattice(ZqVector),
    Bits(u64),
}

/// The public index of a two-regular function.
#[derive(Clone, Debug, PartialEq)]
pub enum PublicKey {
    Reg2(Reg2Key),
    ToyLinear {
        register: usize,
        key: FromInjKey<BitMatrix, u64>,
    },
    ToyPerm {
        register: usize,
        key: FromBijKey<PermutationTable>,
    },
}

/// The client's secret.
#[derive(Clone, Debug, PartialEq)]
pub enum Trapdoor {
    Reg2(Reg2Trapdoor),
    ToyLinear(FromInjTrapdoor<BitMatrix, u64>),
    ToyPerm(FromBijTrapdoor<PermutationTable>),
}

/// Preimages of an image as register strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inversion {
    /// Two preimages; the first has `c = 0`.
    Claw(BitString, BitString),
    Single(BitString),
}

fn toy_register(x: u64, c: bool, register: usize) -> BitString {
    let mut bits = BitString::from_u64(x, register - 1);
    bits.push(c);
    bits
}

fn split_toy(bits: &BitString, register: usize) -> Result<(u64, bool)> {
    if bits.len() != register {
        return Err(Error::Encoding("register length does not match the key"));
    }
    let x = bits.as_slice()[..register - 1]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
    Ok((x, bits.last() == Some(1)))
}

/// Generates a key pair for `family` at size `n`.
pub fn generate<R: Rng + ?Sized>(
    family: FamilyId,
    n: usize,
    rng: &mut R,
) -> Result<(PublicKey, Trapdoor)> {
    match family {
        FamilyId::Reg2 => {
            let params = gen_params(n)?;
            let (key, td) = reg2_gen(&params, rng)?;
            Ok((PublicKey::Reg2(key), Trapdoor::Reg2(td)))
        }
        FamilyId::ToyLinear => {
            let f = FromInj::new(ToyLinear::new(n)?);
            let (key, td) = f.gen(rng)?;
            Ok((
                PublicKey::ToyLinear { register: n, key },
                Trapdoor::ToyLinear(td),
            ))
        }
        FamilyId::ToyPerm => {
            let f = FromBij::new(ToyPermutation::new(n)?);
            let (key, td) = f.gen(rng)?;
            Ok((
                PublicKey::ToyPerm { register: n, key },
                Trapdoor::ToyPerm(td),
            ))
        }
    }
}

impl PublicKey {
    pub fn family(&self) -> FamilyId {
        match self {
            PublicKey::Reg2(_) => FamilyId::Reg2,
            PublicKey::ToyLinear { .. } => FamilyId::ToyLinear,
            PublicKey::ToyPerm { .. } => FamilyId::ToyPerm,
        }
    }

    /// Size parameter: lattice dimension or toy register size.
    pub fn size(&self) -> usize {
        match self {
            PublicKey::Reg2(k) => k.params().n,
            PublicKey::ToyLinear { register, .. } | PublicKey::ToyPerm { register, .. } => {
                *register
            }
        }
    }

    pub fn register_bits(&self) -> usize {
        match self {
            PublicKey::Reg2(k) => k.params().domain_bits(),
            PublicKey::ToyLinear { register, .. } | PublicKey::ToyPerm { register, .. } => {
                *register
            }
        }
    }

    fn eval_toy(&self, x: u64, c: bool) -> Result<u64> {
        match self {
            PublicKey::ToyLinear { register, key } => {
                FromInj::new(ToyLinear::new(*register)?).eval(key, &x, c)
            }
            PublicKey::ToyPerm { register, key } => {
                FromBij::new(ToyPermutation::new(*register)?).eval(key, &x, c)
            }
            PublicKey::Reg2(_) => Err(Error::InvalidArgument("not a toy key")),
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<Image> {
        match self {
            PublicKey::Reg2(key) => {
                let pre = Reg2Preimage::decode(x, key.params())?;
                Ok(Image::Lattice(reg2_eval_preimage(key, &pre)?))
            }
            PublicKey::ToyLinear { register, .. } | PublicKey::ToyPerm { register, .. } => {
                let (v, c) = split_toy(x, *register)?;
                Ok(Image::Bits(self.eval_toy(v, c)?))
            }
        }
    }

    /// A uniform point of the domain.
    pub fn sample_domain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BitString> {
        match self {
            PublicKey::Reg2(key) => Reg2Preimage::sample(key.params(), rng).encode(key.params()),
            PublicKey::ToyLinear { register, .. } => {
                let x = ToyLinear::new(*register)?.sample_input(rng);
                Ok(toy_register(x, rng.random::<bool>(), *register))
            }
            PublicKey::ToyPerm { register, .. } => {
                let x = ToyPermutation::new(*register)?.sample_input(rng);
                Ok(toy_register(x, rng.random::<bool>(), *register))
            }
        }
    }

    /// Every preimage of `y`, found by evaluating the public function on the
    /// whole domain. Only possible for small registers.
    pub fn preimages(&self, y: &Image) -> Result<Vec<BitString>> {
        let register = self.register_bits();
        let (Image::Bits(target), false) = (y, matches!(self, PublicKey::Reg2(_))) else {
            return Err(Error::InvalidArgument("domain too large to enumerate"));
        };
        if register > MAX_ENUMERABLE_BITS {
            return Err(Error::InvalidArgument("domain too large to enumerate"));
        }
        let mut found = Vec::new();
        for c in [false, true] {
            for x in 0..1u64 << (register - 1) {
                if self.eval_toy(x, c)? == *target {
                    found.push(toy_register(x, c, register));
                }
            }
        }
        Ok(found)
    }

    /// True when [`PublicKey::preimages`] can run.
    pub fn is_enumerable(&self) -> bool {
        !matches!(self, PublicKey::Reg2(_)) && self.register_bits() <= MAX_ENUMERABLE_BITS
    }
}

impl Trapdoor {
    pub fn family(&self) -> FamilyId {
        match self {
            Trapdoor::Reg2(_) => FamilyId::Reg2,
            Trapdoor::ToyLinear(_) => FamilyId::ToyLinear,
            Trapdoor::ToyPerm(_) => FamilyId::ToyPerm,
        }
    }

    /// Inverts `y`; the REG2 one-preimage outcome becomes [`Inversion::Single`].
    pub fn invert(&self, key: &PublicKey, y: &Image) -> Result<Inversion> {
        match (self, key, y) {
            (Trapdoor::Reg2(td), PublicKey::Reg2(k), Image::Lattice(v)) => {
                let p = k.params();
                match reg2_inv(k, td, v)? {
                    Reg2Inversion::Two(a, b) => Ok(Inversion::Claw(a.encode(p)?, b.encode(p)?)),
                    Reg2Inversion::NoSecondPreimage(a) => Ok(Inversion::Single(a.encode(p)?)),
                }
            }
            (Trapdoor::ToyLinear(td), PublicKey::ToyLinear { register, key }, Image::Bits(v)) => {
                let ((x1, c1), (x2, c2)) =
                    FromInj::new(ToyLinear::new(*register)?).inv(key, td, v)?;
                Ok(Inversion::Claw(
                    toy_register(x1, c1, *register),
                    toy_register(x2, c2, *register),
                ))
            }
            (Trapdoor::ToyPerm(td), PublicKey::ToyPerm { register, key }, Image::Bits(v)) => {
                let ((x1, c1), (x2, c2)) =
                    FromBij::new(ToyPermutation::new(*register)?).inv(key, td, v)?;
                Ok(Inversion::Claw(
                    toy_register(x1, c1, *register),
                    toy_register(x2, c2, *register),
                ))
            }
            _ => Err(Error::Protocol(alloc::string::String::from(
                "trapdoor, key and image belong to different families",
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn names_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(f.as_str().parse::<FamilyId>().unwrap(), f);
            assert_eq!(FamilyId::from_code(f.code()).unwrap(), f);
        }
        assert!("lwe".parse::<FamilyId>().is_err());
        assert!(FamilyId::ToyLinear.is_toy() && !FamilyId::Reg2.is_toy());
    }

    #[test]
    fn register_sizes() {
        assert_eq!(
            FamilyId::Reg2.register_bits(8).unwrap(),
            8 * 36 + 304 * 16 + 1
        );
        assert_eq!(FamilyId::ToyPerm.register_bits(6).unwrap(), 6);
    }

    #[test]
    fn toy_claws_exhaustive() {
        for family in [FamilyId::ToyLinear, FamilyId::ToyPerm] {
            for n in 2..=10 {
                let mut rng = seeded_rng(n as u64);
                let (key, td) = generate(family, n, &mut rng).unwrap();
                for v in 0..1u64 << (n - 1) {
                    for c in [false, true] {
                        let x = toy_register(v, c, n);
                        let y = key.eval(&x).unwrap();
                        let Inversion::Claw(a, b) = td.invert(&key, &y).unwrap() else {
                            panic!("toy families always claw");
                        };
                        assert_eq!(
                            key.preimages(&y).unwrap(),
                            alloc::vec![a.clone(), b.clone()]
                        );
                        assert_eq!((a.last(), b.last()), (Some(0), Some(1)));
                        assert!(a == x || b == x);
                    }
                }
            }
        }
    }

    #[test]
    fn linear_claw_difference_is_shift() {
        let n = 10;
        let (key, td) = generate(FamilyId::ToyLinear, n, &mut seeded_rng(5)).unwrap();
        let Trapdoor::ToyLinear(inner) = &td else {
            unreachable!()
        };
        let mut expected = BitString::from_u64(inner.x0, n - 1);
        expected.push(true);
        for v in 0..1u64 << (n - 1) {
            let y = key.eval(&toy_register(v, false, n)).unwrap();
            let Inversion::Claw(a, b) = td.invert(&key, &y).unwrap() else {
                unreachable!()
            };
            assert_eq!(a.xor(&b).unwrap(), expected);
        }
    }

    #[test]
    fn reg2_round_trip_through_register() {
        let (key, td) = generate(FamilyId::Reg2, 4, &mut seeded_rng(6)).unwrap();
        let mut rng = seeded_rng(7);
        for _ in 0..10 {
            let x = key.sample_domain(&mut rng).unwrap();
            let y = key.eval(&x).unwrap();
            match td.invert(&key, &y).unwrap() {
                Inversion::Claw(a, b) => {
                    assert!(a == x || b == x);
                    assert_eq!(key.eval(&a).unwrap(), y);
                    assert_eq!(key.eval(&b).unwrap(), y);
                }
                Inversion::Single(a) => assert_eq!(a, x),
            }
        }
        assert!(!key.is_enumerable());
        assert!(key.preimages(&Image::Bits(0)).is_err());
    }

    #[test]
    fn mismatched_families() {
        let (k1, _) = generate(FamilyId::ToyLinear, 4, &mut seeded_rng(1)).unwrap();
        let (_, t2) = generate(FamilyId::ToyPerm, 4, &mut seeded_rng(1)).unwrap();
        assert!(t2.invert(&k1, &Image::Bits(1)).is_err());
    }
}
