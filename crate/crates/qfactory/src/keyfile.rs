//! Key files.
//!
//! Layout: magic `QFMP`, `u16` format version, a kind byte, then three
//! `u64` header fields (size parameter, register bits, payload length),
//! all little-endian, then the payload. A public file holds the encoded
//! key; a key-pair file holds the key followed by the trapdoor.

use std::fs;
use std::path::Path;

use qfactory_core::protocol::{PublicKey, Trapdoor};
use serde_json::{json, Value};

use crate::codec::{
    get_public_key, get_trapdoor, public_key_bytes, trapdoor_bytes, CodecError, Reader, Writer,
};
use crate::session::key_hash;

pub const MAGIC: &[u8; 4] = b"QFMP";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyKind {
    Public = 1,
    KeyPair = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum KeyFileError {
    #[error("not a key file")]
    BadMagic,
    #[error("unsupported key file version {0}")]
    Version(u16),
    #[error("unknown key kind {0}")]
    Kind(u8),
    #[error("expected a key pair, found a public key")]
    NoTrapdoor,
    #[error("header does not match the key")]
    Header,
    #[error("trapdoor does not belong to the key")]
    Mismatch,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyFile {
    pub key: PublicKey,
    pub trapdoor: Option<Trapdoor>,
}

impl KeyFile {
    pub fn kind(&self) -> KeyKind {
        if self.trapdoor.is_some() {
            KeyKind::KeyPair
        } else {
            KeyKind::Public
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = public_key_bytes(&self.key);
        if let Some(td) = &self.trapdoor {
            payload.extend(trapdoor_bytes(td));
        }
        let mut w = Writer::new();
        w.bytes(MAGIC);
        w.bytes(&FORMAT_VERSION.to_le_bytes());
        w.u8(self.kind() as u8);
        w.u64(self.key.size() as u64);
        w.u64(self.key.register_bits() as u64);
        w.u64(payload.len() as u64);
        w.bytes(&payload);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, KeyFileError> {
        let mut r = Reader::new(bytes);
        if r.take(4, "magic").map_err(|_| KeyFileError::BadMagic)? != MAGIC {
            return Err(KeyFileError::BadMagic);
        }
        let version = u16::from_le_bytes(r.take(2, "version")?.try_into().expect("2 bytes"));
        if version != FORMAT_VERSION {
            return Err(KeyFileError::Version(version));
        }
        let kind = r.u8("kind")?;
        let size = r.u64("size")?;
        let register = r.u64("register")?;
        let payload_len = r.len("payload length")?;
        if r.remaining() != payload_len {
            return Err(KeyFileError::Header);
        }
        let key = get_public_key(&mut r)?;
        let trapdoor = match kind {
            1 => None,
            2 => Some(get_trapdoor(&mut r)?),
            other => return Err(KeyFileError::Kind(other)),
        };
        r.finish()?;
        if key.size() as u64 != size || key.register_bits() as u64 != register {
            return Err(KeyFileError::Header);
        }
        if let Some(td) = &trapdoor {
            if !trapdoor_fits(&key, td) {
                return Err(KeyFileError::Mismatch);
            }
        }
        Ok(Self { key, trapdoor })
    }

    pub fn write(&self, path: &Path) -> Result<(), KeyFileError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, KeyFileError> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Human-readable summary; never includes trapdoor material.
    pub fn describe(&self) -> Value {
        let mut v = json!({
            "family": self.key.family().as_str(),
            "n": self.key.size(),
            "register_bits": self.key.register_bits(),
            "k_hash": key_hash(&public_key_bytes(&self.key)),
            "has_trapdoor": self.trapdoor.is_some(),
        });
        if let PublicKey::Reg2(k) = &self.key {
            v["params"] = serde_json::to_value(k.params()).expect("params serialize");
        }
        v
    }
}

/// Structural check that `td` inverts `key`.
fn trapdoor_fits(key: &PublicKey, td: &Trapdoor) -> bool {
    match (key, td) {
        (PublicKey::Reg2(k), Trapdoor::Reg2(t)) => {
            // b0 must be the evaluation of (s0, e0)
            let b0 = t
                .s0()
                .mul_matrix(k.lwe().matrix())
                .and_then(|v| v.add_signed(t.e0()));
            k.lwe().matches(t.lwe()) && b0.as_ref() == Ok(k.b0())
        }
        (PublicKey::ToyLinear { key, .. }, Trapdoor::ToyLinear(t)) => {
            key.key.inverse().as_ref() == Some(&t.trapdoor)
                && key.key.apply(t.x0) == key.shift_image
        }
        (PublicKey::ToyPerm { key, .. }, Trapdoor::ToyPerm(t)) => {
            key.keys[0].inverse() == t.trapdoors[0] && key.keys[1].inverse() == t.trapdoors[1]
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfactory_core::protocol::{generate, FamilyId};
    use qfactory_core::seeded_rng;

    #[test]
    fn key_pairs_round_trip() {
        for (family, n) in [
            (FamilyId::Reg2, 4),
            (FamilyId::ToyLinear, 8),
            (FamilyId::ToyPerm, 6),
        ] {
            let (key, td) = generate(family, n, &mut seeded_rng(4)).unwrap();
            let file = KeyFile {
                key: key.clone(),
                trapdoor: Some(td),
            };
            assert_eq!(KeyFile::from_bytes(&file.to_bytes()).unwrap(), file);
            let public = KeyFile {
                key,
                trapdoor: None,
            };
            assert_eq!(KeyFile::from_bytes(&public.to_bytes()).unwrap(), public);
        }
    }

    #[test]
    fn header_layout() {
        let (key, _) = generate(FamilyId::ToyPerm, 3, &mut seeded_rng(1)).unwrap();
        let bytes = KeyFile {
            key,
            trapdoor: None,
        }
        .to_bytes();
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(&bytes[4..7], &[1, 0, 1]);
        assert_eq!(u64::from_le_bytes(bytes[7..15].try_into().unwrap()), 3);
    }

    #[test]
    fn foreign_trapdoor_rejected() {
        for family in FamilyId::ALL {
            let (key, _) = generate(family, 4, &mut seeded_rng(1)).unwrap();
            let (_, td) = generate(family, 4, &mut seeded_rng(2)).unwrap();
            let bytes = KeyFile {
                key,
                trapdoor: Some(td),
            }
            .to_bytes();
            assert!(
                matches!(KeyFile::from_bytes(&bytes), Err(KeyFileError::Mismatch)),
                "{family}"
            );
        }
    }

    #[test]
    fn corrupt_files_rejected() {
        let (key, _) = generate(FamilyId::ToyLinear, 4, &mut seeded_rng(1)).unwrap();
        let bytes = KeyFile {
            key,
            trapdoor: None,
        }
        .to_bytes();
        assert!(matches!(
            KeyFile::from_bytes(b"nope"),
            Err(KeyFileError::BadMagic)
        ));
        let mut v = bytes.clone();
        v[4] = 9;
        assert!(matches!(
            KeyFile::from_bytes(&v),
            Err(KeyFileError::Version(9))
        ));
        let mut v = bytes.clone();
        v[6] = 7;
        assert!(matches!(
            KeyFile::from_bytes(&v),
            Err(KeyFileError::Kind(7))
        ));
        assert!(KeyFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn description_has_no_trapdoor() {
        let (key, td) = generate(FamilyId::Reg2, 4, &mut seeded_rng(1)).unwrap();
        let d = KeyFile {
            key,
            trapdoor: Some(td),
        }
        .describe();
        assert_eq!(d["params"]["k"], 31);
        assert_eq!(d["has_trapdoor"], true);
        assert!(d.get("trapdoor").is_none());
    }
}
