//! Protocol messages, independent of any byte encoding.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::family::{FamilyId, Image, PublicKey};
use crate::zq::BitString;
use crate::{Error, Result};

pub const PROTOCOL_VERSION: u8 = 1;

/// Why a session produced no qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AbortReason {
    /// The image has a single preimage in the domain.
    NoSecondPreimage,
    /// The trapdoor could not invert the image at all.
    InversionFailed,
    /// The two preimages agree on the last bit.
    EqualLastBits,
}

impl AbortReason {
    pub const ALL: [AbortReason; 3] = [
        AbortReason::NoSecondPreimage,
        AbortReason::InversionFailed,
        AbortReason::EqualLastBits,
    ];

    pub fn code(self) -> u8 {
        match self {
            AbortReason::NoSecondPreimage => 1,
            AbortReason::InversionFailed => 2,
            AbortReason::EqualLastBits => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.code() == code)
            .ok_or(Error::Encoding("unknown abort reason"))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AbortReason::NoSecondPreimage => "no_second_preimage",
            AbortReason::InversionFailed => "inversion_failed",
            AbortReason::EqualLastBits => "equal_last_bits",
        }
    }
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The final word of a session. Never carries the angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Abort(AbortReason),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Message {
    Hello {
        version: u8,
        params_digest: [u8; 32],
        family: FamilyId,
    },
    PublicKey(PublicKey),
    MeasuredY(Image),
    MeasureInstruction {
        alphas: Vec<u8>,
    },
    Outcomes {
        b: BitString,
    },
    Result(Outcome),
    Error {
        code: u8,
        detail: String,
    },
}

impl Message {
    pub fn name(&self) -> &'static str {
        match self {
            Message::Hello { .. } => "Hello",
            Message::PublicKey(_) => "PublicKey",
            Message::MeasuredY(_) => "MeasuredY",
            Message::MeasureInstruction { .. } => "MeasureInstruction",
            Message::Outcomes { .. } => "Outcomes",
            Message::Result(_) => "Result",
            Message::Error { .. } => "Error",
        }
    }
}

pub(crate) fn unexpected(expected: &str, got: &Message) -> Error {
    Error::Protocol(alloc::format!("expected {expected}, got {}", got.name()))
}
