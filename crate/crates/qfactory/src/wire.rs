//! Framed binary messages: a 4-byte big-endian length, a tag byte, then
//! the payload. The length counts the tag and payload.

use std::io::{self, Read, Write};

use qfactory_core::protocol::{AbortReason, FamilyId, Message, Outcome};
use qfactory_core::zq::BitString;

use crate::codec::{
    get_image, get_public_key, put_image, put_public_key, CodecError, Reader, Writer,
};

pub const MAX_FRAME: usize = 64 << 20;

pub mod tag {
    pub const HELLO: u8 = 1;
    pub const PUBLIC_KEY: u8 = 2;
    pub const MEASURED_Y: u8 = 3;
    pub const MEASURE_INSTRUCTION: u8 = 4;
    pub const OUTCOMES: u8 = 5;
    pub const RESULT: u8 = 6;
    pub const ERROR: u8 = 7;
}

/// Codes carried by [`Message::Error`].
pub mod code {
    pub const FRAME: u8 = 1;
    pub const VERSION: u8 = 2;
    pub const UNEXPECTED: u8 = 3;
    pub const FAMILY: u8 = 4;
    pub const INTERNAL: u8 = 5;
    pub const DIGEST: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("connection closed")]
    Closed,
    #[error("frame of {0} bytes exceeds the limit")]
    TooLarge(usize),
    #[error("empty frame")]
    Empty,
    #[error("unknown tag {0}")]
    UnknownTag(u8),
    #[error("malformed payload: {0}")]
    Payload(#[from] CodecError),
}

pub fn encode(msg: &Message) -> Vec<u8> {
    let mut w = Writer::new();
    match msg {
        Message::Hello {
            version,
            params_digest,
            family,
        } => {
            w.u8(tag::HELLO);
            w.u8(*version);
            w.bytes(params_digest);
            w.u8(family.code());
        }
        Message::PublicKey(key) => {
            w.u8(tag::PUBLIC_KEY);
            put_public_key(&mut w, key);
        }
        Message::MeasuredY(y) => {
            w.u8(tag::MEASURED_Y);
            put_image(&mut w, y);
        }
        Message::MeasureInstruction { alphas } => {
            w.u8(tag::MEASURE_INSTRUCTION);
            w.len_prefixed(alphas);
        }
        Message::Outcomes { b } => {
            w.u8(tag::OUTCOMES);
            w.u64(b.len() as u64);
            w.bytes(&b.to_packed());
        }
        Message::Result(outcome) => {
            w.u8(tag::RESULT);
            w.u8(match outcome {
                Outcome::Ok => 0,
                Outcome::Abort(reason) => reason.code(),
            });
        }
        Message::Error { code, detail } => {
            w.u8(tag::ERROR);
            w.u8(*code);
            w.len_prefixed(detail.as_bytes());
        }
    }
    w.into_bytes()
}

pub fn decode(body: &[u8]) -> Result<Message, WireError> {
    let (&t, payload) = body.split_first().ok_or(WireError::Empty)?;
    let mut r = Reader::new(payload);
    let msg = match t {
        tag::HELLO => {
            let version = r.u8("version")?;
            let params_digest = r.take(32, "digest")?.try_into().expect("32 bytes");
            let family = FamilyId::from_code(r.u8("family")?).map_err(CodecError::from)?;
            Message::Hello {
                version,
                params_digest,
                family,
            }
        }
        tag::PUBLIC_KEY => Message::PublicKey(get_public_key(&mut r)?),
        tag::MEASURED_Y => Message::MeasuredY(get_image(&mut r)?),
        tag::MEASURE_INSTRUCTION => {
            let alphas = r.len_prefixed("angles")?.to_vec();
            if alphas.iter().any(|&a| a > 7) {
                return Err(CodecError::Invalid("angle").into());
            }
            Message::MeasureInstruction { alphas }
        }
        tag::OUTCOMES => {
            let len = r.len("outcome count")?;
            let packed = r.take(len.div_ceil(8), "outcomes")?;
            Message::Outcomes {
                b: BitString::from_packed(packed, len).map_err(CodecError::from)?,
            }
        }
        tag::RESULT => Message::Result(match r.u8("result")? {
            0 => Outcome::Ok,
            c => Outcome::Abort(AbortReason::from_code(c).map_err(CodecError::from)?),
        }),
        tag::ERROR => {
            let code = r.u8("error code")?;
            let detail = String::from_utf8_lossy(r.len_prefixed("detail")?).into_owned();
            Message::Error { code, detail }
        }
        other => return Err(WireError::UnknownTag(other)),
    };
    r.finish()?;
    Ok(msg)
}

/// Writes one frame around an already encoded body.
pub fn write_frame<W: Write>(w: &mut W, body: &[u8]) -> Result<(), WireError> {
    if body.len() > MAX_FRAME {
        return Err(WireError::TooLarge(body.len()));
    }
    w.write_all(&(body.len() as u32).to_be_bytes())?;
    w.write_all(body)?;
    w.flush()?;
    Ok(())
}

/// Reads one frame body. A clean end of stream before the length prefix is
/// [`WireError::Closed`]; anything cut short after it is an IO error.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Vec<u8>, WireError> {
    let mut len = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut len[got..])? {
            0 if got == 0 => return Err(WireError::Closed),
            0 => return Err(io::Error::from(io::ErrorKind::UnexpectedEof).into()),
            n => got += n,
        }
    }
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME {
        return Err(WireError::TooLarge(len));
    }
    if len == 0 {
        return Err(WireError::Empty);
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfactory_core::protocol::generate;
    use qfactory_core::seeded_rng;

    fn samples() -> Vec<Message> {
        let (key, _) = generate(FamilyId::Reg2, 4, &mut seeded_rng(1)).unwrap();
        let y = key
            .eval(&key.sample_domain(&mut seeded_rng(2)).unwrap())
            .unwrap();
        vec![
            Message::Hello {
                version: 1,
                params_digest: [7; 32],
                family: FamilyId::ToyPerm,
            },
            Message::PublicKey(key),
            Message::MeasuredY(y),
            Message::MeasuredY(qfactory_core::protocol::Image::Bits(99)),
            Message::MeasureInstruction {
                alphas: vec![0, 7, 3],
            },
            Message::Outcomes {
                b: BitString::new(vec![1, 0, 1, 1, 0, 0, 0, 0, 1]).unwrap(),
            },
            Message::Result(Outcome::Ok),
            Message::Result(Outcome::Abort(AbortReason::NoSecondPreimage)),
            Message::Error {
                code: code::FRAME,
                detail: "bad".into(),
            },
        ]
    }

    #[test]
    fn messages_round_trip_through_frames() {
        for msg in samples() {
            let mut buf = Vec::new();
            write_frame(&mut buf, &encode(&msg)).unwrap();
            let body = read_frame(&mut buf.as_slice()).unwrap();
            assert_eq!(decode(&body).unwrap(), msg);
        }
    }

    #[test]
    fn frame_layout() {
        let mut buf = Vec::new();
        write_frame(&mut buf, &encode(&Message::Result(Outcome::Ok))).unwrap();
        assert_eq!(buf, [0, 0, 0, 2, tag::RESULT, 0]);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(
            read_frame(&mut [].as_slice()),
            Err(WireError::Closed)
        ));
        assert!(matches!(
            read_frame(&mut [0, 0].as_slice()),
            Err(WireError::Io(_))
        ));
        assert!(matches!(
            read_frame(&mut [0, 0, 0, 5, 1].as_slice()),
            Err(WireError::Io(_))
        ));
        assert!(matches!(
            read_frame(&mut [0xff, 0, 0, 0].as_slice()),
            Err(WireError::TooLarge(_))
        ));
        assert!(matches!(decode(&[42]), Err(WireError::UnknownTag(42))));
        assert!(matches!(
            decode(&[tag::RESULT, 0, 0]),
            Err(WireError::Payload(CodecError::Trailing(1)))
        ));
        assert!(decode(&[tag::MEASURE_INSTRUCTION, 1, 0, 0, 0, 0, 0, 0, 0, 8]).is_err());
    }
}
