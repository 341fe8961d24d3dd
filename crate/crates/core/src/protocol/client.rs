//! The classical client: owns the trapdoor and the measurement angles.

use alloc::vec::Vec;

use rand::Rng;

use super::family::{generate, FamilyId, Image, Inversion, PublicKey, Trapdoor};
use super::message::{unexpected, AbortReason, Message, Outcome};
use super::theta::{client_theta, ThetaOutcome};
use crate::quantum::QubitAngle;
use crate::zq::BitString;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClientPhase {
    AwaitY,
    AwaitB,
    Done,
    Aborted,
}

#[derive(Clone, Debug)]
pub struct ClientSession {
    key: PublicKey,
    trapdoor: Trapdoor,
    alphas: Vec<u8>,
    phase: ClientPhase,
    y: Option<Image>,
    claw: Option<(BitString, BitString)>,
    b: Option<BitString>,
    outcome: Option<ThetaOutcome>,
}

impl ClientSession {
    /// Samples the angles `α`, then a key pair.
    pub fn new<R: Rng + ?Sized>(family: FamilyId, n: usize, rng: &mut R) -> Result<Self> {
        let register = family.register_bits(n)?;
        let alphas = (0..register - 1)
            .map(|_| rng.random_range(0..8u8))
            .collect();
        let (key, trapdoor) = generate(family, n, rng)?;
        Self::with_parts(key, trapdoor, alphas)
    }

    /// A session around an existing key pair.
    pub fn with_parts(key: PublicKey, trapdoor: Trapdoor, alphas: Vec<u8>) -> Result<Self> {
        if key.family() != trapdoor.family() {
            return Err(Error::InvalidArgument(
                "key and trapdoor belong to different families",
            ));
        }
        if alphas.len() + 1 != key.register_bits() || alphas.iter().any(|&a| a > 7) {
            return Err(Error::InvalidArgument(
                "need one angle in 0..8 per non-output qubit",
            ));
        }
        Ok(Self {
            key,
            trapdoor,
            alphas,
            phase: ClientPhase::AwaitY,
            y: None,
            claw: None,
            b: None,
            outcome: None,
        })
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.key
    }

    pub fn trapdoor(&self) -> &Trapdoor {
        &self.trapdoor
    }

    pub fn family(&self) -> FamilyId {
        self.key.family()
    }

    pub fn alphas(&self) -> &[u8] {
        &self.alphas
    }

    pub fn phase(&self) -> ClientPhase {
        self.phase
    }

    pub fn y(&self) -> Option<&Image> {
        self.y.as_ref()
    }

    pub fn claw(&self) -> Option<&(BitString, BitString)> {
        self.claw.as_ref()
    }

    pub fn b(&self) -> Option<&BitString> {
        self.b.as_ref()
    }

    pub fn outcome(&self) -> Option<ThetaOutcome> {
        self.outcome
    }

    pub fn theta(&self) -> Option<QubitAngle> {
        match self.outcome {
            Some(ThetaOutcome::Theta(r)) => Some(r),
            _ => None,
        }
    }

    /// The message that opens the exchange.
    pub fn key_message(&self) -> Message {
        Message::PublicKey(self.key.clone())
    }

    fn abort(&mut self, reason: AbortReason) -> Message {
        self.phase = ClientPhase::Aborted;
        self.outcome = Some(ThetaOutcome::Abort(reason));
        Message::Result(Outcome::Abort(reason))
    }

    /// Inverts `y`. Replies with the measurement instruction, or with an
    /// abort when there is no claw.
    pub fn handle_y(&mut self, y: Image) -> Result<Message> {
        if self.phase != ClientPhase::AwaitY {
            return Err(Error::Protocol("image received out of turn".into()));
        }
        let inversion = self.trapdoor.invert(&self.key, &y);
        self.y = Some(y);
        match inversion {
            Ok(Inversion::Claw(a, b)) => {
                self.claw = Some((a, b));
                self.phase = ClientPhase::AwaitB;
                Ok(Message::MeasureInstruction {
                    alphas: self.alphas.clone(),
                })
            }
            Ok(Inversion::Single(_)) => Ok(self.abort(AbortReason::NoSecondPreimage)),
            Err(_) => Ok(self.abort(AbortReason::InversionFailed)),
        }
    }

    /// Computes θ from the outcomes and closes the session.
    pub fn handle_outcomes(&mut self, b: BitString) -> Result<Message> {
        if self.phase != ClientPhase::AwaitB {
            return Err(Error::Protocol("outcomes received out of turn".into()));
        }
        if b.len() != self.alphas.len() {
            return Err(Error::Protocol("wrong number of outcomes".into()));
        }
        let (x, xp) = self
            .claw
            .as_ref()
            .ok_or(Error::Protocol("no claw".into()))?;
        let outcome = client_theta(x, xp, &self.alphas, &b)?;
        self.b = Some(b);
        Ok(match outcome {
            ThetaOutcome::Theta(_) => {
                self.outcome = Some(outcome);
                self.phase = ClientPhase::Done;
                Message::Result(Outcome::Ok)
            }
            ThetaOutcome::Abort(reason) => self.abort(reason),
        })
    }

    /// Dispatches an incoming message.
    pub fn handle(&mut self, msg: Message) -> Result<Message> {
        match msg {
            Message::MeasuredY(y) => self.handle_y(y),
            Message::Outcomes { b } => self.handle_outcomes(b),
            other => Err(unexpected("MeasuredY or Outcomes", &other)),
        }
    }
}
