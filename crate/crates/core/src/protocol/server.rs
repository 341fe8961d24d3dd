//! The simulated quantum server. It sees only the public key, so it cannot
//! hold trapdoor material.
//!
//! Stage 1 is simulated classically: sample `x`, send `y = f(x)`, and find
//! the rest of the collapsed superposition by evaluating `f` on the whole
//! domain. When the domain is too large for that (REG2) the analytic
//! back-end draws the Born-uniform outcomes and leaves the output qubit
//! unresolved.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use super::family::{Image, PublicKey};
use super::message::{unexpected, Message, Outcome};
use crate::quantum::{
    analytic_run_stage2, sample_outcomes, sv_prepare_claw, sv_run_stage2, AnalyticOutput,
    QubitAngle, StateVector, MAX_QUBITS,
};
use crate::zq::BitString;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Full `2^n` amplitude simulation.
    StateVector,
    /// Two-branch phase tracking.
    Analytic,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::StateVector => "statevector",
            Backend::Analytic => "analytic",
        }
    }
}

impl core::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Backend::StateVector),
            "analytic" => Ok(Backend::Analytic),
            _ => Err(Error::InvalidArgument(
                "unknown backend; expected statevector or analytic",
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServerPhase {
    AwaitKey,
    AwaitInstruction,
    AwaitResult,
    Done,
}

/// What the server holds on the last qubit after Stage 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ServerOutput {
    Amplitudes([Complex64; 2]),
    Angle(QubitAngle),
    /// A computational basis state.
    Fixed(u8),
    /// The partner preimage was not computed.
    Unresolved,
}

/// Post-Stage-1 register.
#[derive(Clone, Debug)]
enum Collapsed {
    /// Enumerated preimages of `y`; the sampled `x` is among them.
    Known(Vec<BitString>),
    Unknown,
}

#[derive(Debug)]
pub struct ServerSession<R> {
    backend: Backend,
    rng: R,
    phase: ServerPhase,
    key: Option<PublicKey>,
    x: Option<BitString>,
    collapsed: Option<Collapsed>,
    b: Option<BitString>,
    output: Option<ServerOutput>,
    result: Option<Outcome>,
}

impl<R: Rng> ServerSession<R> {
    pub fn new(backend: Backend, rng: R) -> Self {
        Self {
            backend,
            rng,
            phase: ServerPhase::AwaitKey,
            key: None,
            x: None,
            collapsed: None,
            b: None,
            output: None,
            result: None,
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn phase(&self) -> ServerPhase {
        self.phase
    }

    pub fn key(&self) -> Option<&PublicKey> {
        self.key.as_ref()
    }

    /// The sampled preimage.
    pub fn x(&self) -> Option<&BitString> {
        self.x.as_ref()
    }

    pub fn b(&self) -> Option<&BitString> {
        self.b.as_ref()
    }

    pub fn output(&self) -> Option<ServerOutput> {
        self.output
    }

    pub fn result(&self) -> Option<Outcome> {
        self.result
    }

    /// Stage 1: samples `x` and returns `y = f(x)`.
    pub fn handle_key(&mut self, key: PublicKey) -> Result<Message> {
        if self.phase != ServerPhase::AwaitKey {
            return Err(Error::Protocol("public key received out of turn".into()));
        }
        let register = key.register_bits();
        if self.backend == Backend::StateVector && (!key.is_enumerable() || register > MAX_QUBITS) {
            return Err(Error::TooManyQubits {
                requested: register,
                max: MAX_QUBITS,
            });
        }
        let x = key.sample_domain(&mut self.rng)?;
        let y = key.eval(&x)?;
        let collapsed = if key.is_enumerable() {
            let pre = key.preimages(&y)?;
            if !pre.contains(&x) || pre.len() > 2 {
                return Err(Error::Protocol("public function is not two-to-one".into()));
            }
            Collapsed::Known(pre)
        } else {
            Collapsed::Unknown
        };
        self.key = Some(key);
        self.x = Some(x);
        self.collapsed = Some(collapsed);
        self.phase = ServerPhase::AwaitInstruction;
        Ok(Message::MeasuredY(y))
    }

    /// Stage 2: measures every qubit but the last and returns the outcomes.
    pub fn handle_instruction(&mut self, alphas: Vec<u8>) -> Result<Message> {
        if self.phase != ServerPhase::AwaitInstruction {
            return Err(Error::Protocol("instruction received out of turn".into()));
        }
        let x = self
            .x
            .clone()
            .ok_or(Error::Protocol("no register".into()))?;
        if alphas.len() + 1 != x.len() || alphas.iter().any(|&a| a > 7) {
            return Err(Error::Protocol(
                "need one angle in 0..8 per non-output qubit".into(),
            ));
        }
        let (b, output) = match (self.backend, self.collapsed.take()) {
            (Backend::StateVector, Some(Collapsed::Known(pre))) => {
                let state = match pre.as_slice() {
                    [a, b] => sv_prepare_claw(a, b)?,
                    _ => StateVector::basis(&x)?,
                };
                let run = sv_run_stage2(state, &alphas, &mut self.rng)?;
                (run.b, ServerOutput::Amplitudes(run.output))
            }
            (Backend::Analytic, Some(Collapsed::Known(pre))) => match pre.as_slice() {
                [a, b] => {
                    let run = analytic_run_stage2(a, b, &alphas, &mut self.rng)?;
                    let output = match run.output {
                        AnalyticOutput::Angle(r) => ServerOutput::Angle(r),
                        AnalyticOutput::Fixed(bit) => ServerOutput::Fixed(bit),
                    };
                    (run.b, output)
                }
                _ => (
                    sample_outcomes(alphas.len(), &mut self.rng),
                    ServerOutput::Fixed(x.get(x.len() - 1)),
                ),
            },
            (Backend::Analytic, Some(Collapsed::Unknown)) => (
                sample_outcomes(alphas.len(), &mut self.rng),
                ServerOutput::Unresolved,
            ),
            _ => return Err(Error::Protocol("register not prepared".into())),
        };
        self.b = Some(b.clone());
        self.output = Some(output);
        self.phase = ServerPhase::AwaitResult;
        Ok(Message::Outcomes { b })
    }

    pub fn handle_result(&mut self, outcome: Outcome) -> Result<()> {
        if !matches!(
            self.phase,
            ServerPhase::AwaitInstruction | ServerPhase::AwaitResult
        ) {
            return Err(Error::Protocol("result received out of turn".into()));
        }
        self.result = Some(outcome);
        self.phase = ServerPhase::Done;
        Ok(())
    }

    /// Dispatches an incoming message; `None` when no reply is due.
    pub fn handle(&mut self, msg: Message) -> Result<Option<Message>> {
        match msg {
            Message::PublicKey(key) => self.handle_key(key).map(Some),
            Message::MeasureInstruction { alphas } => self.handle_instruction(alphas).map(Some),
            Message::Result(outcome) => self.handle_result(outcome).map(|()| None),
            other => Err(unexpected(
                "PublicKey, MeasureInstruction or Result",
                &other,
            )),
        }
    }

    /// The image the server sent, if any.
    pub fn y(&self) -> Option<Image> {
        let key = self.key.as_ref()?;
        key.eval(self.x.as_ref()?).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::client::{ClientPhase, ClientSession};
    use crate::protocol::family::FamilyId;
    use crate::quantum::fidelity;
    use crate::{seeded_rng, seeded_stream};

    fn run(
        family: FamilyId,
        n: usize,
        backend: Backend,
        seed: u64,
    ) -> (ClientSession, ServerSession<crate::SeededRng>) {
        let mut client = ClientSession::new(family, n, &mut seeded_stream(seed, 0)).unwrap();
        let mut server = ServerSession::new(backend, seeded_stream(seed, 1));
        let mut msg = client.key_message();
        loop {
            let Some(reply) = server.handle(msg).unwrap() else {
                break;
            };
            msg = client.handle(reply).unwrap();
        }
        (client, server)
    }

    #[test]
    fn statevector_output_matches_client_angle() {
        for family in [FamilyId::ToyLinear, FamilyId::ToyPerm] {
            for seed in 0..50 {
                let (client, server) = run(family, 6, Backend::StateVector, seed);
                assert_eq!(client.phase(), ClientPhase::Done);
                let Some(ServerOutput::Amplitudes(a)) = server.output() else {
                    panic!()
                };
                assert!(fidelity(a, client.theta().unwrap()) >= 1.0 - 1e-9);
                assert_eq!(server.result(), Some(Outcome::Ok));
            }
        }
    }

    #[test]
    fn backends_agree_on_outcomes() {
        for seed in 0..50 {
            let (c1, s1) = run(FamilyId::ToyLinear, 7, Backend::StateVector, seed);
            let (c2, s2) = run(FamilyId::ToyLinear, 7, Backend::Analytic, seed);
            assert_eq!(s1.b(), s2.b());
            assert_eq!(c1.theta(), c2.theta());
            assert_eq!(s2.output(), Some(ServerOutput::Angle(c2.theta().unwrap())));
        }
    }

    #[test]
    fn reg2_analytic_completes() {
        let (client, server) = run(FamilyId::Reg2, 4, Backend::Analytic, 9);
        assert!(matches!(
            client.phase(),
            ClientPhase::Done | ClientPhase::Aborted
        ));
        assert_eq!(server.phase(), ServerPhase::Done);
    }

    #[test]
    fn reg2_rejects_statevector() {
        let (key, _) = crate::protocol::generate(FamilyId::Reg2, 4, &mut seeded_rng(1)).unwrap();
        let mut server = ServerSession::new(Backend::StateVector, seeded_rng(2));
        assert!(matches!(
            server.handle_key(key),
            Err(Error::TooManyQubits { .. })
        ));
    }

    #[test]
    fn out_of_order_messages_rejected() {
        let mut server = ServerSession::new(Backend::Analytic, seeded_rng(3));
        assert!(server
            .handle(Message::MeasureInstruction {
                alphas: alloc::vec![0]
            })
            .is_err());
        assert!(server
            .handle(Message::Outcomes {
                b: BitString::zeros(1)
            })
            .is_err());
    }
}
