//! Honest end-to-end runs, the parallel δ estimator and transcript
//! statistics.

use std::net::TcpListener;
use std::thread;

use qfactory_core::params::LweParams;
use qfactory_core::protocol::{
    AbortReason, Backend, ClientSession, FamilyId, ServerOutput, ServerSession,
};
use qfactory_core::quantum::fidelity;
use qfactory_core::stats::{chi_square_uniform, delta_trials, DeltaEstimate, DeltaTally};
use qfactory_core::zq::BitString;
use qfactory_core::{seeded_stream, SeededRng};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::session::{run_client, run_server, ServerPolicy, SessionError};
use crate::transcript::{Seeds, Transcript, TranscriptError, TranscriptOutcome};
use crate::transport::{channel_pair, TcpTransport, Transport};
use crate::wire::WireError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("client: {0}")]
    Client(SessionError),
    #[error("server: {0}")]
    Server(SessionError),
    #[error(transparent)]
    Core(#[from] qfactory_core::Error),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("server thread panicked")]
    Panicked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub family: FamilyId,
    pub n: usize,
    pub backend: Backend,
}

/// A finished run as both parties saw it.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub transcript: Transcript,
    pub server_b: Option<BitString>,
    pub server_output: Option<ServerOutput>,
}

/// Runs one session with the server on its own thread. The client uses
/// `seeded_stream(seed, 0)`, the server `seeded_stream(seed, 1)`.
pub fn run_session<C, S>(
    config: RunConfig,
    seed: u64,
    client_t: &mut C,
    server_t: &mut S,
) -> Result<RunRecord, HarnessError>
where
    C: Transport,
    S: Transport + Send,
{
    let seeds = Seeds::standard(seed);
    let mut client = ClientSession::new(
        config.family,
        config.n,
        &mut seeded_stream(seed, seeds.client_stream),
    )?;
    let policy = ServerPolicy {
        family: config.family,
        n: config.n,
    };
    let (client_result, server_result) = thread::scope(|scope| {
        let server_handle = scope.spawn(|| {
            let mut server: ServerSession<SeededRng> =
                ServerSession::new(config.backend, seeded_stream(seed, seeds.server_stream));
            run_server(server_t, &mut server, &policy).map(|()| server)
        });
        let client_result = run_client(client_t, &mut client, config.n);
        if client_result.is_err() {
            client_t.close();
        }
        (client_result, server_handle.join())
    });
    let server = server_result
        .map_err(|_| HarnessError::Panicked)?
        .map_err(HarnessError::Server)?;
    client_result.map_err(HarnessError::Client)?;
    let mut transcript = Transcript::from_client(&client, config.n, seeds)?;
    if let (Some(ServerOutput::Amplitudes(a)), Some(theta)) = (server.output(), client.theta()) {
        transcript.fidelity = Some(fidelity(a, theta));
    }
    Ok(RunRecord {
        transcript,
        server_b: server.b().cloned(),
        server_output: server.output(),
    })
}

/// One honest run over the in-process transport.
pub fn run_honest(config: RunConfig, seed: u64) -> Result<RunRecord, HarnessError> {
    let (mut c, mut s) = channel_pair();
    run_session(config, seed, &mut c, &mut s)
}

/// One honest run over TCP loopback.
pub fn run_honest_tcp(config: RunConfig, seed: u64) -> Result<RunRecord, HarnessError> {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(WireError::from)?;
    let addr = listener.local_addr().map_err(WireError::from)?;
    let mut c = TcpTransport::connect(addr)?;
    let (stream, _) = listener.accept().map_err(WireError::from)?;
    let mut s = TcpTransport::from_stream(stream)?;
    run_session(config, seed, &mut c, &mut s)
}

/// [`delta_trials`] split over `workers` threads, worker `w` drawing from
/// `seeded_stream(seed, w)`. The result depends on `workers`.
pub fn estimate_delta_parallel(
    params: &LweParams,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<DeltaEstimate, qfactory_core::Error> {
    if trials < 100 {
        return Err(qfactory_core::Error::InvalidArgument(
            "estimate_delta needs at least 100 trials",
        ));
    }
    let workers = workers.clamp(1, trials as usize);
    let tallies: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let share =
                    trials / workers as u64 + u64::from((w as u64) < trials % workers as u64);
                scope.spawn(move || {
                    delta_trials(params, share, false, &mut seeded_stream(seed, w as u64))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut total = DeltaTally::default();
    for t in tallies {
        total.merge(&t?);
    }
    Ok(total.estimate())
}

/// Upper tail of χ² with `dof` degrees of freedom.
pub fn chi_square_p_value(statistic: f64, dof: f64) -> f64 {
    ChiSquared::new(dof)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelitySummary {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub runs: usize,
    pub theta_histogram: [u64; 8],
    pub chi_square: f64,
    pub p_value: f64,
    pub aborts: usize,
    pub abort_rate: f64,
    pub two_preimage_rate: f64,
    pub fidelity: Option<FidelitySummary>,
}

pub fn summarize(transcripts: &[Transcript]) -> StatsReport {
    let mut hist = [0u64; 8];
    let mut aborts = 0;
    let mut single = 0;
    for t in transcripts {
        match t.outcome {
            TranscriptOutcome::ThetaR(r) => hist[usize::from(r % 8)] += 1,
            TranscriptOutcome::Abort { reason } => {
                aborts += 1;
                if reason != AbortReason::EqualLastBits {
                    single += 1;
                }
            }
        }
    }
    let chi_square = chi_square_uniform(&hist);
    let runs = transcripts.len();
    let rate = |k: usize| {
        if runs == 0 {
            0.0
        } else {
            k as f64 / runs as f64
        }
    };
    let fids: Vec<f64> = transcripts.iter().filter_map(|t| t.fidelity).collect();
    let fidelity = (!fids.is_empty()).then(|| FidelitySummary {
        count: fids.len(),
        min: fids.iter().copied().fold(f64::INFINITY, f64::min),
        mean: fids.iter().sum::<f64>() / fids.len() as f64,
    });
    StatsReport {
        runs,
        theta_histogram: hist,
        chi_square,
        p_value: chi_square_p_value(chi_square, 7.0),
        aborts,
        abort_rate: rate(aborts),
        two_preimage_rate: rate(runs - single),
        fidelity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfactory_core::params::gen_params;

    #[test]
    fn honest_run_is_deterministic() {
        let config = RunConfig {
            family: FamilyId::ToyLinear,
            n: 6,
            backend: Backend::StateVector,
        };
        let a = run_honest(config, 3).unwrap();
        let b = run_honest(config, 3).unwrap();
        assert_eq!(a.transcript.to_json_line(), b.transcript.to_json_line());
        assert!(a.transcript.fidelity.unwrap() >= 1.0 - 1e-9);
        assert_eq!(a.server_b.unwrap().as_slice(), &a.transcript.b.unwrap()[..]);
    }

    #[test]
    fn p_value_reference_points() {
        assert!((chi_square_p_value(0.0, 7.0) - 1.0).abs() < 1e-12);
        // χ²₇ median is about 6.346
        assert!((chi_square_p_value(6.345_811, 7.0) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn parallel_estimate_splits_work() {
        let params = gen_params(4).unwrap();
        let est = estimate_delta_parallel(&params, 101, 1, 4).unwrap();
        assert_eq!(est.tally.trials, 101);
        assert_eq!(est.tally.claw_violations, 0);
        assert!(estimate_delta_parallel(&params, 99, 1, 4).is_err());
    }

    #[test]
    fn summary_counts() {
        let t = |outcome, fidelity| Transcript {
            version: 1,
            family: "toy-linear".into(),
            n: 3,
            k_hash: String::new(),
            alpha: vec![],
            y_b64: None,
            b: None,
            outcome,
            seeds: Seeds::standard(0),
            fidelity,
        };
        let report = summarize(&[
            t(TranscriptOutcome::ThetaR(1), Some(1.0)),
            t(TranscriptOutcome::ThetaR(1), Some(0.5)),
            t(
                TranscriptOutcome::Abort {
                    reason: AbortReason::NoSecondPreimage,
                },
                None,
            ),
            t(TranscriptOutcome::ThetaR(3), None),
        ]);
        assert_eq!(report.theta_histogram, [0, 2, 0, 1, 0, 0, 0, 0]);
        assert_eq!(report.aborts, 1);
        assert!((report.two_preimage_rate - 0.75).abs() < 1e-12);
        let f = report.fidelity.unwrap();
        assert_eq!((f.count, f.min, f.mean), (2, 0.5, 0.75));
    }
}
