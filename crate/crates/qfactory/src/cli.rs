//! Command-line interface.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfactory_core::params::{constraint_report, gen_params, ConstraintConfig};
use qfactory_core::protocol::hardcore::{
    check_decomposition_exhaustive, check_decomposition_random, verify_identity_suite,
};
use qfactory_core::protocol::{generate, Backend, ClientSession, FamilyId, ThetaOutcome};
use qfactory_core::stats::domain_addition_probability;
use qfactory_core::{seeded_rng, seeded_stream};
use serde_json::json;

use crate::harness::{estimate_delta_parallel, run_honest, run_honest_tcp, summarize, RunConfig};
use crate::keyfile::KeyFile;
use crate::serve::{serve, SeedPolicy, ServeConfig};
use crate::session::{run_client, ServerPolicy};
use crate::transcript::{read_transcripts, write_transcripts, Seeds, Transcript};
use crate::transport::TcpTransport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABORT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("protocol aborted: {0}")]
    Abort(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Abort(_) => EXIT_ABORT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn internal<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Internal(e.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "qfactory",
    version,
    about = "Classical-client remote preparation of |+θ⟩ qubits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Reg2,
    ToyLinear,
    ToyPerm,
}

impl From<FamilyArg> for FamilyId {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Reg2 => FamilyId::Reg2,
            FamilyArg::ToyLinear => FamilyId::ToyLinear,
            FamilyArg::ToyPerm => FamilyId::ToyPerm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Statevector,
    Analytic,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Statevector => Backend::StateVector,
            BackendArg::Analytic => Backend::Analytic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransportArg {
    InProcess,
    Tcp,
}

#[derive(Clone, Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value = "reg2")]
    pub family: FamilyArg,
    /// Lattice dimension for reg2, register size for the toy families.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Permit the insecure toy families.
    #[arg(long)]
    pub allow_toy: bool,
}

impl FamilyArgs {
    fn checked(&self) -> Result<(FamilyId, usize), CliError> {
        let family = FamilyId::from(self.family);
        if family.is_toy() && !self.allow_toy {
            return Err(CliError::Usage(format!(
                "{family} is an insecure toy family; pass --allow-toy"
            )));
        }
        family
            .register_bits(self.n)
            .map_err(|e| CliError::Usage(format!("n = {}: {e}", self.n)))?;
        Ok((family, self.n))
    }
}

#[derive(Clone, Copy, Debug, Args)]
pub struct SeedArg {
    /// RNG seed; a random one is chosen and reported when absent.
    #[arg(long, env = "QFACTORY_SEED")]
    pub seed: Option<u64>,
}

impl SeedArg {
    fn resolve(self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the parameters for dimension n and check the six constraints.
    Params {
        n: usize,
        #[arg(long, default_value_t = 16.0)]
        poly_exponent: f64,
    },
    /// Generate a key pair file.
    Keygen {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
        /// Also write the public key alone here.
        #[arg(long)]
        public_out: Option<PathBuf>,
    },
    /// Honest client/server runs; prints one transcript per line.
    Run {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value = "analytic")]
        backend: BackendArg,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_enum, default_value = "in-process")]
        transport: TransportArg,
        /// Write transcripts here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the server over TCP.
    Serve {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        #[arg(long, value_enum, default_value = "analytic")]
        backend: BackendArg,
        /// Every session uses this seed; without it each gets fresh entropy.
        #[command(flatten)]
        seed: SeedArg,
        /// Derive a distinct stream per connection from --seed.
        #[arg(long)]
        per_connection: bool,
        #[arg(long)]
        max_sessions: Option<usize>,
        /// Append one JSON line per session here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run one client session against a server.
    Client {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        connect: String,
        #[command(flatten)]
        seed: SeedArg,
        /// Use this key pair instead of generating one.
        #[arg(long)]
        key: Option<PathBuf>,
        /// Append the transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Estimate the two-preimage rate of reg2.
    EstimateDelta {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the hard-core bit decomposition against the direct sum.
    VerifyHardcore {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        /// Exhaustive check up to this length.
        #[arg(long, default_value_t = 4)]
        exhaustive_max: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Property-check the modular identities and the decomposition.
    VerifyIdentities {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Summarise transcript files.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn print_json<W: Write>(out: &mut W, v: &serde_json::Value) -> Result<(), CliError> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).map_err(internal)?
    )
    .map_err(internal)
}

fn usage_from_core(e: qfactory_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Runs `cli`, writing results to `out`; the error carries the exit code.
pub fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<(), CliError> {
    match cli.command {
        Command::Params { n, poly_exponent } => {
            let params = gen_params(n).map_err(usage_from_core)?;
            let report = constraint_report(&params, &ConstraintConfig { poly_exponent });
            let all_pass = report.iter().all(|c| c.holds);
            print_json(
                out,
                &json!({ "params": params, "constraints": report, "all_pass": all_pass }),
            )
        }
        Command::Keygen {
            family,
            seed,
            out: path,
            public_out,
        } => {
            let (family, n) = family.checked()?;
            let seed = seed.resolve();
            let (key, td) = generate(family, n, &mut seeded_rng(seed)).map_err(internal)?;
            let file = KeyFile {
                key: key.clone(),
                trapdoor: Some(td),
            };
            file.write(&path).map_err(internal)?;
            if let Some(p) = public_out {
                KeyFile {
                    key,
                    trapdoor: None,
                }
                .write(&p)
                .map_err(internal)?;
            }
            let mut d = file.describe();
            d["seed"] = json!(seed);
            print_json(out, &d)
        }
        Command::Run {
            family,
            backend,
            runs,
            seed,
            transport,
            out: path,
        } => {
            let (family, n) = family.checked()?;
            let backend = Backend::from(backend);
            if backend == Backend::StateVector && family == FamilyId::Reg2 {
                return Err(CliError::Usage(
                    "the state-vector back-end needs a toy family".into(),
                ));
            }
            let config = RunConfig { family, n, backend };
            let seed = seed.resolve();
            let mut transcripts = Vec::with_capacity(runs as usize);
            for i in 0..runs {
                let s = seed.wrapping_add(i);
                let record = match transport {
                    TransportArg::InProcess => run_honest(config, s),
                    TransportArg::Tcp => run_honest_tcp(config, s),
                }
                .map_err(internal)?;
                transcripts.push(record.transcript);
            }
            match path {
                Some(p) => write_transcripts(&mut File::create(p).map_err(internal)?, &transcripts),
                None => write_transcripts(out, &transcripts),
            }
            .map_err(internal)?;
            let summary = summarize(&transcripts);
            log::info!("{}", serde_json::to_string(&summary).map_err(internal)?);
            Ok(())
        }
        Command::Serve {
            family,
            bind,
            backend,
            seed,
            per_connection,
            max_sessions,
            log,
        } => {
            let (family, n) = family.checked()?;
            let seeds = match (seed.seed, per_connection) {
                (Some(s), false) => SeedPolicy::Fixed(s),
                (Some(s), true) => SeedPolicy::PerConnection(s),
                (None, _) => SeedPolicy::Entropy,
            };
            let listener = TcpListener::bind(&bind)
                .map_err(|e| CliError::Usage(format!("cannot bind {bind}: {e}")))?;
            writeln!(
                out,
                "listening on {}",
                listener.local_addr().map_err(internal)?
            )
            .map_err(internal)?;
            out.flush().map_err(internal)?;
            let summary = serve(
                listener,
                ServeConfig {
                    policy: ServerPolicy { family, n },
                    backend: backend.into(),
                    seeds,
                    max_sessions,
                    log_path: log,
                },
            )
            .map_err(internal)?;
            print_json(out, &serde_json::to_value(summary).map_err(internal)?)
        }
        Command::Client {
            family,
            connect,
            seed,
            key,
            transcript,
        } => {
            let (family, n) = family.checked()?;
            let seed = seed.resolve();
            let mut rng = seeded_stream(seed, 0);
            let mut client = match key {
                None => ClientSession::new(family, n, &mut rng).map_err(internal)?,
                Some(p) => {
                    let file = KeyFile::read(&p)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                    let td = file.trapdoor.ok_or_else(|| {
                        CliError::Usage(format!("{} holds no trapdoor", p.display()))
                    })?;
                    if file.key.family() != family || file.key.size() != n {
                        return Err(CliError::Usage(
                            "key file does not match --family/--n".into(),
                        ));
                    }
                    let alphas = (0..file.key.register_bits() - 1)
                        .map(|_| rand::Rng::random_range(&mut rng, 0..8u8))
                        .collect();
                    ClientSession::with_parts(file.key, td, alphas).map_err(internal)?
                }
            };
            let mut t = TcpTransport::connect(&connect).map_err(internal)?;
            run_client(&mut t, &mut client, n).map_err(internal)?;
            let record =
                Transcript::from_client(&client, n, Seeds::standard(seed)).map_err(internal)?;
            if let Some(p) = transcript {
                let mut f = File::options()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(internal)?;
                write_transcripts(&mut f, std::slice::from_ref(&record)).map_err(internal)?;
            }
            match client.outcome() {
                Some(ThetaOutcome::Theta(r)) => print_json(
                    out,
                    &json!({ "theta_r": r.r(), "theta_radians": r.radians(), "seed": seed }),
                ),
                Some(ThetaOutcome::Abort(reason)) => {
                    print_json(out, &json!({ "abort": reason.as_str(), "seed": seed }))?;
                    Err(CliError::Abort(reason.to_string()))
                }
                None => Err(internal(anyhow::anyhow!(
                    "session ended without an outcome"
                ))),
            }
        }
        Command::EstimateDelta {
            n,
            trials,
            seed,
            threads,
        } => {
            let params = gen_params(n).map_err(usage_from_core)?;
            let seed = seed.resolve();
            let workers = threads
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
            let est =
                estimate_delta_parallel(&params, trials, seed, workers).map_err(usage_from_core)?;
            let closed_form = domain_addition_probability(params.m, params.mu, params.mu_prime);
            print_json(
                out,
                &json!({
                    "n": n,
                    "seed": seed,
                    "workers": workers,
                    "estimate": est,
                    "domain_addition_closed_form": closed_form,
                }),
            )
        }
        Command::VerifyHardcore {
            trials,
            n_max,
            exhaustive_max,
            seed,
        } => {
            let seed = seed.resolve();
            let mut report = check_decomposition_random(trials, n_max, &mut seeded_rng(seed))
                .map_err(usage_from_core)?;
            report
                .checks
                .push(check_decomposition_exhaustive(exhaustive_max).map_err(usage_from_core)?);
            print_json(
                out,
                &json!({ "seed": seed, "passed": report.passed(), "report": report }),
            )?;
            if report.passed() {
                Ok(())
            } else {
                Err(internal(anyhow::anyhow!(
                    "{} counterexamples",
                    report.total_failures()
                )))
            }
        }
        Command::VerifyIdentities {
            trials,
            n_max,
            seed,
        } => {
            let seed = seed.resolve();
            let report = verify_identity_suite(trials, n_max, &mut seeded_rng(seed))
                .map_err(usage_from_core)?;
            print_json(
                out,
                &json!({ "seed": seed, "passed": report.passed(), "report": report }),
            )?;
            if report.passed() {
                Ok(())
            } else {
                Err(internal(anyhow::anyhow!(
                    "{} counterexamples",
                    report.total_failures()
                )))
            }
        }
        Command::Stats { files } => {
            let mut all = Vec::new();
            for p in files {
                let f =
                    File::open(&p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                all.extend(read_transcripts(BufReader::new(f)).map_err(internal)?);
            }
            print_json(
                out,
                &serde_json::to_value(summarize(&all)).map_err(internal)?,
            )
        }
    }
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            e.exit_code()
        }
    }
}
