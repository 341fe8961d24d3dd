use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("modulus mismatch: 2^{left} vs 2^{right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("unsupported modulus 2^{0} (need 1 <= k <= 128)")]
    InvalidModulus(u32),

    #[error("infinity norm {actual} exceeds bound {bound}")]
    NormExceeded { bound: u128, actual: u128 },

    #[error("gadget decoding failed: residual outside the correctable band")]
    GadgetDecode,

    #[error("recovered error has euclidean norm {norm:.3e} > r_max {r_max:.3e}")]
    ErrorTooLarge { norm: f64, r_max: f64 },

    #[error("inversion failed: {0}")]
    InversionFailed(&'static str),

    #[error("modulus exponent k = {k} for n = {n} exceeds the 127-bit limit")]
    ModulusOverflow { n: usize, k: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed encoding: {0}")]
    Encoding(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("register of {requested} qubits exceeds the simulator limit of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("measurement sampled a zero-probability branch")]
    ZeroProbabilityBranch,

    #[error("protocol violation: {0}")]
    Protocol(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
