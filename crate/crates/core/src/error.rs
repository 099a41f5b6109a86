use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain length N = {0} (need N >= 1)")]
    InvalidChainLength(usize),

    #[error("sector k = {k} outside [0, {n}]")]
    InvalidSector { n: usize, k: usize },

    #[error("invalid site pair ({i}, {j}) for N = {n}: need 1 <= i < j <= N")]
    InvalidPair { n: usize, i: usize, j: usize },

    #[error("field B = {field} is not finite")]
    NonFiniteField { field: f64 },

    #[error("field B = {field} sits on the level crossing B_{k}; the ground state is degenerate")]
    DegenerateField { field: f64, k: usize },

    #[error("invalid basis configuration: {0}")]
    InvalidConfig(String),

    #[error("C({n}, {k}) = {size} configurations exceeds the cap of {cap}")]
    SizeCap { n: usize, k: usize, size: u128, cap: usize },

    #[error("lowest eigenvalue is degenerate (gap {gap:e})")]
    Degenerate { gap: f64 },

    #[error("density matrix rejected: {0}")]
    InvalidDensityMatrix(String),

    #[error("node {0} is isolated; its weight distribution is undefined")]
    IsolatedNode(usize),

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("series too short: length {len}, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("label propagation did not converge after {sweeps} sweeps ({} oscillating nodes)", oscillating.len())]
    NoConvergence { sweeps: usize, oscillating: Vec<usize> },

    #[error("found {found} transition peaks, {requested} requested")]
    TooFewPeaks { found: usize, requested: usize },

    #[error("non-positive value {0} in log-log fit")]
    NonPositive(f64),

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("oracle mismatch: worst deviation {worst:e} at N = {n}, k = {k}, pair ({i}, {j})")]
    OracleMismatch { worst: f64, n: usize, k: usize, i: usize, j: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable tag used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidChainLength(_) => "invalid_chain_length",
            Error::InvalidSector { .. } => "invalid_sector",
            Error::InvalidPair { .. } => "invalid_pair",
            Error::NonFiniteField { .. } => "non_finite_field",
            Error::DegenerateField { .. } => "degenerate_field",
            Error::InvalidConfig(_) => "invalid_config",
            Error::SizeCap { .. } => "size_cap",
            Error::Degenerate { .. } => "degenerate_eigenvalue",
            Error::InvalidDensityMatrix(_) => "invalid_density_matrix",
            Error::IsolatedNode(_) => "isolated_node",
            Error::EmptyDistribution => "empty_distribution",
            Error::TooShort { .. } => "too_short",
            Error::NoConvergence { .. } => "no_convergence",
            Error::TooFewPeaks { .. } => "too_few_peaks",
            Error::NonPositive(_) => "non_positive",
            Error::InvalidRational(_) => "invalid_rational",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::OracleMismatch { .. } => "oracle_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
