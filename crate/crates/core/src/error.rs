use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode index {index} out of range for a registry of {len} modes")]
    InvalidMode { index: usize, len: usize },

    #[error("states live on different mode registries")]
    RegistryMismatch,

    #[error("mode groups do not partition the registry: {0}")]
    NotAPartition(String),

    #[error("invalid factor selection: {0}")]
    InvalidFactors(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("cutoff schedule exhausted at n_max = {n_max} without convergence (last change {delta:e})")]
    NotConverged { n_max: u32, delta: f64 },

    #[error("unknown figure preset '{0}'")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
