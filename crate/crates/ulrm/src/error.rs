use thiserror::Error;

#[derive(Debug, Error)]
pub enum UlrmError {
    #[error("unknown species '{0}' (known: Rb, Cs, H)")]
    UnknownSpecies(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("radial integration failed: {0}")]
    IntegrationFailure(String),

    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    #[error("near-degenerate pair (|dE| = {gap:.3e} au); use the diagonalization path")]
    Degeneracy { gap: f64 },

    #[error("eigensolver did not converge at grid index {index} (R = {r} au)")]
    EigenFailure { index: usize, r: f64 },

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("degenerate density map: threshold yields no region")]
    DegenerateMap,

    #[error("usage error: {0}")]
    Usage(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data table: {0}")]
    DataTable(String),
}

pub type Result<T> = std::result::Result<T, UlrmError>;

impl UlrmError {
    /// Process exit code contract: 1 usage, 2 compute, 3 regression.
    pub fn exit_code(&self) -> i32 {
        match self {
            UlrmError::Usage(_) | UlrmError::UnknownSpecies(_) => 1,
            _ => 2,
        }
    }
}
