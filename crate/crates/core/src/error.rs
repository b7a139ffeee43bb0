use std::io;
use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("integration diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    #[error("no real equilibria for rho = {rho} (< 1)")]
    NoRealEquilibria { rho: f64 },

    #[error("degenerate keystream: {0}")]
    DegenerateKeystream(&'static str),

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("image must be square, got {width}x{height}")]
    NonSquare { width: usize, height: usize },

    #[error("coefficient {value} at ({row}, {col}) is outside the log-embedding domain |c| >= 1")]
    EmbeddingDomain { row: usize, col: usize, value: f64 },

    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed image: {0}")]
    MalformedImage(String),

    #[error("malformed bundle: {0}")]
    MalformedBundle(String),

    #[error("bundle checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn file(path: &std::path::Path) -> impl FnOnce(io::Error) -> Self + '_ {
        move |source| Error::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
