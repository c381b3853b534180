use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index n must be a positive integer, got {0}")]
    InvalidIndex(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown family tag `{0}`")]
    UnknownFamily(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{0}` has no quantile function")]
    NoQuantile(String),

    #[error("model `{0}` has no density; the density route requires one")]
    DensityRequired(String),

    #[error("t = 0 is not accepted here; M(0) = 1 is answered directly")]
    ZeroT,

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("integrand is not finite at interior abscissa x = {x} (value {value})")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("MGF evaluation failed at t = {t}: {source}")]
    AtT {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("MGF evaluation failed for n = {n}: {source}")]
    AtIndex {
        n: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("invalid interval ({a}, {b}): need a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("member is not continuous: {0}")]
    Discontinuous(String),

    #[error("tabulated CDF, line {line}: {reason}")]
    Tabulated { line: usize, reason: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_t(self, t: f64) -> Error {
        Error::AtT { t, source: Box::new(self) }
    }

    pub(crate) fn at_index(self, n: u64) -> Error {
        Error::AtIndex { n, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
