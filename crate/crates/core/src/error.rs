use thiserror::Error;

/// Errors raised by the numerical routines and the solve pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("series did not converge within {max_terms} terms ({what})")]
    NonConvergence {
        what: &'static str,
        max_terms: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("singular spectral parameter: lambda^2 = {0} equals -(pi n)^2")]
    SingularSpectralParameter(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("kernel integral did not decay after {panels} panels")]
    NonDecay { panels: usize },

    #[error("lattice sum truncated too early: |m| = {m} term is {term:e}")]
    InsufficientTerms { m: usize, term: f64 },

    #[error("zero pivot at row {0} of the triangular system")]
    ZeroPivot(usize),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
