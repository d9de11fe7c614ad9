use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// Root finding ran out of iterations; carries the last bracket.
    #[error("no convergence after {iterations} iterations, bracket [{lo}, {hi}]")]
    Convergence { iterations: usize, lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate sample: variance is zero, moment estimator requires variance > 0")]
    DegenerateSample,

    #[error(
        "infeasible moments: variance {variance} must be below mean*(1-mean) = {bound}; no Beta law has these moments"
    )]
    InfeasibleMoments {
        mean: f64,
        variance: f64,
        bound: f64,
    },

    #[error("mean {mean} on the boundary: moment estimator requires 0 < mean < 1")]
    BoundaryMean { mean: f64 },

    #[error("sample too small: need at least {needed} observations, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("correlation undefined: one of the sequences is constant")]
    UndefinedCorrelation,

    #[error("simulation gave up after {redraws} redraws of infeasible replicate samples (limit {limit})")]
    Simulation { redraws: u64, limit: u64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("tariff {tariff}: {source}")]
    Tariff {
        tariff: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    pub(crate) fn in_tariff(self, tariff: &str) -> Self {
        Error::Tariff {
            tariff: tariff.to_string(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
