use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range inverted: lo = {lo} > hi = {hi}")]
    RangeInverted { lo: u64, hi: u64 },

    /// A configured ceiling (sieve height, segment width, classification bound) was exceeded.
    #[error("capacity exceeded: {what} = {value} > limit {limit}")]
    Capacity {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("pole of zeta at s = 1")]
    Pole,

    /// The requested tolerance cannot be met within the evaluation budget.
    #[error("precision error: {0}")]
    Precision(String),

    #[error("quadrature did not reach tolerance {tol:e} within {budget} subdivisions (estimated error {estimate:e})")]
    Quadrature {
        tol: f64,
        budget: usize,
        estimate: f64,
    },

    /// Log-space magnitudes exceeded the representable range; a smaller `M` is needed.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("refinement did not converge after {steps} steps (best t = {best_t}, sigma = {best_sigma}, |zeta| = {best_abs:e})")]
    Refinement {
        steps: usize,
        best_t: f64,
        best_sigma: f64,
        best_abs: f64,
    },

    #[error("box boundary passes within {abs:e} of a zero near s = {sigma} + {t}i")]
    BoundaryTooClose { sigma: f64, t: f64, abs: f64 },

    #[error("phase unwrapping ambiguous: {0}")]
    Unwrapping(String),

    #[error("degenerate least-squares design: {0}")]
    DegenerateFit(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
