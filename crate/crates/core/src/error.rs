use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    EigenNoConvergence { iterations: usize },

    #[error("matrix exponential overflowed (t = {t})")]
    ExpOverflow { t: f64 },

    #[error("spectrum is not Hurwitz: eigenvalue with real part {alpha} >= {bound}")]
    NotHurwitz { alpha: f64, bound: f64 },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("basis function {function} vanishes at every constraint point")]
    DegenerateBasis { function: String },

    #[error("exchange did not converge in {iterations} iterations; last bracket [{lower}, {upper}]")]
    ExchangeNoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("could not bracket the cut-tail point: {0}")]
    Bracketing(String),

    #[error("degenerate point set: {0}")]
    DegenerateGeometry(String),

    #[error("horizon {horizon} too short: trajectory norm there is {ratio:e} of the initial norm")]
    HorizonTooShort { horizon: f64, ratio: f64 },
}
