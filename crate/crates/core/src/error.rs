use thiserror::Error;

/// Errors produced by model construction, estimation, fitting, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Rate parameters violate their invariants (negative, non-finite, or a
    /// degenerate marginal).
    #[error("invalid rates: {0}")]
    InvalidRates(String),

    /// Requested moments cannot be produced by any valid rate triple.
    #[error("infeasible moments: {0}")]
    InfeasibleMoments(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An estimator formula hit a zero denominator; `term` names the
    /// offending expression.
    #[error("singular denominator in {term}")]
    SingularDenominator { term: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The quadratic form behind the weight optimization is not positive
    /// definite, so the optimum weights are undefined.
    #[error("degenerate quadratic form: {0}")]
    DegenerateForm(String),

    /// A side-by-side comparison value is undefined for these inputs.
    #[error("not comparable: {0}")]
    NotComparable(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("unknown member id: {0}")]
    UnknownMember(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
