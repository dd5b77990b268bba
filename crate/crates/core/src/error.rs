use thiserror::Error;

/// Errors raised by the kernel operations.
///
/// Variants fall in two groups: precondition violations on well-formed input
/// (positivity, classical-event, admissibility, chain structure) and
/// malformed input. [`Error::is_precondition`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval endpoints out of order: lo {lo} > hi {hi}")]
    OrderViolation { lo: String, hi: String },
    #[error("value {0} lies outside [0,1]")]
    RangeViolation(String),
    #[error("degenerate denominator in Bayes kernel{0}")]
    DegenerateDenominator(String),
    #[error("comparison undecidable within the error bound: {0}")]
    Indeterminate(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("positivity violated: {0}")]
    PositivityViolation(String),
    #[error("classical-event condition violated: {0}")]
    CeViolation(String),
    #[error("event components are not disjoint")]
    NotDisjoint,
    #[error("no upper bound: joined components intersect")]
    NoUpperBound,
    #[error("closed pair does not cover the space")]
    CoveringViolation,
    #[error("continued fraction did not converge for I_x({alpha}, {beta}) at x = {x}")]
    NonConvergence { alpha: f64, beta: f64, x: f64 },
    #[error("admissible set is empty: {0}")]
    EmptyAdmissibleSet(String),
    #[error("row {0} admits no stochastic vector")]
    EmptyRow(usize),
    #[error("transition matrix is reducible")]
    Reducible,
    #[error("transition matrix is periodic (period {0})")]
    Periodic(u64),
    #[error("two-state chain is degenerate: {0}")]
    DegenerateChain(String),
    #[error("every vertex matrix is reducible or periodic")]
    AllVerticesDegenerate,
    #[error("rule schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
}

impl Error {
    /// True for violations of a mathematical precondition on otherwise
    /// well-formed input; false for malformed input.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::SchemaMismatch(_)
        )
    }

    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
