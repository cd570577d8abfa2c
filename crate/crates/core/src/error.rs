use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("groebner budget exhausted after {0} steps")]
    BudgetExhausted(u64),
    #[error("mark exceeds the cap of {0}")]
    MarkCapExceeded(u64),
    #[error("ideal is zero")]
    ZeroIdeal,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no global tangent direction in chart")]
    NoTangentDirection,
    #[error("no transversal tangent direction")]
    NoTransversalDirection,
    #[error("mark 0 summand rejected")]
    ZeroMark,
    #[error("ord_N = 0 in canonical mode; route to the monomial case")]
    CompanionOrderZero,
    #[error("center not in support")]
    CenterNotInSupport,
    #[error("center includes variable {0} twice")]
    DuplicateCenterVariable(usize),
    #[error("center not monomializable in chart")]
    NotMonomializable,
    #[error("depth cap {0} exceeded")]
    DepthExceeded(usize),
    #[error("stop marker never reached")]
    StopNotReached,
    #[error("keys over different ledgers")]
    LedgerMismatch,
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Resource exhaustion rather than bad input or a math failure.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted(_)
                | Error::MarkCapExceeded(_)
                | Error::DepthExceeded(_)
                | Error::StopNotReached
        )
    }
}
