use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid act: {0}")]
    InvalidAct(String),
    #[error("alpha {0} is outside [0, 1]")]
    BadAlpha(f64),
    #[error("likelihood-ratio threshold {0} is outside [0, 1]")]
    BadThreshold(f64),
    #[error("conditioning event has zero probability under the prior")]
    ZeroLikelihood,
    #[error("event is not strict-nonnull (min probability {lo}, max probability {hi})")]
    NotStrictNonnull { lo: f64, hi: f64 },
    #[error("no alpha is mapped for the conditioning event")]
    MissingAlpha,
    #[error(
        "conditional value is not rationalizable by any RML alpha (undershoot {undershoot}, overshoot {overshoot})"
    )]
    InconsistentData { undershoot: f64, overshoot: f64 },
    #[error("alpha for this act is not unique")]
    NotUnique,
    #[error("invalid utility bounds: {0}")]
    BadBounds(String),
    #[error("no finite shrinking factor exists")]
    Unbounded,
    #[error("root is not bracketed: {0}")]
    RootBracketFailure(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("axiom {0} needs a bounded consequence space")]
    BoundedBoxRequired(String),
    #[error("invalid signal model: {0}")]
    BadModel(String),
    #[error("device parameter {0} is outside [0, 1]")]
    BadLambda(f64),
    #[error("invalid persuasion game: {0}")]
    BadGame(String),
    #[error("concavification needs exactly two states, got {0}")]
    NotTwoStates(usize),
}
