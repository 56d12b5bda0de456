use thiserror::Error;

use crate::model::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),

    #[error("variable `{0}` has an empty frame")]
    EmptyFrame(String),

    #[error("variable `{variable}` lists state `{state}` twice")]
    DuplicateState { variable: String, state: String },

    #[error("valuation `{name}`: {reason}")]
    MalformedValuation { name: String, reason: String },

    #[error("precedence arc {0} -> {0} points at itself")]
    SelfArc(String),

    #[error("precedence is cyclic: {}", .cycle.join(" > "))]
    CyclicPrecedence { cycle: Vec<String> },

    #[error(
        "perfect recall violated: decision `{decision}` and random `{random}` are not ordered"
    )]
    PerfectRecallViolation { decision: String, random: String },

    #[error("problem has no utility valuation")]
    NoUtility,

    #[error("decision `{0}` is not in the domain of any utility valuation")]
    DecisionOutsideUtility(String),

    #[error("random variable `{0}` is not in the domain of any potential")]
    RandomOutsidePotentials(String),

    #[error("joint potential is not well defined: at [{configuration}] the random configurations sum to {sum}")]
    NotWellDefined { configuration: String, sum: f64 },

    #[error("potential `{name}` has value {value} outside [0, 1]")]
    PotentialOutOfRange { name: String, value: f64 },

    #[error("configuration domain is not a superset of the requested projection")]
    NotASubset,

    #[error("variable #{} is not in the valuation's domain", .0.0)]
    VariableNotInDomain(VarId),

    #[error("maximization needs a utility valuation, got a potential")]
    NotAUtilityValuation,

    #[error("decision `{0}` is borne only by potentials")]
    DecisionUnderPotentialOnly(String),

    #[error("no valuation bears on `{0}`")]
    NothingBearsOn(String),

    #[error("invalid deletion sequence: {0}")]
    InvalidDeletionSequence(String),

    #[error("strategy space has {size} strategies, over the cap of {cap}")]
    StrategySpaceTooLarge { size: f64, cap: u64 },

    #[error("solution table for `{0}` depends on a decision that cannot be resolved")]
    UnresolvableTable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
