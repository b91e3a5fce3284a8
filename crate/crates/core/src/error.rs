use thiserror::Error;

use crate::map::MonotoneViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),

    #[error("element index {index} out of range for a space with {size} elements")]
    IndexOutOfRange { index: usize, size: usize },

    /// The reflexive-transitive closure of the given relations is not antisymmetric.
    #[error("relations form a cycle through `{0}` and `{1}`; the space would not be T0")]
    CycleDetected(String, String),

    #[error("relation table is not a partial order: {0}")]
    NotAPartialOrder(String),

    #[error("map does not match its domain/codomain: {0}")]
    DomainMismatch(String),

    #[error("exhaustive monotonicity check refused: codomain has {size} elements (bound {bound})")]
    CodomainTooLarge { size: usize, bound: usize },

    #[error("operation requires a nonempty space")]
    EmptySpace,

    #[error("({0}, {1}) is not a Hasse edge (expected the first element to cover the second)")]
    NotAHasseEdge(String, String),

    #[error("map is not surjective: `{0}` has an empty fiber")]
    NotSurjective(String),

    #[error("map is not continuous: `{lower}` <= `{upper}` but their images are not ordered")]
    NotContinuous { lower: String, upper: String },

    #[error("map is not monotone: {0}")]
    NotMonotone(MonotoneViolation),

    #[error("fiber over `{point}` of the discrete part is not an antichain: `{lower}` < `{upper}`")]
    DiscreteFiberViolation {
        point: String,
        lower: String,
        upper: String,
    },

    #[error("integer overflow in exact arithmetic")]
    OverflowDetected,

    #[error("order complex exceeds the simplex budget of {budget}")]
    SimplexBudgetExceeded { budget: usize },

    #[error("{0}")]
    Io(String),

    #[error("sweep size {requested} exceeds the limit {limit}")]
    SweepTooLarge { requested: usize, limit: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
