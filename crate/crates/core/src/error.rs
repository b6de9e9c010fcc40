use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A clause or configuration referenced a spin outside `0..n`.
    IndexOutOfRange { index: usize, n: usize },
    /// A clause whose three indices are not pairwise distinct.
    DegenerateClause([usize; 3]),
    /// Spin count is unusable for the requested operation.
    InvalidSpinCount { n: usize, max: usize },
    /// Two objects that must agree on the spin count do not.
    DimensionMismatch { expected: usize, found: usize },
    /// The planted configuration violates a clause.
    PlantedViolated { clause: usize },
    /// Clause accumulation hit its budget before the ground pair became unique.
    GenerationFailed { n: usize, clauses: usize },
    /// A difficulty-filtered generation loop ran out of attempts.
    FilterExhausted { attempts: usize },
    /// Exhaustive enumeration is infeasible for this size.
    TooLargeToEnumerate { n: usize, max: usize },
    /// Invalid parameter value, described in the message.
    InvalidParameter(&'static str),
    /// Dropout requested over an empty eligible set.
    EmptyEligible,
    /// Cost functions must always carry every clause at full weight.
    DroppedCostTable,
    /// Circuit and cost disagree on the planted ground pair.
    GroundPairMismatch,
    /// Optimization produced NaN or infinity.
    NonFinite { epoch: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { index, n } => {
                write!(f, "spin index {index} out of range for {n} spins")
            }
            Error::DegenerateClause(c) => {
                write!(f, "clause {:?} does not have three distinct spins", c)
            }
            Error::InvalidSpinCount { n, max } => {
                write!(f, "spin count {n} is not in 1..={max}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} spins, found {found}")
            }
            Error::PlantedViolated { clause } => {
                write!(f, "planted configuration violates clause #{clause}")
            }
            Error::GenerationFailed { n, clauses } => {
                write!(f, "ground state still degenerate after {clauses} clauses on {n} spins")
            }
            Error::FilterExhausted { attempts } => {
                write!(f, "no instance met the difficulty thresholds in {attempts} attempts")
            }
            Error::TooLargeToEnumerate { n, max } => {
                write!(f, "{n} spins is too many to enumerate (limit {max})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyEligible => {
                write!(f, "no clause is eligible for dropout; use the `none` scheme or keep_fraction 1")
            }
            Error::DroppedCostTable => {
                write!(f, "cost table must contain every clause at weight 1")
            }
            Error::GroundPairMismatch => {
                write!(f, "circuit and cost instances have different planted ground states")
            }
            Error::NonFinite { epoch } => {
                write!(f, "non-finite cost or gradient at epoch {epoch}")
            }
        }
    }
}

impl core::error::Error for Error {}
