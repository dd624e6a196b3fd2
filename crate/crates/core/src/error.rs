use thiserror::Error;

use crate::valfield::Valu;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("residue degree must be positive, got {0}")]
    BadDegree(u32),
    #[error("ramification index must be positive, got {0}")]
    BadRamification(u32),
    #[error("field of order {p}^{f} is too large")]
    TooLarge { p: u32, f: u32 },
    #[error("operands live over different fields")]
    ParamsMismatch,
    #[error("division by an element that is zero to its precision")]
    DivisionByZeroToPrecision,
    #[error("exponent {num}/{den} is not in the value group of ramification index {e}")]
    ExponentNotInValueGroup { num: i64, den: i64, e: u32 },
    #[error("coefficient {0} is out of range for the residue field")]
    BadCoefficient(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: i64, have: i64 },
    #[error("ends coincide")]
    CoincidentEnds,
    #[error("element is not parabolic")]
    NotParabolic,
    #[error("mirrors intersect")]
    MirrorsIntersect,
    #[error("duplicate points in hull input")]
    DuplicatePoints,
    #[error("matrix is singular to its precision")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("folding suspected beyond search radius {radius}")]
    SearchRadiusExceeded { radius: i64 },
    #[error("normalization precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("assertion ({item}) failed for word {word}")]
    AssertionFailed { item: u8, word: String },
    #[error("need at least {0} generators")]
    TooFewGenerators(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriterionError {
    #[error("genus (p-1)(r-1) = {0} is below 2")]
    GenusTooSmall(u64),
    #[error("branch points {0} and {1} coincide")]
    DuplicateBranchPoints(usize, usize),
    #[error("branch point {0} is at infinity")]
    InfinityBranchPoint(usize),
    #[error("lambda_{0} is zero")]
    ZeroLambda(usize),
    #[error("a and lambda have different lengths")]
    LengthMismatch,
    #[error("need at least two branch points")]
    TooFewBranchPoints,
    #[error("branch point {0} is sent to infinity")]
    BranchPointSentToInfinity(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoveringError {
    #[error("criterion violated for pair ({0}, {1})")]
    CriterionViolated(usize, usize),
    #[error("branch points {0} and {1} are equidistant minimizers")]
    MultipleMinimizers(usize, usize),
    #[error("radius {0} is not in the value group")]
    RadiusNotInValueGroup(Valu),
    #[error("not a covering: valuation tuple {tuple:?} is uncovered")]
    NotCovering { tuple: Vec<Valu> },
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("z lies on the truncated orbit of u")]
    PoleAtOrbitPoint,
    #[error("expansion radius meets the orbit of u")]
    RadiusViolation,
    #[error("configuration is not in normal form: {0}")]
    NotNormalForm(String),
    #[error("eta must have negative valuation")]
    NonNegativeEtaValuation,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
