use alloc::string::String;

/// Failure modes shared by every module of the crate.
///
/// The `Display` strings are stable: the command-line driver prints them
/// verbatim after an `ERROR:` prefix and the golden tests match on them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("field mismatch")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    Singular,
    #[error("classification unstable")]
    ClassificationUnstable,
    #[error("no diagonal form")]
    NoDiagonalForm,
    #[error("quadrature failed: {0}")]
    QuadratureFailed(String),
    #[error("inadmissible h: {0}")]
    InadmissibleH(String),
    #[error("outside admissible region")]
    OutsideAdmissibleRegion,
    #[error("duplicate element at {0}")]
    Duplicate(String),
    #[error("not unimodular: {0}")]
    NotUnimodular(String),
    #[error("alpha in Gamma")]
    AlphaInGamma,
    #[error("closure violation: {0}")]
    ClosureViolation(String),
    #[error("bad basis: {0}")]
    BadBasis(String),
    #[error("radius insufficient: {0}")]
    RadiusInsufficient(String),
    #[error("truncation unsound: {0}")]
    TruncationUnsound(String),
    #[error("parabolic in double coset — dataset invalid")]
    ParabolicInDoubleCoset,
    #[error("radius insufficient for T0")]
    RadiusInsufficientForT0,
    #[error("elliptic order exceeds cap {0}")]
    EllipticOrderCap(u32),
    #[error("degenerate elliptic")]
    DegenerateElliptic,
    #[error("oracle quadrature failed: {0}")]
    OracleQuadratureFailed(String),
    #[error("norm gap violated — dataset invalid")]
    NormGapViolated,
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("outside convergence region")]
    OutsideConvergenceRegion,
    #[error("not a single-group comparison")]
    NotSingleGroupComparison,
    #[error("missing word for {0}")]
    MissingWord(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input data).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ClassificationUnstable
                | Error::QuadratureFailed(_)
                | Error::OracleQuadratureFailed(_)
                | Error::Singular
                | Error::DivisionByZero
                | Error::EllipticOrderCap(_)
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
