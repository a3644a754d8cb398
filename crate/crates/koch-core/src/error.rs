use std::fmt;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Rational construction with a zero denominator.
    ZeroDenominator,
    /// A point fell outside the unit interval.
    OutsideUnitInterval,
    /// The height parameter is outside the range an operation supports.
    LambdaOutOfRange { lambda: f64, lo: f64, hi: f64 },
    /// A symbolic point with an empty period was passed where the periodic
    /// tail is required.
    EmptyPeriod,
    /// A tolerance that must be positive was not.
    InvalidTolerance { tol: f64 },
    /// An exponent outside the open interval an inversion can handle.
    AlphaOutOfRange { alpha: f64, lo: f64, hi: f64 },
    /// Frequency vector entries are negative or do not sum to one.
    InvalidFrequencyVector { sum: f64 },
    /// Interval endpoints in the wrong order or outside [0, 1].
    InvalidInterval,
    /// Requested polyline generation above the configured cap.
    GenerationCapExceeded { requested: u32, cap: u32 },
    /// Requested triadic level above the configured cap.
    LevelCapExceeded { requested: u32, cap: u32 },
    /// An orbit did not cycle within the configured depth.
    OrbitUndetermined { max_depth: usize },
    /// A certified evaluation could not reach the requested tolerance.
    ToleranceUnreachable { depth: usize, bound: f64 },
}

/// Coarse classification used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: caller can fix the arguments.
    Validation,
    /// A configured cap was hit.
    Resource,
    /// An iteration failed to converge.
    Convergence,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            ZeroDenominator
            | OutsideUnitInterval
            | LambdaOutOfRange { .. }
            | EmptyPeriod
            | InvalidTolerance { .. }
            | AlphaOutOfRange { .. }
            | InvalidFrequencyVector { .. }
            | InvalidInterval => ErrorClass::Validation,
            GenerationCapExceeded { .. } | LevelCapExceeded { .. } | OrbitUndetermined { .. } => {
                ErrorClass::Resource
            }
            ToleranceUnreachable { .. } => ErrorClass::Convergence,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            ZeroDenominator => write!(f, "rational with zero denominator"),
            OutsideUnitInterval => write!(f, "point outside [0, 1]"),
            LambdaOutOfRange { lambda, lo, hi } => {
                write!(f, "lambda {lambda} outside ({lo}, {hi})")
            }
            EmptyPeriod => write!(f, "symbolic point has an empty period"),
            InvalidTolerance { tol } => write!(f, "tolerance must be positive, got {tol}"),
            AlphaOutOfRange { alpha, lo, hi } => {
                write!(f, "alpha {alpha} outside the open interval ({lo}, {hi})")
            }
            InvalidFrequencyVector { sum } => {
                write!(f, "frequencies must be a probability vector, sum {sum}")
            }
            InvalidInterval => write!(f, "need 0 <= a < b <= 1"),
            GenerationCapExceeded { requested, cap } => {
                write!(f, "generation {requested} above cap {cap}")
            }
            LevelCapExceeded { requested, cap } => {
                write!(f, "level {requested} above cap {cap}")
            }
            OrbitUndetermined { max_depth } => {
                write!(f, "orbit did not cycle within {max_depth} steps")
            }
            ToleranceUnreachable { depth, bound } => {
                write!(f, "certified bound stuck at {bound} after {depth} steps")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
