use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {0} is degenerate")]
    DegenerateFace(usize),
    #[error("edge ({0}, {1}) borders more than two faces")]
    NonManifold(usize, usize),
    #[error("mesh admits no consistent orientation")]
    NonOrientable,
    #[error("mesh has a boundary; a closed mesh is required")]
    NotClosed,
    #[error("mesh has {0} connected components")]
    Disconnected(usize),
    #[error("one-form is not closed: max |d1 w| = {0:e}")]
    NotClosedForm(f64),
    #[error("edge loop is open or uses a non-edge at position {0}")]
    OpenLoop(usize),
    #[error("local frame at vertex {0} is degenerate")]
    FrameDegenerate(usize),
    #[error("weight at vertex {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("eigensolver stalled: worst residual {0:e}")]
    EigensolverStall(f64),
    #[error("symmetric factorization failed at pivot {0}")]
    FactorizationFailure(usize),
    #[error("no sign change of the closure functional in the shooting bracket")]
    NoSignChange,
    #[error("profile integration failed: radius reached {0:e}")]
    StepFailure(f64),
    #[error("profile radius is not positive at point {0}")]
    SelfIntersection(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
