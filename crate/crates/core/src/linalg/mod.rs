//! Sparse linear algebra used by the operators: CSR storage, deflated CG,
//! envelope LDL^T and a shift-invert eigensolver.

pub mod cg;
pub mod eigen;
pub mod ldlt;
pub mod sparse;

pub use cg::{CgOptions, CgOutcome};
pub use eigen::{EigenOptions, EigenPairs};
pub use ldlt::EnvelopeLdlt;
pub use sparse::{dot, norm2, weighted_dot, weighted_gram, CsrMatrix, Incidence};
