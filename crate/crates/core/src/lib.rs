//! Twisted Bethe equations for periodic XXX/XXZ spin chains: solving,
//! classifying singular solutions, twist expansions, the algebraic Bethe
//! ansatz and an exact-diagonalization cross-check.

pub mod aba;
pub mod census;
pub mod ed;
pub mod error;
pub mod io;
pub mod model;
pub mod numeric;
pub mod solver;
pub mod twist;

pub use error::{BetheError, Result};
pub use model::{BetheSystem, ClassificationResult, ModelSpec, RootSet, SingularDecomposition, SolutionKind, Spin};
pub use numeric::{Cx, Mp, Real, Tolerances};
