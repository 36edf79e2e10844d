//! Exact scalar fields and dense linear algebra.

mod mat;
mod poly;
mod scalar;
mod subspace;

pub use mat::{dot, Echelon, LinalgError, Mat};
pub use poly::{Poly, SymScalar};
pub use scalar::{parse_scalar_list, Field, ParseScalarError, Scalar};
pub use subspace::{combine, unit, Subspace, SubspaceError};
