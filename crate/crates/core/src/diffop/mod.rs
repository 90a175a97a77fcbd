//! Symmetric second-order differential operators in the eigenvalue variables.
mod affine;
mod builders;
mod op;
mod theorems;

pub use affine::*;
pub use builders::*;
pub use op::*;
pub use theorems::*;
