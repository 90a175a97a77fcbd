//! Radial reduction of matrix Hamiltonians to eigenvalue operators.
mod hamiltonians;
mod matrix;
mod verify;

pub use hamiltonians::*;
pub use matrix::*;
pub use verify::*;
