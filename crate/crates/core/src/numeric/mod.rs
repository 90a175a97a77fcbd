//! High-precision quadrature of the beta-integral wave functions.

pub mod cfloat;
pub mod oracle;
pub mod pde;
pub mod phi;
pub mod rules;
pub mod weight;

pub use cfloat::*;
pub use oracle::*;
pub use pde::*;
pub use phi::*;
pub use rules::*;
pub use weight::*;
