//! Exact moment calculus for the beta-integral wave functions at integer `ħ`.

mod expr;
mod master;
mod pde;
mod phi;
mod system;

pub use expr::*;
pub use master::*;
pub use pde::*;
pub use phi::*;
pub use system::*;
