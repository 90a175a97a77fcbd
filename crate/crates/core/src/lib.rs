//! Verification engine for quantized multi-particle Calogero-Painleve Hamiltonians and
//! their beta-integral (generalized Nagoya) solutions.

pub mod acceptance;
pub mod diffop;
pub mod error;
pub mod exact;
pub mod moments;
pub mod numeric;
pub mod params;
pub mod radial;
pub mod report;
pub mod task;
pub mod weyl;

pub use error::{Error, Result};
