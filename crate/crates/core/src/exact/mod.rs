//! Exact arithmetic: rationals, sparse multivariate polynomials, rational functions.

pub mod linsolve;
pub mod mpoly;
pub mod rat;
pub mod ratfun;

pub use linsolve::{solve, LinearSolution};
pub use mpoly::{mpoly_arith, ArithOp, Exp, MPoly, Registry};
pub use rat::{fmt_rat, int, is_integer, is_positive, parse_rat, rat, rat_pow, rat_to_f64, Rat};
pub use ratfun::{ratfun_equal, RatFun};
