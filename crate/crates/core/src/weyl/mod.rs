//! Noncommutative polynomials over matrix-entry generators with the canonical
//! commutation relation, and the operator identities built on them.

mod hamiltonian;
mod lax;
mod ncpoly;

pub use hamiltonian::{
    classical_hamiltonian, eom_a, eom_b, hamiltonian_prefactor, quantum_hamiltonian, specialize, theta_sum,
    trace_difference, trace_identities_check, verify_eom_pvi, worked_example_check, EOM_CONVENTION,
};
pub use lax::{time_derivative, verify_zero_curvature_pvi, LaxPairPVI};
pub use ncpoly::{
    anticommutator, cconst, check_size, cint, classical_bracket, commutator, commutator_matrix, cvar, fmt_word,
    matrix_combination, matrix_word, trace_combination, trace_word, weyl_registry, Letter, Mode, NCMatrix, NCPoly,
    Word, MAX_N,
};
