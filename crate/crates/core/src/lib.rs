//! Construction and analysis of Bell-type inequalities on two qubits.
//!
//! * [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver.
//! * [`pauli`]: Pauli matrices, Bloch observables, θ-parametrized detector
//!   families for the CHSH operator `S` and the nine-setting operator `T`.
//! * [`polynomial`]: symbolic `Σ c·A_i B_j` quantities and their operators.
//! * [`lhv`]: hidden-variable bounds by strategy enumeration and
//!   realizability of correlation tables by linear programming.
//! * [`quantum`]: spectral bands, expectation values, reference curves.
//! * [`forge`]: rewriting commuting Pauli seeds into Bell polynomials and
//!   classifying the resulting test.
//!
//! Data-parallel loops use rayon when the `parallel` feature is on (the
//! default); see [`Execution`].

pub mod error;
pub mod exec;
pub mod forge;
pub mod interval;
pub mod lhv;
pub mod linalg;
pub mod pauli;
pub mod polynomial;
pub mod quantum;

pub mod cli;

pub use error::{Error, Result};
pub use exec::Execution;
pub use forge::{classify, forge, seed_spectrum_bound, CommutingSeed, ForgeReport, PairingScheme, TestType};
pub use interval::Interval;
pub use lhv::{enumerate_lhv, fine_feasible, fine_inequalities, CorrelationTable, LhvVerdict};
pub use linalg::{commutator, hermitian_eigen, hermitian_eigenvalues, kron, CMatrix, C64};
pub use pauli::{family_s, family_t, BlochObservable, ObservableFamily, Pauli, Side};
pub use polynomial::{assemble, chsh_polynomial, t_polynomial, BellPolynomial, Scenario, Term};
pub use quantum::{
    analytic_spectrum_s, analytic_spectrum_t, expectation, global_quantum_range, mixed_expectation,
    named_states, quantum_band, DensityMatrix, StateVector,
};
