//! Deviation-sum uncertainty toolkit for qubits.
//!
//! The sum of standard deviations of N qubit observables obeys an exact
//! identity built from three state functionals: the mixedness M, the
//! pairwise commutator strength F, and the deviation covariance G. Dropping
//! the covariance term turns the identity into a lower bound that stays
//! strictly positive for non-commuting pairs, and reading the identity
//! backwards turns measured counts into a mixedness estimate.
//!
//! The crate provides the Bloch-vector state and observable types, the
//! closed-form moment layer together with a dense-trace twin that referees
//! it, the bound family and its comparison zoo, figure-style parameter
//! sweeps, a finite-shot mixedness estimator with bootstrap intervals, and
//! a randomized property verifier. The `urlab` binary fronts all of it.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod moments;
pub mod output;
pub mod pauli;
pub mod sweeps;
pub mod verify;

pub use error::{Error, Result};
pub use pauli::{BlochState, DenseMatrix2, EigenSystem, PauliObservable};
