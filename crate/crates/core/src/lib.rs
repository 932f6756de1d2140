//! Trade-off between the operation fidelity F and the estimation fidelity G
//! for finite ensembles of identically prepared qubits.
//!
//! The achievable (F, G) region for an ensemble of N qubits is bounded by a
//! family of curves indexed by a stripe shift k. Each curve is obtained by
//! sweeping a Lagrange multiplier through the extremal eigenvectors of a
//! symmetric tridiagonal pencil built on the fully symmetric spin-j subspace
//! (j = N/2). The [`verify`] module closes the loop: it reconstructs complete
//! quantum operations from the optimizers and re-derives both fidelities by
//! Monte-Carlo integration of their raw definitions.
//!
//! Module map:
//! - [`half`]: exact half-integer quantum numbers.
//! - [`matrix`]: dense complex matrices (plumbing for operators and rotations).
//! - [`spin`]: spin-j operators, rotation matrices, Haar sampling, and the
//!   angular-momentum decomposition combinatorics.
//! - [`stripe`]: stripe vectors, their quadratic forms, and the tridiagonal
//!   matrices they diagonalize.
//! - [`eigen`]: Sturm-sequence tridiagonal eigensolver and the dense Jacobi
//!   oracle.
//! - [`curve`]: Lagrange sweeps, fidelity mapping, and the envelope over k.
//! - [`verify`]: brute-force and Monte-Carlo checks against the raw fidelity
//!   definitions.

pub mod curve;
pub mod eigen;
pub mod half;
pub mod matrix;
pub mod spin;
pub mod stripe;
pub mod verify;

mod error;

pub use error::{Error, Result};
