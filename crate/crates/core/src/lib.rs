//! Exact computational algebra for the quantum Fermat quintic threefold.
//!
//! The crate is organised bottom-up:
//!
//! - [`scalar`]: residues mod 5 and the cyclotomic field Q(ζ₅).
//! - [`qparams`]: quantum parameter matrices, the three group actions and the
//!   classification of generic parameters.
//! - [`index`]: the 625-element index set labelling the summands of the sheaf
//!   algebra, with weights and carries.
//! - [`structure`]: the multiplication table of the sheaf algebra, its
//!   associativity check, and the Frobenius pairing.
//! - [`rewrite`]: normal forms in the graded algebra `A`.
//! - [`linalg`]: exact sparse elimination over Q(ζ₅).
//! - [`fiber`]: 625-dimensional fibre algebras at points of `X ≅ P³`.
//! - [`hilbert`]: Hilbert polynomials and line-bundle cohomology on `P³`.

pub mod error;
pub mod fiber;
pub mod hilbert;
pub mod index;
pub mod linalg;
pub mod qparams;
pub mod rewrite;
pub mod scalar;
pub mod structure;

pub use error::{Error, Result};
