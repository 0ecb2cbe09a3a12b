//! Truncated q-deformed Fock spaces and exact checks of Wick-product
//! identities.
//!
//! Scalars are either exact polynomials in a formal `q` ([`QPolynomial`]) or
//! `f64` at a fixed numerical `q`. Most routines are generic over [`Scalar`].

pub mod analysis;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod fock;
pub mod identities;
pub mod linalg;
pub mod render;
pub mod scalars;
pub mod wick;

pub use error::{QfockError, Result};
pub use scalars::{QPolynomial, Scalar, ScalarMode};
