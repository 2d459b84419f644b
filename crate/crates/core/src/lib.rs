//! Generalized power series solutions of polynomial q-difference equations.
//!
//! The crate covers the whole pipeline: parsing an equation, reducing it
//! along a user-supplied initial part, solving the multivariate coefficient
//! recurrence and its majorant, scanning the small divisors that govern
//! convergence, and checking the estimate chain behind the convergence proof.

pub mod equation;
pub mod fixtures;
pub mod divisors;
pub mod error;
pub mod estimates;
pub mod numeric;
pub mod reduction;
pub mod series;
pub mod solver;

pub use error::{Error, Result};
