//! Exact combinatorics behind the monotone central limit theorem.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`combinatorics`]: pair-partition maps, peaks, peakless enumeration
//!   (by filtering and by the painting construction), closed-form counts and
//!   partition-class predicates.
//! * [`moments`]: mixed-moment reduction under monotone independence, finite-N
//!   CLT moments and limit moments for the four basic independences.
//! * [`arcsine`]: the standard arcsine law and a quadrature cross-check of its
//!   moments.
//!
//! All counting and moment arithmetic is exact (`BigUint` / `BigRational`).

pub mod arcsine;
pub mod combinatorics;
mod error;
pub mod moments;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use num_rational::BigRational;
