//! Exact symbolic calculus for Campana C-pairs.
//!
//! Q-divisors with standard coefficients, monomial covers of affine charts,
//! adapted tensor sheaves as pole-allowance data, morphism criteria, quotient
//! pairs, Chern classes in a truncated graded ring, and orbifold curve
//! invariants. All arithmetic is exact.

pub mod adapted;
pub mod chern;
pub mod covers;
pub mod curves;
pub mod divisor;
pub mod error;
pub mod ext;
pub mod geometry;
pub mod morphisms;
pub mod par;
pub mod sweep;

pub use divisor::{CPairBoundary, PrimeDivisor, QDivisor};
pub use error::{Error, Result};
pub use ext::{q, qi, ExtRational, Multiplicity, Q};
pub use geometry::{Chart, DivisorialMorphism, MonomialCover, PullBack};
pub use par::Execution;
