//! Exact generating functions for restricted lattice paths and the
//! bosonic and fermionic expressions for finitized Virasoro characters of
//! the minimal models M(p, p+1) and M(k, 2k±1).
//!
//! The polynomial core ([`qpoly`]) is generic over the coefficient ring;
//! everything built on top of it works with the exact integer aliases
//! defined here.

pub mod bosonic;
pub mod error;
pub mod fermionic;
pub mod halfint;
pub mod harness;
pub mod paths;
pub mod qpoly;
pub mod qspecial;
pub mod report;
pub mod transforms;

pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use qpoly::{Coefficient, LaurentPoly, QExponent, TruncatedSeries};
pub use report::CheckRecord;

/// Laurent polynomial with arbitrary-precision integer coefficients.
pub type QPoly = LaurentPoly<num_bigint::BigInt>;
/// Truncated series with arbitrary-precision integer coefficients.
pub type Series = TruncatedSeries<num_bigint::BigInt>;
/// Laurent polynomial with exact rational coefficients.
pub type RationalPoly = LaurentPoly<num_rational::BigRational>;
/// Laurent polynomial with machine-integer coefficients, for small cases
/// where overflow is known not to occur.
pub type SmallPoly = LaurentPoly<i64>;
