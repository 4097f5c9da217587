//! Exact symbolic engine for genus-zero permutation-equivariant K-theoretic
//! FJRW wall-crossing of Fermat polynomials.
//!
//! The algebra is generic over an exact [`Scalar`] field; the aliases below
//! fix it to arbitrary-precision rationals.

pub mod codec;
pub mod error;
pub mod genfun;
pub mod ifunction;
pub mod linalg;
pub mod loopspace;
pub mod qalg;
pub mod scalar;
pub mod statespace;
pub mod wallcross;

pub use error::{Error, Result};
pub use scalar::{frac, Scalar};

/// Arbitrary-precision rational numbers.
pub type Rat = num_rational::BigRational;
/// Polynomials in `x = q^{1/d}` over [`Rat`].
pub type PolyX = qalg::Poly<Rat>;
/// Rational functions in `x = q^{1/d}` over [`Rat`].
pub type RationalFunctionQ = qalg::RatFunc<Rat>;
/// Loop-space elements over [`Rat`].
pub type KElem = loopspace::KElement<Rat>;
/// Truncated input series over [`Rat`].
pub type Series = genfun::TSeries<Rat>;
/// Solved tail coefficients over [`Rat`].
pub type Tail = wallcross::TailCoefficient<Rat>;
