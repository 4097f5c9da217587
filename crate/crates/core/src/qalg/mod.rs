//! Exact arithmetic in `q` with exponents in `(1/d)ℤ`.
//!
//! Everything is computed in the integer variable `x = q^{1/d}`. Roots of
//! unity never appear as numbers: pole bookkeeping goes through the
//! cyclotomic factors `Φ_n(x)` and root-of-unity sums through power-sum
//! orthogonality.

pub mod cyclotomic;
pub mod poly;
pub mod qexp;
pub mod ratfunc;
pub mod roots;

pub use cyclotomic::{cyclotomic, divisors, totient};
pub use poly::Poly;
pub use qexp::{euler_class, one_minus_product, QExp};
pub use ratfunc::{BlockPole, CycloBlock, DenFactorization, PartialFractions, PoleOrders, RatFunc};
pub use roots::{aggregate_node_factor, node_factor_from_ghosts, roots_of_unity_power_sum, verify_ghost_identity};
