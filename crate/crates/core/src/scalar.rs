//! The exact scalar field the algebra is generic over.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// An exact field of characteristic zero.
///
/// Every polynomial, rational function and series in this crate is generic
/// over a `Scalar`. Pole detection relies on exact gcds, so only exact
/// fields implement it: `BigRational` (the default, see [`crate::Rat`]) and
/// the fixed-width `Ratio<i64>` / `Ratio<i128>`, which panic on overflow.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_i64(n: i64) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// `Some(n)` when the value is an integer fitting in `i64`.
    fn to_i64(&self) -> Option<i64>;

    fn parse_str(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty, $conv:expr, $back:expr) => {
        impl Scalar for Ratio<$int> {
            fn from_i64(n: i64) -> Self {
                Ratio::from_integer($conv(n))
            }

            fn to_i64(&self) -> Option<i64> {
                if self.is_integer() {
                    $back(self.numer())
                } else {
                    None
                }
            }
        }
    };
}

impl_ratio_scalar!(BigInt, BigInt::from, |n: &BigInt| i64::try_from(n).ok());
impl_ratio_scalar!(i64, |n| n, |n: &i64| Some(*n));
impl_ratio_scalar!(i128, |n| n as i128, |n: &i128| i64::try_from(*n).ok());

/// Fractional part `⟨x⟩ ∈ [0, 1)`; negative inputs wrap to the positive side.
pub fn frac<I: Integer + Clone>(x: &Ratio<I>) -> Ratio<I> {
    x - x.floor()
}

/// `⌈x⌉` for a rational.
pub fn ceil<I: Integer + Clone>(x: &Ratio<I>) -> Ratio<I> {
    x.ceil()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn r(n: i64, d: i64) -> Rat {
        Rat::from_frac(n, d)
    }

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&r(7, 5)), r(2, 5));
        assert_eq!(frac(&r(-1, 3)), r(2, 3));
        assert_eq!(frac(&r(3, 1)), r(0, 1));
    }

    #[test]
    fn rat_strings() {
        assert_eq!(r(6, 4).to_string(), "3/2");
        assert_eq!(r(-3, 1).to_string(), "-3");
        assert_eq!(Rat::parse_str("-2/6"), Some(r(-1, 3)));
        assert_eq!(r(10, 2).to_i64(), Some(5));
        assert_eq!(r(1, 2).to_i64(), None);
    }

    #[test]
    fn fixed_width_fields() {
        let a = Ratio::<i64>::from_frac(1, 3);
        let b = Ratio::<i128>::from_frac(2, 3);
        assert_eq!((a + Ratio::<i64>::from_i64(1)).to_string(), "4/3");
        assert_eq!(b.to_i64(), None);
    }
}
