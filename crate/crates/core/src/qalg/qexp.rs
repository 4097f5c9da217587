//! Exponents of `q` in `(1/d)ℤ` and the K-theoretic Euler class of character sums.

use std::fmt;

use num_bigint::BigInt;

use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rat;

/// `q^{steps/d}`, i.e. `x^{steps}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QExp {
    pub steps: i64,
    pub d: u32,
}

impl QExp {
    pub fn new(steps: i64, d: u32) -> Self {
        QExp { steps, d }
    }

    pub fn from_rat(value: &Rat, d: u32) -> Result<Self> {
        let scaled = value * Rat::from_integer(BigInt::from(d));
        if !scaled.is_integer() {
            return Err(Error::ExponentNotInLattice(value.to_string()));
        }
        let steps = i64::try_from(scaled.to_integer())
            .map_err(|_| Error::ExponentNotInLattice(value.to_string()))?;
        Ok(QExp { steps, d })
    }

    pub fn value(&self) -> Rat {
        Rat::new(self.steps.into(), self.d.into())
    }

    pub fn neg(&self) -> Self {
        QExp {
            steps: -self.steps,
            d: self.d,
        }
    }

    /// `1 − q^{self}` as a rational function in `x`.
    pub fn one_minus<T: Scalar>(&self) -> RatFunc<T> {
        &RatFunc::one() - &RatFunc::monomial(T::one(), self.steps)
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// `e^K(V) = Σ_k (−1)^k Λ^k V*` for `V = ⊕ χ_i` with `χ_i = q^{b_i}`, i.e.
/// `∏ (1 − q^{−b_i})`.
///
/// To get `∏ (1 − q^b)` for the dual bundle, pass the negated weights.
pub fn euler_class<T: Scalar>(characters: &[QExp]) -> RatFunc<T> {
    let mut num = Poly::<T>::one();
    let mut shift = 0i64;
    for ch in characters {
        let e = -ch.steps;
        if e >= 0 {
            num = &num * &Poly::one_minus_x_pow(e as usize);
        } else {
            // 1 - x^{-k} = (x^k - 1)/x^k
            let k = (-e) as usize;
            num = &num * &(-Poly::one_minus_x_pow(k));
            shift -= k as i64;
        }
    }
    if num.is_zero() {
        return RatFunc::zero();
    }
    RatFunc::laurent(num, shift)
}

/// Product `∏ (1 − q^b)` over a list of exponents.
pub fn one_minus_product<T: Scalar>(exps: &[QExp]) -> RatFunc<T> {
    let negated: Vec<QExp> = exps.iter().map(QExp::neg).collect();
    euler_class(&negated)
}
