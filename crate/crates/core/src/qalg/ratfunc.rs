//! Reduced rational functions in `x = q^{1/d}` with cyclotomic pole bookkeeping.

use std::any::{Any, TypeId};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::cyclotomic::{cyclotomic, totient};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rat;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
///
/// The cyclotomic factorization of the denominator is computed on first use
/// and cached.
#[derive(Clone)]
pub struct RatFunc<T> {
    num: Poly<T>,
    den: Poly<T>,
    factors: OnceLock<Arc<DenFactorization<T>>>,
}

/// `den = x^{x_power} · ∏ Φ_n^{m_n} · remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenFactorization<T> {
    pub x_power: u32,
    pub blocks: BTreeMap<u32, u32>,
    /// Monic factor without roots of unity; `1` for every denominator the
    /// J-function machinery produces.
    pub remainder: Poly<T>,
}

impl<T: Scalar> DenFactorization<T> {
    pub fn is_complete(&self) -> bool {
        self.remainder.is_constant()
    }
}

/// Pole data of a rational function.
///
/// Orders at `0` and `∞` are in `x`-units; a pole of order `k` in `x` is a
/// pole of order `k/d` in `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleOrders {
    pub zero: u32,
    pub infinity: u32,
    pub blocks: BTreeMap<u32, BlockPole>,
    /// Set when the denominator has a factor that is not cyclotomic.
    pub remainder: Option<String>,
}

/// Pole of order `order` at the primitive `n`-th roots of unity in `x`, which
/// are primitive `q_order`-th roots of unity in `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPole {
    pub order: u32,
    pub q_order: u32,
}

impl PoleOrders {
    pub fn zero_in_q(&self, d: u32) -> Rat {
        Rat::new(self.zero.into(), d.into())
    }

    pub fn infinity_in_q(&self, d: u32) -> Rat {
        Rat::new(self.infinity.into(), d.into())
    }

    pub fn has_root_of_unity_pole(&self) -> bool {
        !self.blocks.is_empty()
    }
}

/// One cyclotomic block `numerator / Φ_n^{mult}` with `deg numerator < mult·φ(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycloBlock<T> {
    pub n: u32,
    pub mult: u32,
    pub numerator: Poly<T>,
}

impl<T: Scalar> CycloBlock<T> {
    /// Digits `a_j` with `numerator/Φ^m = Σ_j a_j / Φ^{j+1}` and `deg a_j < φ(n)`.
    pub fn digits(&self) -> Vec<Poly<T>> {
        let phi = cyclotomic::<T>(self.n);
        let mut out = vec![Poly::zero(); self.mult as usize];
        let mut rest = self.numerator.clone();
        // numerator = Σ_j a_j Φ^{m-1-j}; peel off a_{m-1} first.
        for j in (0..self.mult as usize).rev() {
            let (q, r) = rest.div_rem(&phi);
            out[j] = r;
            rest = q;
        }
        debug_assert!(rest.is_zero());
        out
    }

    pub fn to_ratfunc(&self) -> RatFunc<T> {
        RatFunc::new_unchecked(self.numerator.clone(), cyclotomic::<T>(self.n).pow(self.mult))
    }
}

/// Partial-fraction split `f = poly + A₀/x^a + Σ blocks`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractions<T> {
    pub polynomial: Poly<T>,
    pub x_power: u32,
    pub zero_numerator: Poly<T>,
    pub blocks: Vec<CycloBlock<T>>,
}

impl<T: Scalar> PartialFractions<T> {
    /// The Laurent-polynomial part.
    pub fn plus(&self) -> RatFunc<T> {
        let head = RatFunc::from_poly(self.polynomial.clone());
        let tail = RatFunc::new_unchecked(self.zero_numerator.clone(), Poly::x_pow(self.x_power as usize));
        &head + &tail
    }

    /// The part regular at `0` and vanishing at `∞`.
    pub fn minus(&self) -> RatFunc<T> {
        self.blocks
            .iter()
            .fold(RatFunc::zero(), |acc, b| &acc + &b.to_ratfunc())
    }
}

impl<T: Scalar> RatFunc<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new_unchecked(num, den))
    }

    /// Reduces `num/den`; `den` must be nonzero.
    pub(crate) fn new_unchecked(num: Poly<T>, den: Poly<T>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = T::one() / lead;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc {
            num,
            den,
            factors: OnceLock::new(),
        }
    }

    /// `num/den` for a pair already known to be coprime; only the leading
    /// coefficient of `den` is normalized.
    fn from_coprime(num: Poly<T>, den: Poly<T>) -> Self {
        let lead = den.leading().unwrap().clone();
        let (num, den) = if lead.is_one() {
            (num, den)
        } else {
            let inv = T::one() / lead;
            (num.scale(&inv), den.scale(&inv))
        };
        RatFunc {
            num,
            den,
            factors: OnceLock::new(),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
            factors: OnceLock::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
            factors: OnceLock::new(),
        }
    }

    /// `c · x^k` for any integer `k`.
    pub fn monomial(c: T, k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(Poly::monomial(c, k as usize))
        } else {
            Self::new_unchecked(Poly::constant(c), Poly::x_pow((-k) as usize))
        }
    }

    /// `Σ c_i x^{i + shift}` for a Laurent polynomial stored as a shifted polynomial.
    pub fn laurent(p: Poly<T>, shift: i64) -> Self {
        if shift >= 0 {
            Self::from_poly(p.shift_up(shift as usize))
        } else {
            Self::new_unchecked(p, Poly::x_pow((-shift) as usize))
        }
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn den(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Polynomial in `x` and `1/x`.
    pub fn is_laurent(&self) -> bool {
        self.den.terms().count() == 1
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<T> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
            factors: self.factors.clone(),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new_unchecked(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    /// Integer powers; negative exponents invert.
    pub fn powi(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc::new_unchecked(base.num.pow(k), base.den.pow(k)))
    }

    /// `f(x) ↦ f(1/x)`, i.e. `q ↦ 1/q`.
    pub fn invert_q(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        // N(1/x)/D(1/x) = x^{dd-dn} rev(N)/rev(D); reversal keeps the pair coprime.
        let num = self.num.reversed();
        let den = self.den.reversed();
        let shift = dd - dn;
        if shift >= 0 {
            Self::from_coprime(num.shift_up(shift as usize), den)
        } else {
            Self::from_coprime(num, den.shift_up((-shift) as usize))
        }
    }

    /// Substitute `x ↦ x^k`.
    pub fn inflate(&self, k: usize) -> Self {
        Self::new_unchecked(self.num.inflate(k), self.den.inflate(k))
    }

    pub fn eval(&self, x: &T) -> Result<T> {
        let dv = self.den.eval(x);
        if dv.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / dv)
    }

    /// Coefficient of `x^k` in the Laurent expansion at `x = 0`.
    pub fn laurent_coeff_at_zero(&self, k: i64) -> T {
        laurent_coeff(&self.num, &self.den, k)
    }

    /// `Res_{q=0} f dq/q`: the `q⁰` coefficient of the expansion at `0`.
    pub fn residue_zero(&self) -> T {
        self.laurent_coeff_at_zero(0)
    }

    /// `Res_{q=∞} f dq/q`: minus the `q⁰` coefficient of the expansion at `∞`.
    pub fn residue_infinity(&self) -> T {
        -self.invert_q().laurent_coeff_at_zero(0)
    }

    pub fn factorization(&self) -> &DenFactorization<T> {
        self.factors
            .get_or_init(|| cached_factorization(&self.den))
    }

    pub fn pole_orders(&self, d: u32) -> PoleOrders {
        let fact = self.factorization();
        let infinity = match (self.num.degree(), self.den.degree()) {
            (Some(a), Some(b)) if a > b => (a - b) as u32,
            _ => 0,
        };
        PoleOrders {
            zero: fact.x_power,
            infinity,
            blocks: fact
                .blocks
                .iter()
                .map(|(&n, &order)| {
                    (
                        n,
                        BlockPole {
                            order,
                            q_order: n / n.gcd(&d),
                        },
                    )
                })
                .collect(),
            remainder: (!fact.is_complete()).then(|| fact.remainder.to_string()),
        }
    }

    /// Split into polynomial, pole-at-zero and cyclotomic blocks.
    pub fn partial_fractions(&self) -> Result<PartialFractions<T>> {
        let fact = self.factorization();
        if !fact.is_complete() {
            return Err(Error::NonDictionaryFactor(fact.remainder.to_string()));
        }
        let (quot, rem) = self.num.div_rem(&self.den);
        let split = |b: &Poly<T>| -> Poly<T> {
            let c = self.den.exact_div(b).expect("block divides the denominator");
            let inv = c.inv_mod(b).expect("blocks are coprime");
            (&rem * &inv).rem(b)
        };
        let zero_numerator = if fact.x_power > 0 {
            split(&Poly::x_pow(fact.x_power as usize))
        } else {
            Poly::zero()
        };
        let blocks = fact
            .blocks
            .iter()
            .map(|(&n, &mult)| CycloBlock {
                n,
                mult,
                numerator: split(&cyclotomic::<T>(n).pow(mult)),
            })
            .collect();
        Ok(PartialFractions {
            polynomial: quot,
            x_power: fact.x_power,
            zero_numerator,
            blocks,
        })
    }
}

type FactorCache = Mutex<HashMap<(TypeId, String), Arc<dyn Any + Send + Sync>>>;

/// Denominators repeat heavily across a computation, so factorizations are
/// shared process-wide.
fn cached_factorization<T: Scalar>(den: &Poly<T>) -> Arc<DenFactorization<T>> {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (TypeId::of::<T>(), den.to_string());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        if let Ok(f) = hit.clone().downcast::<DenFactorization<T>>() {
            return f;
        }
    }
    let f = Arc::new(factor_denominator(den));
    let mut guard = cache.lock().unwrap();
    if guard.len() > 200_000 {
        guard.clear();
    }
    guard.insert(key, f.clone());
    f
}

/// Strips `x^a`, then every cyclotomic factor. The search over `n` is
/// exhaustive: `φ(n) ≥ √(n/2)`, so no `Φ_n` with `n > 2·deg²` can divide.
fn factor_denominator<T: Scalar>(den: &Poly<T>) -> DenFactorization<T> {
    let x_power = den.valuation().unwrap_or(0);
    let mut rest = den.shift_down(x_power).monic();
    let mut blocks = BTreeMap::new();
    let deg0 = rest.degree().unwrap_or(0);
    let bound = 2 * (deg0 as u32).pow(2) + 2;
    let mut n = 1u32;
    while rest.degree().unwrap_or(0) > 0 && n <= bound {
        let phi_deg = totient(n) as usize;
        if phi_deg <= rest.degree().unwrap() {
            let phi = cyclotomic::<T>(n);
            let mut mult = 0;
            while let Some(q) = rest.exact_div(&phi) {
                rest = q;
                mult += 1;
                if rest.degree().unwrap_or(0) < phi_deg {
                    break;
                }
            }
            if mult > 0 {
                blocks.insert(n, mult);
            }
        }
        n += 1;
    }
    DenFactorization {
        x_power: x_power as u32,
        blocks,
        remainder: rest.monic(),
    }
}

/// Coefficient of `x^k` in the expansion of `num/den` at `x = 0`. The
/// fraction need not be reduced.
pub(crate) fn laurent_coeff<T: Scalar>(num: &Poly<T>, den: &Poly<T>, k: i64) -> T {
    if num.is_zero() {
        return T::zero();
    }
    let vn = num.valuation().unwrap() as i64;
    let vd = den.valuation().unwrap() as i64;
    // num/den = x^{vn-vd} · N'/D' with D'(0) ≠ 0
    let order = k - (vn - vd);
    if order < 0 {
        return T::zero();
    }
    let n = num.shift_down(vn as usize);
    let dpoly = den.shift_down(vd as usize);
    let d0_inv = T::one() / dpoly.coeff(0);
    let order = order as usize;
    let mut s: Vec<T> = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let mut acc = n.coeff(i);
        for j in 1..=i.min(dpoly.degree().unwrap()) {
            let mut t = dpoly.coeff(j);
            t *= &s[i - j];
            acc -= &t;
        }
        acc *= &d0_inv;
        s.push(acc);
    }
    s.pop().unwrap()
}

/// `Res_{q=0} + Res_{q=∞}` of `f·g dq/q`, read off the unreduced product.
pub(crate) fn product_residue_sum<T: Scalar>(f: &RatFunc<T>, g: &RatFunc<T>) -> T {
    if f.is_zero() || g.is_zero() {
        return T::zero();
    }
    let num = &f.num * &g.num;
    let den = &f.den * &g.den;
    let at_zero = laurent_coeff(&num, &den, 0);
    // h(1/x) = x^{deg den − deg num} rev(num)/rev(den)
    let shift = den.degree().unwrap() as i64 - num.degree().unwrap() as i64;
    let at_inf = laurent_coeff(&num.reversed(), &den.reversed(), -shift);
    at_zero - at_inf
}

impl<T: Scalar> PartialEq for RatFunc<T> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<T: Scalar> fmt::Debug for RatFunc<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl<T: Scalar> fmt::Display for RatFunc<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<T: Scalar> Add<&RatFunc<T>> for &RatFunc<T> {
    type Output = RatFunc<T>;

    fn add(self, rhs: &RatFunc<T>) -> RatFunc<T> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new_unchecked(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let a = self.den.exact_div(&g).unwrap();
        let b = rhs.den.exact_div(&g).unwrap();
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        RatFunc::new_unchecked(num, &a * &rhs.den)
    }
}

impl<T: Scalar> Sub<&RatFunc<T>> for &RatFunc<T> {
    type Output = RatFunc<T>;

    fn sub(self, rhs: &RatFunc<T>) -> RatFunc<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul<&RatFunc<T>> for &RatFunc<T> {
    type Output = RatFunc<T>;

    fn mul(self, rhs: &RatFunc<T>) -> RatFunc<T> {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // Cross-cancel before multiplying.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = rhs.den.exact_div(&g1).unwrap();
        let n2 = rhs.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RatFunc::new_unchecked(&n1 * &n2, &d1 * &d2)
    }
}

impl<T: Scalar> Neg for &RatFunc<T> {
    type Output = RatFunc<T>;

    fn neg(self) -> RatFunc<T> {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
            factors: self.factors.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr<RatFunc<T>> for RatFunc<T> {
            type Output = RatFunc<T>;
            fn $m(self, rhs: RatFunc<T>) -> RatFunc<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Mul<&RatFunc<T>> for RatFunc<T> {
    type Output = RatFunc<T>;

    fn mul(self, rhs: &RatFunc<T>) -> RatFunc<T> {
        &self * rhs
    }
}

impl<T: Scalar> Neg for RatFunc<T> {
    type Output = RatFunc<T>;

    fn neg(self) -> RatFunc<T> {
        -&self
    }
}

impl<T: Scalar> Zero for RatFunc<T> {
    fn zero() -> Self {
        RatFunc::zero()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<T: Scalar> One for RatFunc<T> {
    fn one() -> Self {
        RatFunc::one()
    }
}
