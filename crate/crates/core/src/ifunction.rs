//! Closed-form pieces of the `ε`-chamber J-function: the hypergeometric
//! sum, the big-chamber explicit part, and the unstable-locus factors.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::genfun::{CorrelatorSymbol, Monomial, SeriesConfig, TSeries, Var};
use crate::loopspace::KElement;
use crate::qalg::{one_minus_product, QExp, RatFunc};
use crate::scalar::{ceil, frac, Scalar};
use crate::statespace::FermatModel;
use crate::Rat;

/// A stability chamber, `ε ∈ ℚ_{>0}` or `ε = ∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EpsilonChamber {
    Finite(Rat),
    Infinite,
}

impl EpsilonChamber {
    pub fn finite(eps: Rat) -> Result<Self> {
        if eps <= Rat::zero() {
            return Err(Error::InvalidChamber(format!("epsilon must be positive, got {eps}")));
        }
        Ok(EpsilonChamber::Finite(eps))
    }

    /// `⌈1/ε⌉`, the bound on the number of light points.
    pub fn cap(&self) -> u32 {
        match self {
            EpsilonChamber::Infinite => 1,
            EpsilonChamber::Finite(e) => {
                let c = ceil(&e.recip());
                c.to_integer().try_into().unwrap_or(u32::MAX)
            }
        }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            EpsilonChamber::Finite(e) => Some(e),
            EpsilonChamber::Infinite => None,
        }
    }
}

impl fmt::Display for EpsilonChamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonChamber::Finite(e) => write!(f, "{e}"),
            EpsilonChamber::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for EpsilonChamber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "∞" | "infinity") {
            return Ok(EpsilonChamber::Infinite);
        }
        let e: Rat = s
            .parse()
            .map_err(|_| Error::InvalidChamber(format!("cannot parse epsilon {s:?}")))?;
        EpsilonChamber::finite(e)
    }
}

/// `⌈1/ε⌉`, with `∞ ↦ 1`.
pub fn ceil_inv(chamber: &EpsilonChamber) -> u32 {
    chamber.cap()
}

/// One summand of the hypergeometric part.
#[derive(Clone, Debug, PartialEq)]
pub struct HypergeometricTerm<T: Scalar> {
    /// `(index, a_index)` for the nonzero entries of the multi-index.
    pub multi_index: Vec<(usize, u32)>,
    /// `K = Σ i·a_i mod d`.
    pub state: usize,
    pub narrow: bool,
    /// Per coordinate `j`, the exponents `b` of the factors `1 − q^b`.
    pub b_lists: Vec<Vec<QExp>>,
    /// `(1−q)^{1−Σa}·∏_j∏_b(1−q^b)`.
    pub coefficient: RatFunc<T>,
    pub monomial: Monomial,
}

impl<T: Scalar> HypergeometricTerm<T> {
    pub fn total(&self) -> u32 {
        self.multi_index.iter().map(|&(_, a)| a).sum()
    }
}

/// `{b : b₀ ≤ b < upper, b ≡ target mod 1}` with `b₀ = 0` or, when `strict`, `b > 0`.
fn progression(target: &Rat, upper: &Rat, strict: bool, d: u32) -> Vec<QExp> {
    let mut out = Vec::new();
    let mut b = target.clone();
    while &b < upper {
        if !(strict && b.is_zero()) {
            out.push(QExp::from_rat(&b, d).expect("charges live in (1/d)ℤ"));
        }
        b += Rat::one();
    }
    out
}

fn int(n: usize) -> Rat {
    Rat::from_integer((n as i64).into())
}

fn one_minus_q_pow<T: Scalar>(d: u32, e: i32) -> RatFunc<T> {
    let base = QExp::new(d as i64, d).one_minus::<T>();
    base.powi(e).expect("1 - q is nonzero")
}

/// All multi-indices over `nar` with total at most `max`, in lexicographic order.
fn multi_indices(nar: &[usize], max: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(0, max, &mut vec![0; nar.len()], &mut out);
    out
}

/// Builds the term for a multi-index given as `(index, multiplicity)` pairs.
pub fn hypergeometric_term<T: Scalar>(
    model: &FermatModel,
    multi_index: &[(usize, u32)],
) -> HypergeometricTerm<T> {
    let d = model.d();
    let total: u32 = multi_index.iter().map(|&(_, a)| a).sum();
    let state = multi_index
        .iter()
        .fold(0, |k, &(i, a)| (0..a).fold(k, |k, _| model.mult_index(k, i)));
    let mut b_lists = Vec::new();
    let mut product = RatFunc::one();
    for qj in model.charges() {
        let mut target = qj.clone();
        let mut upper = qj.clone();
        for &(i, a) in multi_index {
            let a = int(a as usize);
            target += &(&a * &int(i) * &qj);
            upper += &(&a * &frac(&(&int(i) * &qj)));
        }
        let bs = progression(&frac(&target), &upper, false, d);
        product = &product * &one_minus_product::<T>(&bs);
        b_lists.push(bs);
    }
    let coefficient = &one_minus_q_pow::<T>(d, 1 - total as i32) * &product;
    let monomial = Monomial::from_pairs(
        multi_index
            .iter()
            .map(|&(k, a)| (Var::U { k }, a)),
    );
    HypergeometricTerm {
        multi_index: multi_index.iter().copied().filter(|&(_, a)| a > 0).collect(),
        state,
        narrow: model.is_narrow(state),
        b_lists,
        coefficient,
        monomial,
    }
}

/// Every hypergeometric term with `Σ a_i ≤ min(cap, max_total)`.
pub fn hypergeometric_terms<T: Scalar>(
    model: &FermatModel,
    chamber: &EpsilonChamber,
    max_total: u32,
) -> Vec<HypergeometricTerm<T>> {
    let nar = model.narrow_set().indices;
    multi_indices(&nar, chamber.cap().min(max_total))
        .into_iter()
        .map(|a| {
            let pairs: Vec<(usize, u32)> = nar.iter().copied().zip(a).filter(|&(_, a)| a > 0).collect();
            hypergeometric_term(model, &pairs)
        })
        .collect()
}

/// The hypergeometric line of `J^ε` as a series in the `u` variables.
pub fn hypergeometric_part<T: Scalar>(
    cfg: &Arc<SeriesConfig>,
    chamber: &EpsilonChamber,
) -> TSeries<T> {
    let mut s = TSeries::zero(cfg);
    for term in hypergeometric_terms::<T>(&cfg.model, chamber, cfg.dmax) {
        s.insert(term.monomial, KElement::basis(term.state, term.coefficient));
    }
    s
}

/// Explicit part of `J^∞`, together with the correlator placeholders it omits.
#[derive(Clone, Debug, PartialEq)]
pub struct JInfinityExplicit<T: Scalar> {
    pub series: TSeries<T>,
    pub placeholders: Vec<CorrelatorSymbol>,
}

/// `(1−q)φ₀ + Σ u^iφ_i(…) + t(1/q)`, with one placeholder per output state and
/// multiset of at least two `t` insertions within `D_max`.
pub fn j_infinity_explicit<T: Scalar>(cfg: &Arc<SeriesConfig>) -> JInfinityExplicit<T> {
    let series = hypergeometric_part(cfg, &EpsilonChamber::Infinite).add(&TSeries::t_inverse(cfg));
    let t_vars = cfg.t_vars();
    let mut placeholders = Vec::new();
    for mono in cfg.monomials_up_to(cfg.dmax) {
        if mono.u_degree() > 0 || mono.degree() < 2 {
            continue;
        }
        let insertions: Vec<(usize, i32)> = mono
            .factors()
            .iter()
            .flat_map(|&(v, e)| {
                let (k, j) = match v {
                    Var::T { k, j } => (k, j),
                    Var::U { .. } => unreachable!(),
                };
                std::iter::repeat_n((k, j), e as usize)
            })
            .collect();
        for k in cfg.narrow() {
            placeholders.push(CorrelatorSymbol {
                descendant_state: k,
                insertions: insertions.clone(),
                light: Vec::new(),
                chamber: EpsilonChamber::Infinite,
            });
        }
    }
    debug_assert!(t_vars.iter().all(|v| !v.is_u()));
    JInfinityExplicit {
        series,
        placeholders,
    }
}

/// Contribution of one unstable fixed locus.
#[derive(Clone, Debug, PartialEq)]
pub struct UnstableContribution<T: Scalar> {
    pub state: usize,
    pub b_lists: Vec<Vec<QExp>>,
    /// `∏_j∏_b(1−q^b)/(1−q)^{n₀}`, without the `u` monomial.
    pub coefficient: RatFunc<T>,
    pub monomial: Monomial,
}

fn unstable_b_lists(model: &FermatModel, r: usize, l0: &[usize]) -> Vec<Vec<QExp>> {
    model
        .charges()
        .iter()
        .map(|qj| {
            let mut target = qj + qj * int(r);
            let mut upper = qj + frac(&(qj * int(r)));
            for &l in l0 {
                target += qj * int(l);
                upper += frac(&(qj * int(l)));
            }
            progression(&frac(&target), &upper, true, model.d())
        })
        .collect()
}

fn check_unstable(
    model: &FermatModel,
    chamber: &EpsilonChamber,
    r: usize,
    l0: &[usize],
) -> Result<()> {
    for &k in std::iter::once(&r).chain(l0) {
        if k >= model.d() as usize {
            return Err(Error::IndexOutOfRange { index: k, d: model.d() });
        }
        if !model.is_narrow(k) {
            return Err(Error::NotNarrow { index: k });
        }
    }
    let eps = chamber.value().ok_or_else(|| {
        Error::UnstableLocusAbsent("no unstable locus in the infinite chamber".into())
    })?;
    let n0 = int(l0.len());
    if (n0 + Rat::one()) * eps > Rat::one() {
        return Err(Error::UnstableLocusAbsent(format!(
            "{} light points need n0 + 1 <= 1/epsilon, epsilon = {eps}",
            l0.len()
        )));
    }
    Ok(())
}

/// The unstable-locus term for marking `r` and light points `l0`.
pub fn unstable_contribution<T: Scalar>(
    model: &FermatModel,
    chamber: &EpsilonChamber,
    r: usize,
    l0: &[usize],
) -> Result<UnstableContribution<T>> {
    check_unstable(model, chamber, r, l0)?;
    let d = model.d();
    let b_lists = unstable_b_lists(model, r, l0);
    let mut coefficient = one_minus_q_pow::<T>(d, -(l0.len() as i32));
    for bs in &b_lists {
        coefficient = &coefficient * &one_minus_product::<T>(bs);
    }
    let state = l0.iter().fold(r % d as usize, |k, &l| model.mult_index(k, l));
    Ok(UnstableContribution {
        state,
        b_lists,
        coefficient,
        monomial: Monomial::from_pairs(l0.iter().map(|&k| (Var::U { k }, 1))),
    })
}

/// Number of Čech representatives for coordinate `j`, which is the number of
/// factors that coordinate contributes to [`unstable_contribution`].
pub fn cech_rank(model: &FermatModel, j: usize, r: usize, l0: &[usize]) -> Result<usize> {
    if j >= model.n_vars() {
        return Err(Error::InvalidModel(format!("no coordinate {j}")));
    }
    for &k in std::iter::once(&r).chain(l0) {
        if !model.is_narrow(k) {
            return Err(Error::NotNarrow { index: k });
        }
    }
    Ok(unstable_b_lists(model, r, l0)[j].len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::Poly;

    type R = RatFunc<Rat>;

    fn eps(s: &str) -> EpsilonChamber {
        s.parse().unwrap()
    }

    fn one_minus_x(k: usize) -> R {
        R::from_poly(Poly::one_minus_x_pow(k))
    }

    #[test]
    fn ceil_inv_examples() {
        assert_eq!(ceil_inv(&eps("1/2")), 2);
        assert_eq!(ceil_inv(&eps("1")), 1);
        assert_eq!(ceil_inv(&eps("2/3")), 2);
        assert_eq!(ceil_inv(&eps("7/2")), 1);
        assert_eq!(ceil_inv(&eps("inf")), 1);
        assert_eq!(ceil_inv(&eps("1/3")), 3);
        assert!("0".parse::<EpsilonChamber>().is_err());
        assert!("-1/2".parse::<EpsilonChamber>().is_err());
        assert!("x".parse::<EpsilonChamber>().is_err());
    }

    #[test]
    fn quintic_cap_one_by_hand() {
        let m = FermatModel::quintic();
        let terms = hypergeometric_terms::<Rat>(&m, &EpsilonChamber::Infinite, 5);
        assert_eq!(terms.len(), 5);
        assert!(terms[0].multi_index.is_empty());
        assert_eq!(terms[0].coefficient, one_minus_x(5));
        assert!(terms[0].b_lists.iter().all(Vec::is_empty));
        // a_i = 1: target ⟨(i+1)/5⟩ = (i+1)/5 and upper 1/5 + i/5, so no b qualifies.
        for t in &terms[1..] {
            assert_eq!(t.coefficient, R::one(), "{:?}", t.multi_index);
            assert!(t.b_lists.iter().all(Vec::is_empty));
            assert_eq!(t.state, t.multi_index[0].0);
        }
    }

    #[test]
    fn quintic_cap_two_terms() {
        let m = FermatModel::quintic();
        let inv = one_minus_x(5).recip().unwrap();
        let a33 = hypergeometric_term::<Rat>(&m, &[(3, 2)]);
        assert_eq!(a33.state, 1);
        // target ⟨1/5 + 6/5⟩ = 2/5, upper 1/5 + 6/5 = 7/5: b = 2/5 per coordinate.
        assert_eq!(a33.b_lists[0], vec![QExp::new(2, 5)]);
        assert_eq!(a33.coefficient, &one_minus_x(2).powi(5).unwrap() * &inv);
        let a12 = hypergeometric_term::<Rat>(&m, &[(1, 1), (2, 1)]);
        assert_eq!((a12.state, a12.coefficient.clone()), (3, inv.clone()));
        let a13 = hypergeometric_term::<Rat>(&m, &[(1, 1), (3, 1)]);
        assert_eq!(a13.state, 4);
        assert!(!a13.narrow);
        assert!(a13.coefficient.is_zero());
    }

    #[test]
    fn cubic_terms() {
        let m = FermatModel::cubic();
        let a11 = hypergeometric_term::<Rat>(&m, &[(1, 2)]);
        assert_eq!(a11.state, 2);
        assert!(a11.coefficient.is_zero());
        let inv = one_minus_x(3).recip().unwrap();
        assert_eq!(hypergeometric_term::<Rat>(&m, &[(0, 1), (1, 1)]).coefficient, inv);
        assert_eq!(hypergeometric_term::<Rat>(&m, &[(0, 2)]).coefficient, inv);
    }

    #[test]
    fn j_infinity_degree_zero() {
        let cfg = SeriesConfig::new(FermatModel::quintic(), (0, 0), 0);
        let j = j_infinity_explicit::<Rat>(&cfg);
        assert_eq!(j.series, TSeries::dilaton_shift(&cfg));
        assert!(j.placeholders.is_empty());
        let cfg2 = SeriesConfig::new(FermatModel::cubic(), (0, 0), 2);
        // t-monomials of degree 2 in t[0,0], t[1,0]: three, times two states.
        assert_eq!(j_infinity_explicit::<Rat>(&cfg2).placeholders.len(), 6);
    }

    #[test]
    fn unstable_examples() {
        let m = FermatModel::quintic();
        let half = eps("1/2");
        let c = unstable_contribution::<Rat>(&m, &half, 1, &[]).unwrap();
        assert_eq!((c.state, c.coefficient), (1, R::one()));
        let c = unstable_contribution::<Rat>(&m, &half, 0, &[1]).unwrap();
        assert_eq!(c.state, 1);
        assert_eq!(c.coefficient, one_minus_x(5).recip().unwrap());
        assert_eq!(c.monomial, Monomial::var(Var::U { k: 1 }));
        assert!(matches!(
            unstable_contribution::<Rat>(&m, &eps("2/3"), 0, &[1]),
            Err(Error::UnstableLocusAbsent(_))
        ));
        assert!(matches!(
            unstable_contribution::<Rat>(&m, &EpsilonChamber::Infinite, 0, &[]),
            Err(Error::UnstableLocusAbsent(_))
        ));
        assert_eq!(cech_rank(&m, 0, 1, &[]).unwrap(), 0);
        assert_eq!(cech_rank(&m, 2, 0, &[1]).unwrap(), 0);
        // r = 3, l0 = [3]: target ⟨7/5⟩ = 2/5, upper 1/5 + 3/5 + 3/5 = 7/5.
        assert_eq!(cech_rank(&m, 0, 3, &[3]).unwrap(), 1);
    }
}
