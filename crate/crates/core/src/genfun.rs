//! Truncated series in the inputs `t^k_j` and `u^k` with loop-space
//! coefficients, plus a small λ-algebra carrier.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ifunction::EpsilonChamber;
use crate::loopspace::{pair, KElement};
use crate::qalg::RatFunc;
use crate::scalar::Scalar;
use crate::statespace::FermatModel;

/// An input variable: `t^k_j` (coefficient of `q^j φ_k` in `t(q)`) or `u^k`.
///
/// All `t` variables sort before all `u` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T { k: usize, j: i32 },
    U { k: usize },
}

impl Var {
    pub fn is_u(&self) -> bool {
        matches!(self, Var::U { .. })
    }

    pub fn state(&self) -> usize {
        match *self {
            Var::T { k, .. } | Var::U { k } => k,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T { k, j } => write!(f, "t[{k},{j}]"),
            Var::U { k } => write!(f, "u[{k}]"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad variable {s:?}"));
        let inner = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(bad)
        };
        if s.starts_with("t[") {
            let body = inner("t[")?;
            let (k, j) = body.split_once(',').ok_or_else(bad)?;
            Ok(Var::T {
                k: k.trim().parse().map_err(|_| bad())?,
                j: j.trim().parse().map_err(|_| bad())?,
            })
        } else if s.starts_with("u[") {
            Ok(Var::U {
                k: inner("u[")?.trim().parse().map_err(|_| bad())?,
            })
        } else {
            Err(bad())
        }
    }
}

/// A monomial `∏ v^{e_v}` with sorted variables and positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut m: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v).or_default() += e;
        }
        Monomial(m.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn u_degree(&self) -> u32 {
        self.0.iter().filter(|(v, _)| v.is_u()).map(|&(_, e)| e).sum()
    }

    pub fn t_degree(&self) -> u32 {
        self.degree() - self.u_degree()
    }

    /// `(|n⃗|, |m⃗|)`: `u`-degree first, then `t`-degree.
    pub fn grade(&self) -> (u32, u32) {
        (self.u_degree(), self.t_degree())
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn mul_var(&self, v: Var) -> Self {
        self.mul(&Monomial::var(v))
    }

    /// `self / v`, or `None` if `v` does not divide.
    pub fn div_var(&self, v: Var) -> Option<Self> {
        let e = self.exponent(v);
        (e > 0).then(|| {
            Monomial(
                self.0
                    .iter()
                    .filter_map(|&(w, f)| match (w == v, f) {
                        (true, 1) => None,
                        (true, f) => Some((w, f - 1)),
                        (false, f) => Some((w, f)),
                    })
                    .collect(),
            )
        })
    }

    /// `self / other`, or `None` if `other` does not divide.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.exponent(v);
            if f > e {
                return None;
            }
            if e > f {
                out.push((v, e - f));
            }
        }
        if other.0.iter().any(|&(v, _)| self.exponent(v) == 0) {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn u_part(&self) -> Self {
        Monomial(self.0.iter().filter(|(v, _)| v.is_u()).copied().collect())
    }

    pub fn t_part(&self) -> Self {
        Monomial(self.0.iter().filter(|(v, _)| !v.is_u()).copied().collect())
    }
}

impl fmt::Display for Monomial {
    /// Canonical form `t[k,j]^m·u[k]^n`; the empty monomial prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{v}^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut pairs = Vec::new();
        for part in s.split('·') {
            let (v, e) = part
                .rsplit_once('^')
                .ok_or_else(|| Error::Parse(format!("bad monomial factor {part:?}")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {part:?}")))?;
            pairs.push((v.parse()?, e));
        }
        Ok(Monomial::from_pairs(pairs))
    }
}

/// Shared configuration of a family of series: the model, the `t`-window
/// `[j_min, j_max]` and the total-degree truncation `D_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesConfig {
    pub model: FermatModel,
    pub window: (i32, i32),
    pub dmax: u32,
}

impl SeriesConfig {
    pub const DEFAULT_WINDOW: (i32, i32) = (-2, 2);

    pub fn new(model: FermatModel, window: (i32, i32), dmax: u32) -> Arc<Self> {
        assert!(window.0 <= window.1, "empty t-window");
        Arc::new(SeriesConfig { model, window, dmax })
    }

    pub fn d(&self) -> u32 {
        self.model.d()
    }

    pub fn narrow(&self) -> Vec<usize> {
        self.model.narrow_set().indices
    }

    pub fn t_vars(&self) -> Vec<Var> {
        let nar = self.narrow();
        nar.iter()
            .flat_map(|&k| (self.window.0..=self.window.1).map(move |j| Var::T { k, j }))
            .collect()
    }

    pub fn u_vars(&self) -> Vec<Var> {
        self.narrow().into_iter().map(|k| Var::U { k }).collect()
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut v = self.t_vars();
        v.extend(self.u_vars());
        v
    }

    /// Every monomial in the input variables with total degree at most `max`.
    pub fn monomials_up_to(&self, max: u32) -> Vec<Monomial> {
        let vars = self.variables();
        let mut out = vec![Monomial::one()];
        let mut frontier = vec![(Monomial::one(), 0usize)];
        for _ in 0..max {
            let mut next = Vec::new();
            for (m, start) in &frontier {
                for (i, &v) in vars.iter().enumerate().skip(*start) {
                    let nm = m.mul_var(v);
                    out.push(nm.clone());
                    next.push((nm, i));
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    pub fn check_var(&self, v: Var) -> Result<()> {
        if !self.model.is_narrow(v.state()) {
            return Err(Error::NotNarrow { index: v.state() });
        }
        if let Var::T { j, .. } = v {
            if j < self.window.0 || j > self.window.1 {
                return Err(Error::Parse(format!("{v} lies outside the t-window")));
            }
        }
        Ok(())
    }
}

/// `Σ_μ c_μ μ` with `c_μ ∈ 𝒦`, truncated at total degree `D_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeries<T: Scalar> {
    cfg: Arc<SeriesConfig>,
    terms: BTreeMap<Monomial, KElement<T>>,
}

impl<T: Scalar> TSeries<T> {
    pub fn zero(cfg: &Arc<SeriesConfig>) -> Self {
        TSeries {
            cfg: cfg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(cfg: &Arc<SeriesConfig>, c: KElement<T>) -> Self {
        Self::term(cfg, Monomial::one(), c)
    }

    pub fn term(cfg: &Arc<SeriesConfig>, mono: Monomial, c: KElement<T>) -> Self {
        let mut s = Self::zero(cfg);
        s.insert(mono, c);
        s
    }

    /// `(1 − q) φ₀`.
    pub fn dilaton_shift(cfg: &Arc<SeriesConfig>) -> Self {
        let one_minus_q = &RatFunc::one() - &RatFunc::monomial(T::one(), cfg.d() as i64);
        Self::constant(cfg, KElement::basis(0, one_minus_q))
    }

    /// `t(1/q) = Σ_{k,j} t^k_j q^{−j} φ_k` over the narrow sector and `t`-window.
    pub fn t_inverse(cfg: &Arc<SeriesConfig>) -> Self {
        let mut s = Self::zero(cfg);
        for v in cfg.t_vars() {
            if let Var::T { k, j } = v {
                let c = RatFunc::monomial(T::one(), -(j as i64) * cfg.d() as i64);
                s.insert(Monomial::var(v), KElement::basis(k, c));
            }
        }
        s
    }

    pub fn config(&self) -> &Arc<SeriesConfig> {
        &self.cfg
    }

    pub fn model(&self) -> &FermatModel {
        &self.cfg.model
    }

    pub fn dmax(&self) -> u32 {
        self.cfg.dmax
    }

    /// Adds `c · mono`, dropping it above `D_max`.
    pub fn insert(&mut self, mono: Monomial, c: KElement<T>) {
        if c.is_zero() || mono.degree() > self.cfg.dmax {
            return;
        }
        let sum = match self.terms.remove(&mono) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(mono, sum);
        }
    }

    pub fn get(&self, mono: &Monomial) -> Option<&KElement<T>> {
        self.terms.get(mono)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &KElement<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.cfg == other.cfg {
            Ok(())
        } else {
            Err(Error::IncompatibleSeries)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Panics on incompatible configurations; see [`TSeries::try_add`].
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible series configurations")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn map(&self, op: impl Fn(&KElement<T>) -> KElement<T>) -> Self {
        let mut out = Self::zero(&self.cfg);
        for (m, c) in &self.terms {
            out.insert(m.clone(), op(c));
        }
        out
    }

    /// Truncated product, with states multiplied in the extended ring.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.cfg);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.degree() + b.degree() > self.cfg.dmax {
                    continue;
                }
                out.insert(a.mul(b), ca.mul(cb, &self.cfg.model));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("incompatible series configurations")
    }

    /// `∂/∂v`.
    pub fn differentiate(&self, v: Var) -> Self {
        let mut out = Self::zero(&self.cfg);
        for (m, c) in &self.terms {
            if let Some(rest) = m.div_var(v) {
                let e = T::from_i64(m.exponent(v) as i64);
                out.insert(rest, c.scale(&e));
            }
        }
        out
    }

    /// `q ↦ 1/q` in every coefficient.
    pub fn substitute_invert_q(&self) -> Self {
        self.map(KElement::invert_q)
    }

    pub fn truncate(&self, max: u32) -> Self {
        self.filter(|m| m.degree() <= max)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        TSeries {
            cfg: self.cfg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Restriction to `u = 0`.
    pub fn at_u_zero(&self) -> Self {
        self.filter(|m| m.u_degree() == 0)
    }
}

/// Series with scalar rational-function coefficients, produced by pairings.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSeries<T: Scalar> {
    cfg: Arc<SeriesConfig>,
    terms: BTreeMap<Monomial, RatFunc<T>>,
}

impl<T: Scalar> ScalarSeries<T> {
    pub fn zero(cfg: &Arc<SeriesConfig>) -> Self {
        ScalarSeries {
            cfg: cfg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &Arc<SeriesConfig> {
        &self.cfg
    }

    pub fn insert(&mut self, mono: Monomial, c: RatFunc<T>) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mono) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(mono, sum);
        }
    }

    pub fn get(&self, mono: &Monomial) -> Option<&RatFunc<T>> {
        self.terms.get(mono)
    }

    pub fn coeff(&self, mono: &Monomial) -> RatFunc<T> {
        self.terms.get(mono).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RatFunc<T>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c);
        }
        out
    }
}

/// Monomial-by-monomial pairing `(F, G)_W`, truncated at `D_max`.
///
/// The caller applies [`TSeries::substitute_invert_q`] to `G` first when the
/// second slot is evaluated at `1/q`.
pub fn pair_series<T: Scalar>(f: &TSeries<T>, g: &TSeries<T>) -> Result<ScalarSeries<T>> {
    let max = f.dmax();
    pair_series_where(f, g, |m| m.degree() <= max)
}

/// [`pair_series`] restricted to product monomials accepted by `keep`.
pub fn pair_series_where<T: Scalar>(
    f: &TSeries<T>,
    g: &TSeries<T>,
    keep: impl Fn(&Monomial) -> bool,
) -> Result<ScalarSeries<T>> {
    f.check_compatible(g)?;
    let model = f.model();
    let mut out = ScalarSeries::zero(f.config());
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            if a.degree() + b.degree() > f.dmax() {
                continue;
            }
            let m = a.mul(b);
            if !keep(&m) {
                continue;
            }
            out.insert(m, pair(model, ca, cb)?);
        }
    }
    Ok(out)
}

/// A polynomial in power-sum symbols `p_1, …, p_B` with Adams operations
/// `Ψ^k : p_r ↦ p_{kr}`; symbols beyond the bound `B` are truncated to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaScalar<T: Scalar> {
    bound: usize,
    /// Exponent vector (index `r − 1` holds the power of `p_r`) to coefficient.
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> LambdaScalar<T> {
    pub fn constant(bound: usize, c: T) -> Self {
        let mut s = LambdaScalar {
            bound,
            terms: BTreeMap::new(),
        };
        s.insert(vec![0; bound], c);
        s
    }

    /// The generator `p_r`, or zero when `r` exceeds the bound.
    pub fn generator(bound: usize, r: usize) -> Self {
        let mut s = Self::constant(bound, T::zero());
        if (1..=bound).contains(&r) {
            let mut e = vec![0; bound];
            e[r - 1] = 1;
            s.insert(e, T::one());
        }
        s
    }

    fn insert(&mut self, e: Vec<u32>, c: T) {
        if c.is_zero() {
            return;
        }
        let mut sum = self.terms.remove(&e).unwrap_or_else(T::zero);
        sum += &c;
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::constant(self.bound, T::zero());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let mut c = ca.clone();
                c *= cb;
                out.insert(e, c);
            }
        }
        out
    }

    /// The ring homomorphism `Ψ^k`.
    pub fn adams(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut out = Self::constant(self.bound, T::zero());
        'terms: for (e, c) in &self.terms {
            let mut image = vec![0u32; self.bound];
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let r = (i + 1) * k;
                if r > self.bound {
                    continue 'terms;
                }
                image[r - 1] += p;
            }
            out.insert(image, c.clone());
        }
        out
    }
}

/// An unevaluated correlator `⟨φ_k/(1 − qL), φ_{a}L^{j}, … | φ_{l}, …⟩^ε`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorrelatorSymbol {
    /// State of the first insertion, which carries the descendant `1/(1 − qL)`.
    pub descendant_state: usize,
    /// Remaining insertions as `(state, L-exponent)`.
    pub insertions: Vec<(usize, i32)>,
    /// Light points.
    pub light: Vec<usize>,
    pub chamber: EpsilonChamber,
}

impl fmt::Display for CorrelatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<phi_{}/(1-qL)", self.descendant_state)?;
        for (k, j) in &self.insertions {
            write!(f, ", phi_{k} L^{j}")?;
        }
        write!(f, " |")?;
        for l in &self.light {
            write!(f, " phi_{l}")?;
        }
        write!(f, ">^{}", self.chamber)
    }
}
