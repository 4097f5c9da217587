//! The loop space `𝒦` of narrow-state-valued rational functions of `q`, its
//! residue symplectic form and the polarization `𝒦 = 𝒦₊ ⊕ 𝒦₋`.

use std::collections::BTreeMap;
use std::ops::Add;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::genfun::TSeries;
use crate::qalg::ratfunc::product_residue_sum;
use crate::qalg::{Poly, RatFunc};
use crate::scalar::Scalar;
use crate::statespace::{FermatModel, StateVector};

/// A point of `𝒦`: `Σ_k f_k(q) φ_k`. Zero components are not stored.
///
/// Indices may leave the narrow sector while products are formed in the
/// extended ring; pairings and `omega` reject them.
#[derive(Clone, Debug, PartialEq)]
pub struct KElement<T: Scalar> {
    comps: BTreeMap<usize, RatFunc<T>>,
}

impl<T: Scalar> KElement<T> {
    pub fn zero() -> Self {
        KElement {
            comps: BTreeMap::new(),
        }
    }

    pub fn basis(k: usize, f: RatFunc<T>) -> Self {
        let mut e = Self::zero();
        e.set(k, f);
        e
    }

    pub fn set(&mut self, k: usize, f: RatFunc<T>) {
        if f.is_zero() {
            self.comps.remove(&k);
        } else {
            self.comps.insert(k, f);
        }
    }

    pub fn add_to(&mut self, k: usize, f: &RatFunc<T>) {
        let sum = match self.comps.get(&k) {
            Some(prev) => prev + f,
            None => f.clone(),
        };
        self.set(k, sum);
    }

    pub fn component(&self, k: usize) -> Option<&RatFunc<T>> {
        self.comps.get(&k)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &RatFunc<T>)> {
        self.comps.iter().map(|(&k, f)| (k, f))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn neg(&self) -> Self {
        KElement {
            comps: self.comps.iter().map(|(&k, f)| (k, -f)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self + &other.neg()
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn scale_by(&self, g: &RatFunc<T>) -> Self {
        self.map(|f| f * g)
    }

    pub fn map(&self, op: impl Fn(&RatFunc<T>) -> RatFunc<T>) -> Self {
        let mut out = Self::zero();
        for (&k, f) in &self.comps {
            out.set(k, op(f));
        }
        out
    }

    /// Product in the extended ring, `φ_i · φ_j = φ_{i+j mod d}`.
    pub fn mul(&self, other: &Self, model: &FermatModel) -> Self {
        let mut out = Self::zero();
        for (&i, a) in &self.comps {
            for (&j, b) in &other.comps {
                out.add_to(model.mult_index(i, j), &(a * b));
            }
        }
        out
    }

    /// Componentwise `q ↦ 1/q`.
    pub fn invert_q(&self) -> Self {
        self.map(RatFunc::invert_q)
    }

    pub fn as_state_vector(&self) -> StateVector<RatFunc<T>> {
        self.comps.iter().map(|(&k, f)| (k, f.clone())).collect()
    }

    /// Narrow support and poles only at `0`, roots of unity and `∞`.
    pub fn validate(&self, model: &FermatModel) -> Result<()> {
        for (&k, f) in &self.comps {
            if !model.is_narrow(k) {
                return Err(Error::NotNarrow { index: k });
            }
            let fact = f.factorization();
            if !fact.is_complete() {
                return Err(Error::NonDictionaryFactor(fact.remainder.to_string()));
            }
        }
        Ok(())
    }

    /// Splits every component into its `𝒦₊` and `𝒦₋` parts.
    pub fn decompose(&self) -> Result<KDecomposition<T>> {
        let mut plus = Self::zero();
        let mut minus = Self::zero();
        for (&k, f) in &self.comps {
            let (p, m) = split(f)?;
            plus.set(k, p);
            minus.set(k, m);
        }
        Ok(KDecomposition { plus, minus })
    }
}

impl<T: Scalar> Add<&KElement<T>> for &KElement<T> {
    type Output = KElement<T>;

    fn add(self, rhs: &KElement<T>) -> KElement<T> {
        let mut out = self.clone();
        for (&k, f) in &rhs.comps {
            out.add_to(k, f);
        }
        out
    }
}

impl<T: Scalar> Zero for KElement<T> {
    fn zero() -> Self {
        KElement::zero()
    }

    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

impl<T: Scalar> Add for KElement<T> {
    type Output = KElement<T>;

    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

/// `plus + minus` with `plus ∈ 𝒦₊` (Laurent polynomials) and `minus ∈ 𝒦₋`
/// (regular at `0`, vanishing at `∞`).
#[derive(Clone, Debug, PartialEq)]
pub struct KDecomposition<T: Scalar> {
    pub plus: KElement<T>,
    pub minus: KElement<T>,
}

/// `(plus, minus)` parts of one rational function.
pub fn split<T: Scalar>(f: &RatFunc<T>) -> Result<(RatFunc<T>, RatFunc<T>)> {
    if f.is_laurent() {
        return Ok((f.clone(), RatFunc::zero()));
    }
    let pf = f.partial_fractions()?;
    Ok((pf.plus(), pf.minus()))
}

/// Principal parts at the cyclotomic blocks in digit form: block `n` maps to
/// `[a_0, a_1, …]` with `minus = Σ_n Σ_j a_j / Φ_n^{j+1}` and `deg a_j < φ(n)`.
pub fn principal_parts<T: Scalar>(f: &RatFunc<T>) -> Result<BTreeMap<u32, Vec<Poly<T>>>> {
    if f.is_laurent() {
        return Ok(BTreeMap::new());
    }
    let pf = f.partial_fractions()?;
    Ok(pf.blocks.iter().map(|b| (b.n, b.digits())).collect())
}

/// `(f, g)_W` as a scalar rational function.
pub fn pair<T: Scalar>(model: &FermatModel, f: &KElement<T>, g: &KElement<T>) -> Result<RatFunc<T>> {
    model.pair_vectors(&f.as_state_vector(), &g.as_state_vector())
}

/// `Ω(f, g) = −[Res_{q=0} + Res_{q=∞}] (f(1/q), g(q))_W dq/q`.
pub fn omega<T: Scalar>(model: &FermatModel, f: &KElement<T>, g: &KElement<T>) -> Result<T> {
    f.validate(model)?;
    g.validate(model)?;
    let mut total = T::zero();
    for (k, fk) in f.components() {
        if let Some(gk) = g.component(model.dual_index(k)?) {
            total -= &product_residue_sum(&fk.invert_q(), gk);
        }
    }
    Ok(total)
}

/// Why a series fails the cone shape.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeDiagnostic {
    /// A coefficient could not be split; its denominator leaves the dictionary.
    Undecomposable { monomial: String, component: usize, detail: String },
    /// A `𝒦₋` part at total degree below two.
    LowDegreeTail { monomial: String, component: usize },
    /// The `u = 0` Laurent part differs from `t(1/q)`.
    InputMismatch { monomial: String, component: usize },
    /// A component outside the narrow sector.
    Broad { monomial: String, component: usize },
}

/// Outcome of the cone-shape check.
#[derive(Clone, Debug)]
pub struct ConeShapeReport<T: Scalar> {
    pub passes: bool,
    /// Laurent parts at positive `u`-degree, `t̂ − t` in the `q ↦ 1/q` frame.
    pub t_hat_minus_t: TSeries<T>,
    /// The `𝒦₋` parts.
    pub tail: TSeries<T>,
    pub diagnostics: Vec<ShapeDiagnostic>,
}

/// Checks that `F(t,u,q) − (1−q)φ₀` splits as `t(1/q) + O(u)` in `𝒦₊` plus a
/// `𝒦₋` tail of degree at least two in `t, u`.
pub fn is_cone_shape<T: Scalar>(model: &FermatModel, f: &TSeries<T>) -> ConeShapeReport<T> {
    let cfg = f.config().clone();
    let base = TSeries::dilaton_shift(&cfg).add(&TSeries::t_inverse(&cfg));
    let rest = f.sub(&base);
    let mut t_hat = TSeries::zero(&cfg);
    let mut tail = TSeries::zero(&cfg);
    let mut diagnostics = Vec::new();
    for (mono, elem) in rest.terms() {
        let name = mono.to_string();
        let mut plus = KElement::zero();
        let mut minus = KElement::zero();
        for (k, comp) in elem.components() {
            if !model.is_narrow(k) {
                diagnostics.push(ShapeDiagnostic::Broad { monomial: name.clone(), component: k });
                continue;
            }
            match split(comp) {
                Ok((p, m)) => {
                    plus.set(k, p);
                    minus.set(k, m);
                }
                Err(e) => diagnostics.push(ShapeDiagnostic::Undecomposable {
                    monomial: name.clone(),
                    component: k,
                    detail: e.to_string(),
                }),
            }
        }
        if mono.degree() < 2 {
            for (k, _) in minus.components() {
                diagnostics.push(ShapeDiagnostic::LowDegreeTail { monomial: name.clone(), component: k });
            }
        }
        if mono.u_degree() == 0 {
            for (k, _) in plus.components() {
                diagnostics.push(ShapeDiagnostic::InputMismatch { monomial: name.clone(), component: k });
            }
        } else {
            t_hat.insert(mono.clone(), plus);
        }
        tail.insert(mono.clone(), minus);
    }
    ConeShapeReport {
        passes: diagnostics.is_empty(),
        t_hat_minus_t: t_hat,
        tail,
        diagnostics,
    }
}
