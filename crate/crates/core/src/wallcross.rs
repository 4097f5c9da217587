//! Pole analysis of paired derivative series and the graded solver for the
//! `𝒦₋` tail determined by the no-pole condition.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::genfun::{pair_series, pair_series_where, Monomial, ScalarSeries, SeriesConfig, TSeries, Var};
use crate::ifunction::{hypergeometric_part, EpsilonChamber};
use crate::linalg::{SolveError, SparseSystem};
use crate::loopspace::{is_cone_shape, principal_parts, split, ConeShapeReport, KElement};
use crate::qalg::{cyclotomic, totient, Poly, RatFunc};
use crate::scalar::Scalar;
use crate::statespace::FermatModel;

/// Truncation of the solver: total degree, pole order, cyclotomic block bound
/// and the `t`-window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub dmax: u32,
    /// Largest pole exponent `j` (pole order `j + 1`).
    pub jmax: u32,
    /// Largest cyclotomic block index `n`.
    pub nmax: u32,
    pub window: (i32, i32),
}

impl Truncation {
    /// `J_max = D_max + 2`, `N_max = 2d`, window `[-2, 2]`.
    pub fn defaults(model: &FermatModel, dmax: u32) -> Self {
        Truncation {
            dmax,
            jmax: dmax + 2,
            nmax: 2 * model.d(),
            window: SeriesConfig::DEFAULT_WINDOW,
        }
    }
}

/// `numerator / Φ_n(x)^{j+1}` times `t^m u^n φ^s` in the `𝒦₋` tail.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCoefficient<T: Scalar> {
    pub block: u32,
    pub monomial: Monomial,
    pub pole: u32,
    /// The tail multiplies `φ^s = φ_{d−2−s}`.
    pub state: usize,
    /// Degree below `φ(block)`.
    pub numerator: Poly<T>,
}

impl<T: Scalar> TailCoefficient<T> {
    pub fn value(&self) -> RatFunc<T> {
        RatFunc::new_unchecked(
            self.numerator.clone(),
            cyclotomic::<T>(self.block).pow(self.pole + 1),
        )
    }

    pub fn element(&self, model: &FermatModel) -> Result<KElement<T>> {
        Ok(KElement::basis(model.dual_index(self.state)?, self.value()))
    }
}

/// Sums tail coefficients into a series.
pub fn tail_series<T: Scalar>(
    cfg: &Arc<SeriesConfig>,
    tail: &[TailCoefficient<T>],
) -> Result<TSeries<T>> {
    let mut s = TSeries::zero(cfg);
    for c in tail {
        s.insert(c.monomial.clone(), c.element(&cfg.model)?);
    }
    Ok(s)
}

/// Reads a `𝒦₋` series back into block-digit records, sorted canonically.
pub fn tail_coefficients<T: Scalar>(series: &TSeries<T>) -> Result<Vec<TailCoefficient<T>>> {
    let model = series.model();
    let mut out = Vec::new();
    for (mono, elem) in series.terms() {
        for (k, f) in elem.components() {
            let (plus, _) = split(f)?;
            if !plus.is_zero() {
                return Err(Error::Hypothesis(format!(
                    "tail coefficient of {mono} at phi_{k} is not in K_-"
                )));
            }
            let s = model.dual_index(k)?;
            for (n, digits) in principal_parts(f)? {
                for (j, a) in digits.into_iter().enumerate() {
                    if !a.is_zero() {
                        out.push(TailCoefficient {
                            block: n,
                            monomial: mono.clone(),
                            pole: j as u32,
                            state: s,
                            numerator: a,
                        });
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (&a.monomial, a.state, a.block, a.pole).cmp(&(&b.monomial, b.state, b.block, b.pole))
    });
    Ok(out)
}

/// Inputs of the solver.
///
/// The assembled series is
/// `F = explicit + t(1/q) + f(u, 1/q) + baseline + tail`, where `explicit` is
/// the hypergeometric line of the chamber (it carries `(1−q)φ₀`).
#[derive(Clone, Debug)]
pub struct SolverState<T: Scalar> {
    pub model: FermatModel,
    pub chamber: EpsilonChamber,
    pub truncation: Truncation,
    pub cfg: Arc<SeriesConfig>,
    pub explicit: TSeries<T>,
    /// `f(u, q)`; enters `F` at `1/q`.
    pub f: TSeries<T>,
    /// `F(t, 0, q)` beyond `(1−q)φ₀ + t(1/q)`.
    pub baseline: TSeries<T>,
    /// Required principal parts of the pairing series, keyed by `(r, s, μ)`.
    /// Absent keys mean "no pole".
    pub target: BTreeMap<(usize, usize, Monomial), RatFunc<T>>,
    pub tail: Vec<TailCoefficient<T>>,
}

impl<T: Scalar> SolverState<T> {
    pub fn new(model: FermatModel, chamber: EpsilonChamber, truncation: Truncation) -> Result<Self> {
        if truncation.window.0 > 0 || truncation.window.1 < 0 || truncation.window.0 > truncation.window.1 {
            return Err(Error::Hypothesis(format!(
                "t-window {:?} must contain 0",
                truncation.window
            )));
        }
        let cfg = SeriesConfig::new(model.clone(), truncation.window, truncation.dmax);
        let explicit = hypergeometric_part(&cfg, &chamber);
        Ok(SolverState {
            model,
            chamber,
            truncation,
            explicit,
            f: TSeries::zero(&cfg),
            baseline: TSeries::zero(&cfg),
            target: BTreeMap::new(),
            tail: Vec::new(),
            cfg,
        })
    }

    pub fn with_f(mut self, f: TSeries<T>) -> Result<Self> {
        self.f = f;
        self.validate()?;
        Ok(self)
    }

    pub fn with_baseline(mut self, baseline: TSeries<T>) -> Result<Self> {
        self.baseline = baseline;
        self.validate()?;
        Ok(self)
    }

    pub fn with_target(mut self, target: BTreeMap<(usize, usize, Monomial), RatFunc<T>>) -> Result<Self> {
        self.target = target;
        self.validate()?;
        Ok(self)
    }

    /// Checks the hypotheses on `f`, the baseline and the target.
    pub fn validate(&self) -> Result<()> {
        for s in [&self.explicit, &self.f, &self.baseline] {
            if s.config() != &self.cfg {
                return Err(Error::IncompatibleSeries);
            }
        }
        for (mono, elem) in self.f.terms() {
            if mono.u_degree() == 0 || mono.t_degree() > 0 {
                return Err(Error::Hypothesis(format!(
                    "f must depend on u only and vanish at u = 0; found {mono}"
                )));
            }
            elem.validate(&self.model)?;
            if elem.components().any(|(_, c)| !c.is_laurent()) {
                return Err(Error::Hypothesis(format!("f has a non-Laurent coefficient at {mono}")));
            }
        }
        for (mono, elem) in self.baseline.terms() {
            if mono.u_degree() > 0 || mono.degree() < 2 {
                return Err(Error::Hypothesis(format!(
                    "the baseline must be t-only of degree at least 2; found {mono}"
                )));
            }
            elem.validate(&self.model)?;
            if !elem.decompose()?.plus.is_zero() {
                return Err(Error::Hypothesis(format!("baseline coefficient at {mono} is not in K_-")));
            }
        }
        for ((r, s, mono), v) in &self.target {
            for k in [r, s] {
                if !self.model.is_narrow(*k) {
                    return Err(Error::NotNarrow { index: *k });
                }
            }
            if mono.degree() + 1 > self.cfg.dmax {
                return Err(Error::Hypothesis(format!("target monomial {mono} exceeds the truncation")));
            }
            if !split(v)?.0.is_zero() {
                return Err(Error::Hypothesis(format!("target at {mono} is not a principal part")));
            }
        }
        Ok(())
    }

    /// `F` with the tail replaced by `tail`.
    pub fn assemble_with(&self, tail: &TSeries<T>) -> TSeries<T> {
        self.explicit
            .add(&TSeries::t_inverse(&self.cfg))
            .add(&self.f.substitute_invert_q())
            .add(&self.baseline)
            .add(tail)
    }

    pub fn assemble(&self) -> Result<TSeries<T>> {
        Ok(self.assemble_with(&tail_series(&self.cfg, &self.tail)?))
    }

    fn target_at(&self, r: usize, s: usize, mono: &Monomial) -> RatFunc<T> {
        self.target
            .get(&(r, s, mono.clone()))
            .cloned()
            .unwrap_or_else(RatFunc::zero)
    }
}

/// `(∂_{u^r} F(q), ∂_{t_0^s} F(1/q))`, truncated.
pub fn pairing_series<T: Scalar>(f: &TSeries<T>, r: usize, s: usize) -> Result<ScalarSeries<T>> {
    let (a, b) = derivative_pair(f, r, s);
    pair_series(&a, &b)
}

fn derivative_pair<T: Scalar>(f: &TSeries<T>, r: usize, s: usize) -> (TSeries<T>, TSeries<T>) {
    (
        f.differentiate(Var::U { k: r }),
        f.differentiate(Var::T { k: s, j: 0 }).substitute_invert_q(),
    )
}

/// A pole at a cyclotomic block of a pairing coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PoleEntry {
    pub monomial: Monomial,
    pub block: u32,
    pub order: u32,
}

/// Result of [`check_no_pole`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NoPoleReport {
    /// Poles at blocks within the dictionary.
    pub violations: Vec<PoleEntry>,
    /// Poles at blocks beyond `N_max`.
    pub overflow: Vec<PoleEntry>,
    /// Coefficients with a denominator factor that is not cyclotomic.
    pub malformed: Vec<(Monomial, String)>,
}

impl NoPoleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.overflow.is_empty() && self.malformed.is_empty()
    }
}

/// Lists every root-of-unity pole; poles at `0` and `∞` are allowed.
pub fn check_no_pole<T: Scalar>(p: &ScalarSeries<T>, nmax: u32) -> NoPoleReport {
    let mut report = NoPoleReport::default();
    for (mono, c) in p.terms() {
        let fact = c.factorization();
        if !fact.is_complete() {
            report.malformed.push((mono.clone(), fact.remainder.to_string()));
        }
        for (&n, &order) in &fact.blocks {
            let entry = PoleEntry {
                monomial: mono.clone(),
                block: n,
                order,
            };
            if n > nmax {
                report.overflow.push(entry);
            } else {
                report.violations.push(entry);
            }
        }
    }
    report
}

/// One audited entry of the leading-coefficient law.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingCheck<T: Scalar> {
    /// The extended monomial `μ·u^r` whose coefficient is solved for.
    pub monomial: Monomial,
    pub r: usize,
    pub s: usize,
    /// `n^r + 1`, the multiplicity of `u^r` in the extended monomial.
    pub expected: T,
    /// Coefficient read off the probe.
    pub observed: T,
}

/// Output of [`solve_tail`].
#[derive(Clone, Debug)]
pub struct TailSolution<T: Scalar> {
    pub tail: Vec<TailCoefficient<T>>,
    pub series: TSeries<T>,
    /// Grades `(|n⃗|, |m⃗|)` processed, in order.
    pub grades: Vec<(u32, u32)>,
    pub leading_checks: Vec<LeadingCheck<T>>,
    pub equations: usize,
    pub unknowns: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Column {
    nu: usize,
    s: usize,
    block: u32,
    pole: u32,
    idx: usize,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={} block={} j={} x^{}", self.s, self.block, self.pole, self.idx)
    }
}

/// Digits of a principal part as `(block, pole, idx) ↦ value`, enforcing the
/// dictionary bounds.
fn digit_map<T: Scalar>(
    f: &RatFunc<T>,
    tr: &Truncation,
    mono: &Monomial,
) -> Result<BTreeMap<(u32, u32, usize), T>> {
    let mut out = BTreeMap::new();
    let parts = principal_parts(f).map_err(|e| match e {
        Error::NonDictionaryFactor(rest) => Error::NonDictionaryFactor(format!("{rest} at {mono}")),
        other => other,
    })?;
    for (n, digits) in parts {
        let order = digits.len() as u32;
        if n > tr.nmax || order > tr.jmax + 1 {
            return Err(Error::TruncationOverflow {
                monomial: mono.to_string(),
                block: n,
                order,
            });
        }
        for (j, a) in digits.iter().enumerate() {
            for (idx, c) in a.terms() {
                out.insert((n, j as u32, idx), c.clone());
            }
        }
    }
    Ok(out)
}

fn principal_part<T: Scalar>(f: &RatFunc<T>) -> Result<RatFunc<T>> {
    Ok(split(f)?.1)
}

/// Monomials of total degree below `D_max`, grouped by grade.
fn graded_monomials(cfg: &SeriesConfig) -> BTreeMap<(u32, u32), Vec<Monomial>> {
    let mut out: BTreeMap<(u32, u32), Vec<Monomial>> = BTreeMap::new();
    if cfg.dmax == 0 {
        return out;
    }
    for m in cfg.monomials_up_to(cfg.dmax - 1) {
        out.entry(m.grade()).or_default().push(m);
    }
    out
}

/// Solves for the tail grade by grade.
///
/// At grade `(a, b)` the coefficient of every `μ` of that grade in
/// `(∂_{u^r}F, ∂_{t_0^s}F(1/q))` is split into its principal parts. The
/// unknown tail at `ν = μ·u^r` enters through the constant term of
/// `∂_{t_0^s}F`, with coefficient read off a probe and audited against
/// `n^r + 1`; everything else is already known. The exact linear system of a
/// grade is solved as a whole, and the assembled series is re-checked at the
/// end.
pub fn solve_tail<T: Scalar>(state: &SolverState<T>) -> Result<TailSolution<T>> {
    state.validate()?;
    let cfg = &state.cfg;
    let tr = &state.truncation;
    let model = &state.model;
    let nar = cfg.narrow();
    let mut tail = tail_series(cfg, &state.tail)?;
    let mut grades = Vec::new();
    let mut leading_checks = Vec::new();
    let mut equations = 0;
    let mut unknowns = 0;

    let blocks: Vec<(u32, usize)> = (1..=tr.nmax).map(|n| (n, totient(n) as usize)).collect();

    for ((a, b), monos) in graded_monomials(cfg) {
        grades.push((a, b));
        let f = state.assemble_with(&tail);
        // Constant terms of ∂_{t_0^s}F(1/q), and the pairing coefficients at this grade.
        let mut g_const = BTreeMap::new();
        let mut known = BTreeMap::new();
        for &r in &nar {
            for &s in &nar {
                let (du, dt) = derivative_pair(&f, r, s);
                if r == nar[0] {
                    g_const.insert(s, dt.filter(|m| m.is_one()));
                }
                let p = pair_series_where(&du, &dt, |m| m.grade() == (a, b))?;
                known.insert((r, s), p);
            }
        }

        let mut nus: Vec<Monomial> = Vec::new();
        let mut nu_index: HashMap<Monomial, usize> = HashMap::new();
        for mu in &monos {
            for &r in &nar {
                let nu = mu.mul_var(Var::U { k: r });
                if nu.degree() >= 2 && !nu_index.contains_key(&nu) {
                    nu_index.insert(nu.clone(), nus.len());
                    nus.push(nu);
                }
            }
        }
        let mut cols: Vec<Column> = Vec::new();
        let mut col_index: HashMap<Column, usize> = HashMap::new();
        for nu in 0..nus.len() {
            for &s in &nar {
                for &(block, phi) in &blocks {
                    for pole in 0..=tr.jmax {
                        for idx in 0..phi {
                            let c = Column { nu, s, block, pole, idx };
                            col_index.insert(c, cols.len());
                            cols.push(c);
                        }
                    }
                }
            }
        }
        let mut system = SparseSystem::<T>::new(cols.len());
        let mut row_origin: Vec<(Monomial, usize, usize)> = Vec::new();

        for mu in &monos {
            for &r in &nar {
                let nu = mu.mul_var(Var::U { k: r });
                let has_unknown = nu_index.contains_key(&nu);
                // coefficient of the unknown (ν, s_col) in the (r, s_row) equation
                let mut probe: BTreeMap<(usize, usize), T> = BTreeMap::new();
                if has_unknown {
                    for &s_col in &nar {
                        let unit = TSeries::term(
                            cfg,
                            nu.clone(),
                            KElement::basis(model.dual_index(s_col)?, RatFunc::one()),
                        );
                        let d_unit = unit.differentiate(Var::U { k: r });
                        for &s_row in &nar {
                            let c = pair_series(&d_unit, &g_const[&s_row])?.coeff(mu);
                            if c.is_zero() {
                                continue;
                            }
                            let c = c.as_constant().ok_or_else(|| {
                                Error::Hypothesis(format!(
                                    "constant term of d/dt_0^{s_row} F depends on q"
                                ))
                            })?;
                            probe.insert((s_col, s_row), c);
                        }
                        let expected = T::from_i64(mu.exponent(Var::U { k: r }) as i64 + 1);
                        let observed = probe.get(&(s_col, s_col)).cloned().unwrap_or_else(T::zero);
                        if observed != expected {
                            return Err(Error::Hypothesis(format!(
                                "leading coefficient at {nu} (r = {r}, s = {s_col}) is {observed}, expected {expected}"
                            )));
                        }
                        leading_checks.push(LeadingCheck {
                            monomial: nu.clone(),
                            r,
                            s: s_col,
                            expected,
                            observed,
                        });
                    }
                }
                for &s in &nar {
                    let p = known[&(r, s)].coeff(mu);
                    let rhs = &state.target_at(r, s, mu) - &principal_part(&p)?;
                    if !has_unknown {
                        if !rhs.is_zero() {
                            return Err(Error::Insolvable {
                                monomial: mu.to_string(),
                                reason: format!(
                                    "pole {rhs} in the (r={r}, s={s}) pairing with no tail coefficient to absorb it"
                                ),
                            });
                        }
                        continue;
                    }
                    let nu_i = nu_index[&nu];
                    let digits = digit_map(&rhs, tr, &nu)?;
                    for &(block, phi) in &blocks {
                        for pole in 0..=tr.jmax {
                            for idx in 0..phi {
                                let entries = probe.iter().filter(|((_, s_row), _)| *s_row == s).map(
                                    |(&(s_col, _), c)| {
                                        let col = Column { nu: nu_i, s: s_col, block, pole, idx };
                                        (col_index[&col], c.clone())
                                    },
                                );
                                let value = digits
                                    .get(&(block, pole, idx))
                                    .cloned()
                                    .unwrap_or_else(T::zero);
                                system.push_row(entries, value);
                                row_origin.push((nu.clone(), r, s));
                            }
                        }
                    }
                }
            }
        }
        if cols.is_empty() {
            continue;
        }
        equations += system.n_rows();
        unknowns += cols.len();
        let values = system.solve().map_err(|e| match e {
            SolveError::Inconsistent { row } => {
                let (nu, r, s) = &row_origin[row];
                Error::Insolvable {
                    monomial: nu.to_string(),
                    reason: format!("inconsistent equations (first conflict at r = {r}, s = {s})"),
                }
            }
            SolveError::Singular { free } => {
                let c = cols[free[0]];
                Error::Insolvable {
                    monomial: nus[c.nu].to_string(),
                    reason: format!("{} undetermined unknowns, first {c}", free.len()),
                }
            }
        })?;
        let mut numerators: BTreeMap<(usize, usize, u32, u32), Vec<T>> = BTreeMap::new();
        for (c, v) in cols.iter().zip(values) {
            if v.is_zero() {
                continue;
            }
            let phi = totient(c.block) as usize;
            let slot = numerators
                .entry((c.nu, c.s, c.block, c.pole))
                .or_insert_with(|| vec![T::zero(); phi]);
            slot[c.idx] = v;
        }
        for ((nu, s, block, pole), coeffs) in numerators {
            let coef = TailCoefficient {
                block,
                monomial: nus[nu].clone(),
                pole,
                state: s,
                numerator: Poly::from_coeffs(coeffs),
            };
            tail.insert(coef.monomial.clone(), coef.element(model)?);
        }
    }

    // Final residual check on the assembled series.
    let f = state.assemble_with(&tail);
    for &r in &nar {
        for &s in &nar {
            let p = pairing_series(&f, r, s)?;
            let mut keys: Vec<Monomial> = p.terms().map(|(m, _)| m.clone()).collect();
            keys.extend(
                state
                    .target
                    .keys()
                    .filter(|(r2, s2, _)| (*r2, *s2) == (r, s))
                    .map(|(_, _, m)| m.clone()),
            );
            for mu in keys {
                if mu.degree() + 1 > cfg.dmax {
                    continue;
                }
                let pp = principal_part(&p.coeff(&mu))?;
                if pp != state.target_at(r, s, &mu) {
                    return Err(Error::Insolvable {
                        monomial: mu.to_string(),
                        reason: format!("residual principal part at r = {r}, s = {s} after solving"),
                    });
                }
            }
        }
    }
    Ok(TailSolution {
        tail: tail_coefficients(&tail)?,
        series: tail,
        grades,
        leading_checks,
        equations,
        unknowns,
    })
}

/// Outcome of [`verify_cone_point`].
#[derive(Clone, Debug)]
pub struct ConeVerification<T: Scalar> {
    pub passes: bool,
    pub shape: ConeShapeReport<T>,
    /// Pole reports per narrow `(r, s)`.
    pub poles: BTreeMap<(usize, usize), NoPoleReport>,
}

/// Cone shape plus the no-pole condition on every `(r, s)` pairing.
pub fn verify_cone_point<T: Scalar>(
    model: &FermatModel,
    nmax: u32,
    f: &TSeries<T>,
) -> Result<ConeVerification<T>> {
    let shape = is_cone_shape(model, f);
    let mut poles = BTreeMap::new();
    let nar = model.narrow_set().indices;
    for &r in &nar {
        for &s in &nar {
            poles.insert((r, s), check_no_pole(&pairing_series(f, r, s)?, nmax));
        }
    }
    let passes = shape.passes && poles.values().all(NoPoleReport::is_clean);
    Ok(ConeVerification {
        passes,
        shape,
        poles,
    })
}
