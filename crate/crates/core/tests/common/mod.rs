//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use kwall_core::genfun::{pair_series, Monomial, SeriesConfig, TSeries, Var};
use kwall_core::loopspace::{principal_parts, split, KElement};
use kwall_core::qalg::{cyclotomic, divisors, totient, Poly, RatFunc};
use kwall_core::statespace::FermatModel;
use kwall_core::ifunction::{hypergeometric_terms, EpsilonChamber};
use kwall_core::wallcross::{pairing_series, tail_series, SolverState, TailCoefficient, Truncation};
use kwall_core::{Rat, Scalar, Series};
use num_integer::Integer;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type R = RatFunc<Rat>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(n: i64) -> Rat {
    Rat::from_i64(n)
}

pub fn x_pow(k: i64) -> R {
    R::monomial(int(1), k)
}

pub fn one_minus_x(k: usize) -> R {
    R::from_poly(Poly::one_minus_x_pow(k))
}

/// A random Fermat model with `d ≤ d_max`: weights are divisors of `d`, and
/// a weight of 1 is forced when the gcd condition would fail.
pub fn random_fermat_model(rng: &mut ChaCha8Rng, d_max: u32) -> FermatModel {
    let d = rng.gen_range(1..=d_max);
    let divs = divisors(d);
    let n = rng.gen_range(1..=5);
    let mut weights: Vec<u32> = (0..n).map(|_| *divs.choose(rng).unwrap()).collect();
    if weights.iter().fold(d, |g, &w| g.gcd(&w)) != 1 {
        weights[0] = 1;
    }
    FermatModel::new(d, weights).expect("generated model is Fermat")
}

pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, range: i64) -> Poly<Rat> {
    let deg = rng.gen_range(0..=max_deg);
    Poly::from_coeffs(
        (0..=deg)
            .map(|_| Rat::new(rng.gen_range(-range..=range).into(), rng.gen_range(1..=3i64).into()))
            .collect(),
    )
}

/// A random rational function with poles only at 0, roots of unity of order
/// at most `max_block`, and ∞.
pub fn random_dictionary_ratfunc(rng: &mut ChaCha8Rng, max_block: u32) -> R {
    let num = random_poly(rng, 8, 5);
    let mut den = Poly::x_pow(rng.gen_range(0..=3));
    for _ in 0..rng.gen_range(0..=3) {
        let n = rng.gen_range(1..=max_block);
        den = &den * &cyclotomic::<Rat>(n).pow(rng.gen_range(1..=2));
    }
    R::new(num, den).unwrap()
}

pub fn random_kelement(rng: &mut ChaCha8Rng, model: &FermatModel, max_block: u32) -> KElement<Rat> {
    let mut e = KElement::zero();
    for k in model.narrow_set().indices {
        if rng.gen_bool(0.7) {
            e.set(k, random_dictionary_ratfunc(rng, max_block));
        }
    }
    e
}

/// Coefficient of `x^k` in the expansion of `num/den` at `x = 0`, by naive
/// power-series inversion.
pub fn naive_laurent_coeff(num: &[Rat], den: &[Rat], k: i64) -> Rat {
    let v = den.iter().position(|c| !c.is_zero()).expect("nonzero denominator") as i64;
    let d0 = &den[v as usize..];
    let want = k + v;
    if want < 0 {
        return int(0);
    }
    let want = want as usize;
    let mut inv = vec![int(0); want + 1];
    inv[0] = Rat::from_i64(1) / d0[0].clone();
    for m in 1..=want {
        let mut acc = int(0);
        for i in 1..=m.min(d0.len() - 1) {
            acc += &(d0[i].clone() * inv[m - i].clone());
        }
        inv[m] = -(acc / d0[0].clone());
    }
    let mut out = int(0);
    for (i, a) in num.iter().enumerate() {
        if i <= want {
            out += &(a.clone() * inv[want - i].clone());
        }
    }
    out
}

fn reversed_padded(p: &[Rat], len: usize) -> Vec<Rat> {
    let mut v = p.to_vec();
    v.resize(len, int(0));
    v.reverse();
    v
}

/// `Ω(f, g)` from naive Laurent expansions at 0 and ∞ of each component product.
pub fn omega_by_expansion(model: &FermatModel, f: &KElement<Rat>, g: &KElement<Rat>) -> Rat {
    let d = model.d() as usize;
    let mut total = int(0);
    for (k, fk) in f.components() {
        let Some(gk) = g.component(d - 2 - k) else { continue };
        // f(1/x) = x^{df−nf} · rev(nf)/rev(df), multiplied by g(x).
        let (fn_, fd) = (fk.num().coeffs(), fk.den().coeffs());
        let shift = fd.len() as i64 - fn_.len() as i64;
        let a = Poly::from_coeffs(reversed_padded(fn_, fn_.len()));
        let b = Poly::from_coeffs(reversed_padded(fd, fd.len()));
        let num = &a * gk.num();
        let den = &b * gk.den();
        // h(x) = x^shift · num/den
        let (hn, hd) = if shift >= 0 {
            (num.shift_up(shift as usize), den)
        } else {
            (num, den.shift_up((-shift) as usize))
        };
        let res0 = naive_laurent_coeff(hn.coeffs(), hd.coeffs(), 0);
        // h(1/x) = x^{deg hd − deg hn} rev(hn)/rev(hd)
        let s2 = hd.coeffs().len() as i64 - hn.coeffs().len() as i64;
        let rn = reversed_padded(hn.coeffs(), hn.coeffs().len());
        let rd = reversed_padded(hd.coeffs(), hd.coeffs().len());
        let res_inf = -naive_laurent_coeff(&rn, &rd, -s2);
        total += &(-(res0 + res_inf));
    }
    total
}

/// `Ω(f, g)` as minus the value at `q = 0` of the `𝒦₋` part of the pairing.
pub fn omega_by_polarization(model: &FermatModel, f: &KElement<Rat>, g: &KElement<Rat>) -> Rat {
    let h = model
        .pair_vectors(&f.invert_q().as_state_vector(), &g.as_state_vector())
        .unwrap();
    let (_, minus) = split(&h).unwrap();
    -minus.eval(&int(0)).unwrap()
}

/// Digits of the principal parts as `(block, pole, idx) ↦ value`.
pub fn digits(f: &R) -> BTreeMap<(u32, u32, usize), Rat> {
    let mut out = BTreeMap::new();
    for (n, ds) in principal_parts(f).unwrap() {
        for (j, a) in ds.iter().enumerate() {
            for (idx, c) in a.terms() {
                out.insert((n, j as u32, idx), c.clone());
            }
        }
    }
    out
}

/// A random `t`-only baseline of degree 2 with `𝒦₋` coefficients.
pub fn random_baseline(rng: &mut ChaCha8Rng, cfg: &std::sync::Arc<SeriesConfig>, terms: usize, max_block: u32) -> Series {
    let t_vars = cfg.t_vars();
    let nar = cfg.narrow();
    let mut s = TSeries::zero(cfg);
    for _ in 0..terms {
        let a = *t_vars.choose(rng).unwrap();
        let b = *t_vars.choose(rng).unwrap();
        let k = *nar.choose(rng).unwrap();
        let n = rng.gen_range(1..=max_block);
        let j = rng.gen_range(0..=1u32);
        let phi = totient(n) as usize;
        let num = Poly::from_coeffs((0..phi).map(|_| int(rng.gen_range(-3..=3))).collect());
        let v = R::new(num, cyclotomic::<Rat>(n).pow(j + 1)).unwrap();
        s.insert(Monomial::from_pairs([(a, 1), (b, 1)]), KElement::basis(k, v));
    }
    s
}

/// A random Laurent `f(u, q)` linear in `u`.
pub fn random_f(rng: &mut ChaCha8Rng, cfg: &std::sync::Arc<SeriesConfig>) -> Series {
    let mut s = TSeries::zero(cfg);
    for u in cfg.u_vars() {
        for k in cfg.narrow() {
            if rng.gen_bool(0.3) {
                let c = int(rng.gen_range(-2..=2));
                s.insert(Monomial::var(u), KElement::basis(k, R::monomial(c, rng.gen_range(-3..=3))));
            }
        }
    }
    s
}

/// A random admissible tail: degree 2, `u`-degree at least 1.
pub fn random_tail(
    rng: &mut ChaCha8Rng,
    cfg: &std::sync::Arc<SeriesConfig>,
    count: usize,
    nmax: u32,
    jmax: u32,
) -> Vec<TailCoefficient<Rat>> {
    let vars = cfg.variables();
    let us = cfg.u_vars();
    let nar = cfg.narrow();
    let mut out = Vec::new();
    for _ in 0..count {
        let u = *us.choose(rng).unwrap();
        let other = *vars.choose(rng).unwrap();
        let block = rng.gen_range(1..=nmax);
        let phi = totient(block) as usize;
        let mut coeffs: Vec<Rat> = (0..phi).map(|_| int(rng.gen_range(-4..=4))).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            coeffs[0] = int(1);
        }
        out.push(TailCoefficient {
            block,
            monomial: Monomial::from_pairs([(u, 1), (other, 1)]),
            pole: rng.gen_range(0..=jmax),
            state: *nar.choose(rng).unwrap(),
            numerator: Poly::from_coeffs(coeffs),
        });
    }
    out
}

/// Principal parts of the pairing coefficients of `F` below the truncation.
pub fn pairing_principal_parts(f: &Series) -> BTreeMap<(usize, usize, Monomial), R> {
    let nar = f.config().narrow();
    let dmax = f.config().dmax;
    let mut out = BTreeMap::new();
    for &r in &nar {
        for &s in &nar {
            for (mu, c) in pairing_series(f, r, s).unwrap().terms() {
                if mu.degree() + 1 > dmax {
                    continue;
                }
                let (_, minus) = split(c).unwrap();
                if !minus.is_zero() {
                    out.insert((r, s, mu.clone()), minus);
                }
            }
        }
    }
    out
}

/// Solves for the whole tail at once: every candidate coefficient with
/// degree 2 to `D_max`, block ≤ `N_max` and pole ≤ `J_max` is an unknown, and
/// every digit of every pairing principal part is an equation. The pairing is
/// affine in the tail as long as `D_max ≤ 2`.
pub fn dense_oracle(st: &SolverState<Rat>) -> Result<Series, String> {
    let cfg = &st.cfg;
    let tr = &st.truncation;
    assert!(tr.dmax <= 2, "the dense oracle is linear only up to D_max = 2");
    let nar = cfg.narrow();
    let d = cfg.d() as usize;
    let f0 = st.assemble_with(&TSeries::zero(cfg));

    let nus: Vec<Monomial> = cfg
        .monomials_up_to(tr.dmax)
        .into_iter()
        .filter(|m| m.u_degree() >= 1 && m.degree() >= 2)
        .collect();
    let mut cols = Vec::new();
    for nu in &nus {
        for &s in &nar {
            for n in 1..=tr.nmax {
                for j in 0..=tr.jmax {
                    for idx in 0..totient(n) as usize {
                        cols.push((nu.clone(), s, n, j, idx));
                    }
                }
            }
        }
    }

    let du0: BTreeMap<usize, Series> = nar.iter().map(|&r| (r, f0.differentiate(Var::U { k: r }))).collect();
    let dt0: BTreeMap<usize, Series> = nar
        .iter()
        .map(|&s| (s, f0.differentiate(Var::T { k: s, j: 0 }).substitute_invert_q()))
        .collect();

    type Key = (usize, usize, Monomial, u32, u32, usize);
    let mut rows: BTreeMap<Key, (Vec<(usize, Rat)>, Rat)> = BTreeMap::new();
    // right-hand sides: target − PP(pairing of F0)
    for &r in &nar {
        for &s in &nar {
            let p0 = pair_series(&du0[&r], &dt0[&s]).unwrap();
            let mut monos: Vec<Monomial> = p0.terms().map(|(m, _)| m.clone()).collect();
            monos.extend(st.target.keys().filter(|k| (k.0, k.1) == (r, s)).map(|k| k.2.clone()));
            for mu in monos {
                if mu.degree() + 1 > tr.dmax {
                    continue;
                }
                let target = st.target.get(&(r, s, mu.clone())).cloned().unwrap_or_else(R::zero);
                let rhs = &target - &split(&p0.coeff(&mu)).unwrap().1;
                for ((n, j, idx), v) in digits(&rhs) {
                    rows.entry((r, s, mu.clone(), n, j, idx)).or_insert_with(|| (Vec::new(), int(0))).1 = v;
                }
            }
        }
    }
    for (ci, (nu, s, n, j, idx)) in cols.iter().enumerate() {
        let value = R::new(Poly::x_pow(*idx), cyclotomic::<Rat>(*n).pow(j + 1)).unwrap();
        let e = TSeries::term(cfg, nu.clone(), KElement::basis(d - 2 - s, value));
        for &r in &nar {
            let due = e.differentiate(Var::U { k: r });
            for &s2 in &nar {
                let dte = e.differentiate(Var::T { k: s2, j: 0 }).substitute_invert_q();
                if due.is_zero() && dte.is_zero() {
                    continue;
                }
                let a = pair_series(&due, &dt0[&s2]).unwrap();
                let b = pair_series(&du0[&r], &dte).unwrap();
                let lin = a.add(&b);
                for (mu, c) in lin.terms() {
                    if mu.degree() + 1 > tr.dmax {
                        continue;
                    }
                    for (key, v) in digits(c) {
                        rows.entry((r, s2, mu.clone(), key.0, key.1, key.2))
                            .or_insert_with(|| (Vec::new(), int(0)))
                            .0
                            .push((ci, v));
                    }
                }
            }
        }
    }
    let mut system = kwall_core::linalg::SparseSystem::new(cols.len());
    for (_, (entries, rhs)) in rows {
        system.push_row(entries, rhs);
    }
    let values = system.solve().map_err(|e| format!("{e:?}"))?;
    let mut tail = Vec::new();
    let mut nums: BTreeMap<(Monomial, usize, u32, u32), Vec<Rat>> = BTreeMap::new();
    for ((nu, s, n, j, idx), v) in cols.into_iter().zip(values) {
        if v.is_zero() {
            continue;
        }
        nums.entry((nu, s, n, j)).or_insert_with(|| vec![int(0); totient(n) as usize])[idx] = v;
    }
    for ((nu, s, n, j), c) in nums {
        tail.push(TailCoefficient {
            block: n,
            monomial: nu,
            pole: j,
            state: s,
            numerator: Poly::from_coeffs(c),
        });
    }
    Ok(tail_series(cfg, &tail).unwrap())
}

/// Solver state with the small truncation used for dense comparisons.
pub fn oracle_state(model: FermatModel, eps: &str) -> SolverState<Rat> {
    let mut tr = Truncation::defaults(&model, 2);
    tr.window = (0, 0);
    tr.nmax = model.d();
    tr.jmax = 3;
    SolverState::new(model, eps.parse().unwrap(), tr).unwrap()
}

pub fn hypergeometric_f(st: &SolverState<Rat>) -> Series {
    let mut f = TSeries::zero(&st.cfg);
    for t in hypergeometric_terms::<Rat>(&st.model, &EpsilonChamber::Infinite, 1) {
        if t.total() == 1 && t.coefficient.is_laurent() {
            f.insert(t.monomial, KElement::basis(t.state, t.coefficient));
        }
    }
    f
}

/// Instances for the graded/dense comparison: trivial inputs, the
/// hypergeometric `f`, a manufactured target, and unconstrained random data.
pub fn oracle_instances(model: FermatModel, eps: &str, seed: u64) -> Vec<(&'static str, SolverState<Rat>)> {
    let mut g = rng(seed);
    let d = model.d();
    let base = oracle_state(model, eps);
    let f = hypergeometric_f(&base);
    let hyper = base.clone().with_f(f).unwrap();

    let b = random_baseline(&mut g, &base.cfg, 3, d);
    let f = random_f(&mut g, &base.cfg);
    let st = base.clone().with_baseline(b).unwrap().with_f(f).unwrap();
    let t_star = tail_series(&st.cfg, &random_tail(&mut g, &st.cfg, 4, d, 3)).unwrap();
    let target = pairing_principal_parts(&st.assemble_with(&t_star));
    let manufactured = st.with_target(target).unwrap();

    let b = random_baseline(&mut g, &base.cfg, 2, d);
    let f = random_f(&mut g, &base.cfg);
    let random = base.clone().with_baseline(b).unwrap().with_f(f).unwrap();
    vec![("zero", base), ("hypergeometric f", hyper), ("manufactured", manufactured), ("random", random)]
}
