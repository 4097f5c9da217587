//! Canonical JSON for models, rational functions, series and tails.
//!
//! Rationals are strings `"p/q"`, polynomial exponents are in units of `1/d`
//! (powers of `x = q^{1/d}`), and every object carrying exponents records `d`.
//! Objects are emitted with sorted keys.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::genfun::{Monomial, SeriesConfig, TSeries};
use crate::ifunction::HypergeometricTerm;
use crate::loopspace::KElement;
use crate::qalg::{Poly, RatFunc};
use crate::scalar::Scalar;
use crate::statespace::FermatModel;
use crate::wallcross::{TailCoefficient, Truncation};

fn err(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, found {v}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?} in {v}")))
}

fn as_u32(v: &Value) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| err("a non-negative integer", v))
}

fn as_i32(v: &Value) -> Result<i32> {
    v.as_i64()
        .and_then(|n| i32::try_from(n).ok())
        .ok_or_else(|| err("an integer", v))
}

fn as_obj(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| err("an object", v))
}

fn as_arr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| err("an array", v))
}

fn parse_key<K: FromStr>(k: &str) -> Result<K> {
    k.parse().map_err(|_| Error::Parse(format!("bad key {k:?}")))
}

pub fn encode_scalar<T: Scalar>(c: &T) -> Value {
    Value::String(c.to_string())
}

pub fn decode_scalar<T: Scalar>(v: &Value) -> Result<T> {
    let s = v.as_str().ok_or_else(|| err("a rational string", v))?;
    T::parse_str(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")))
}

pub fn encode_poly<T: Scalar>(p: &Poly<T>) -> Value {
    let map: Map<String, Value> = p
        .terms()
        .map(|(e, c)| (e.to_string(), encode_scalar(c)))
        .collect();
    Value::Object(map)
}

pub fn decode_poly<T: Scalar>(v: &Value) -> Result<Poly<T>> {
    let mut coeffs: BTreeMap<usize, T> = BTreeMap::new();
    for (k, c) in as_obj(v)? {
        coeffs.insert(parse_key(k)?, decode_scalar(c)?);
    }
    let deg = coeffs.keys().next_back().map_or(0, |&e| e + 1);
    let mut dense = vec![T::zero(); deg];
    for (e, c) in coeffs {
        dense[e] = c;
    }
    Ok(Poly::from_coeffs(dense))
}

pub fn encode_ratfunc<T: Scalar>(f: &RatFunc<T>, d: u32) -> Value {
    json!({ "num": encode_poly(f.num()), "den": encode_poly(f.den()), "d": d })
}

/// Returns the function and its recorded `d`.
pub fn decode_ratfunc<T: Scalar>(v: &Value) -> Result<(RatFunc<T>, u32)> {
    let f = RatFunc::new(decode_poly(field(v, "num")?)?, decode_poly(field(v, "den")?)?)?;
    Ok((f, as_u32(field(v, "d")?)?))
}

fn decode_ratfunc_in<T: Scalar>(v: &Value, d: u32) -> Result<RatFunc<T>> {
    let (f, d2) = decode_ratfunc(v)?;
    if d2 != d {
        return Err(Error::Parse(format!("exponent unit 1/{d2} does not match d = {d}")));
    }
    Ok(f)
}

pub fn encode_kelement<T: Scalar>(e: &KElement<T>, d: u32) -> Value {
    let map: Map<String, Value> = e
        .components()
        .map(|(k, f)| (k.to_string(), encode_ratfunc(f, d)))
        .collect();
    Value::Object(map)
}

pub fn decode_kelement<T: Scalar>(v: &Value, d: u32) -> Result<KElement<T>> {
    let mut e = KElement::zero();
    for (k, f) in as_obj(v)? {
        e.add_to(parse_key(k)?, &decode_ratfunc_in(f, d)?);
    }
    Ok(e)
}

pub fn encode_model(m: &FermatModel) -> Value {
    json!({ "d": m.d(), "weights": m.weights(), "name": m.name() })
}

pub fn decode_model(v: &Value) -> Result<FermatModel> {
    let d = as_u32(field(v, "d")?)?;
    let weights = as_arr(field(v, "weights")?)?
        .iter()
        .map(as_u32)
        .collect::<Result<Vec<_>>>()?;
    let m = FermatModel::new(d, weights)?;
    Ok(match v.get("name").and_then(Value::as_str) {
        Some(n) => m.with_name(n),
        None => m,
    })
}

pub fn encode_tseries<T: Scalar>(s: &TSeries<T>) -> Value {
    let cfg = s.config();
    let d = cfg.d();
    let terms: Map<String, Value> = s
        .terms()
        .map(|(m, e)| (m.to_string(), encode_kelement(e, d)))
        .collect();
    json!({
        "d": d,
        "dmax": cfg.dmax,
        "window": [cfg.window.0, cfg.window.1],
        "nar": cfg.narrow(),
        "terms": terms,
    })
}

/// Decodes a series against `model`, checking the recorded `d` and narrow set.
pub fn decode_tseries<T: Scalar>(v: &Value, model: &FermatModel) -> Result<TSeries<T>> {
    let d = as_u32(field(v, "d")?)?;
    if d != model.d() {
        return Err(Error::Parse(format!("series has d = {d}, model has d = {}", model.d())));
    }
    if let Some(nar) = v.get("nar") {
        let nar: Vec<usize> = as_arr(nar)?
            .iter()
            .map(|x| as_u32(x).map(|n| n as usize))
            .collect::<Result<_>>()?;
        if nar != model.narrow_set().indices {
            return Err(Error::Parse("narrow set does not match the model".into()));
        }
    }
    let w = as_arr(field(v, "window")?)?;
    if w.len() != 2 {
        return Err(err("a window [lo, hi]", field(v, "window")?));
    }
    let window = (as_i32(&w[0])?, as_i32(&w[1])?);
    if window.0 > window.1 {
        return Err(Error::Parse(format!("empty window {window:?}")));
    }
    let cfg = SeriesConfig::new(model.clone(), window, as_u32(field(v, "dmax")?)?);
    decode_terms(field(v, "terms")?, &cfg)
}

/// Decodes a `terms` object into a series with the given configuration.
pub fn decode_terms<T: Scalar>(v: &Value, cfg: &std::sync::Arc<SeriesConfig>) -> Result<TSeries<T>> {
    let mut s = TSeries::zero(cfg);
    for (k, e) in as_obj(v)? {
        let mono: Monomial = k.parse()?;
        for (var, _) in mono.factors() {
            cfg.check_var(*var)?;
        }
        if mono.degree() > cfg.dmax {
            return Err(Error::Parse(format!("monomial {mono} exceeds dmax = {}", cfg.dmax)));
        }
        let elem = decode_kelement(e, cfg.d())?;
        elem.validate(&cfg.model)?;
        s.insert(mono, elem);
    }
    Ok(s)
}

pub fn encode_tail_coefficient<T: Scalar>(c: &TailCoefficient<T>, d: u32) -> Value {
    json!({
        "block": c.block,
        "monomial": c.monomial.to_string(),
        "pole": c.pole,
        "state": c.state,
        "numerator": encode_poly(&c.numerator),
        "d": d,
    })
}

pub fn decode_tail_coefficient<T: Scalar>(v: &Value, model: &FermatModel) -> Result<TailCoefficient<T>> {
    let d = as_u32(field(v, "d")?)?;
    if d != model.d() {
        return Err(Error::Parse(format!("tail coefficient has d = {d}, model has d = {}", model.d())));
    }
    let block = as_u32(field(v, "block")?)?;
    if block == 0 {
        return Err(Error::Parse("block index must be positive".into()));
    }
    let numerator: Poly<T> = decode_poly(field(v, "numerator")?)?;
    if numerator.degree().unwrap_or(0) >= crate::qalg::totient(block) as usize && !numerator.is_zero() {
        return Err(Error::Parse(format!("numerator degree too large for block {block}")));
    }
    let state = as_u32(field(v, "state")?)? as usize;
    model.dual_index(state)?;
    let monomial: Monomial = field(v, "monomial")?
        .as_str()
        .ok_or_else(|| err("a monomial string", v))?
        .parse()?;
    Ok(TailCoefficient {
        block,
        monomial,
        pole: as_u32(field(v, "pole")?)?,
        state,
        numerator,
    })
}

/// A solved tail with the truncation it was solved under.
pub fn encode_tail<T: Scalar>(model: &FermatModel, tr: &Truncation, tail: &[TailCoefficient<T>]) -> Value {
    json!({
        "d": model.d(),
        "model": encode_model(model),
        "dmax": tr.dmax,
        "jmax": tr.jmax,
        "nmax": tr.nmax,
        "window": [tr.window.0, tr.window.1],
        "coefficients": tail.iter().map(|c| encode_tail_coefficient(c, model.d())).collect::<Vec<_>>(),
    })
}

pub fn decode_tail<T: Scalar>(v: &Value) -> Result<(FermatModel, Truncation, Vec<TailCoefficient<T>>)> {
    let model = decode_model(field(v, "model")?)?;
    let w = as_arr(field(v, "window")?)?;
    if w.len() != 2 {
        return Err(err("a window [lo, hi]", field(v, "window")?));
    }
    let tr = Truncation {
        dmax: as_u32(field(v, "dmax")?)?,
        jmax: as_u32(field(v, "jmax")?)?,
        nmax: as_u32(field(v, "nmax")?)?,
        window: (as_i32(&w[0])?, as_i32(&w[1])?),
    };
    let coeffs = as_arr(field(v, "coefficients")?)?
        .iter()
        .map(|c| decode_tail_coefficient(c, &model))
        .collect::<Result<Vec<_>>>()?;
    Ok((model, tr, coeffs))
}

pub fn encode_hypergeometric_term<T: Scalar>(t: &HypergeometricTerm<T>, d: u32) -> Value {
    let multi: Map<String, Value> = t
        .multi_index
        .iter()
        .map(|&(i, a)| (i.to_string(), json!(a)))
        .collect();
    let b_lists: Vec<Vec<String>> = t
        .b_lists
        .iter()
        .map(|bs| bs.iter().map(|b| b.to_string()).collect())
        .collect();
    json!({
        "multi_index": multi,
        "state": t.state,
        "narrow": t.narrow,
        "b_lists": b_lists,
        "coefficient": encode_ratfunc(&t.coefficient, d),
        "monomial": t.monomial.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::Var;
    use crate::Rat;

    fn x(k: i64) -> RatFunc<Rat> {
        RatFunc::monomial(Rat::from_i64(1), k)
    }

    #[test]
    fn scalar_and_poly_round_trip() {
        let p = Poly::<Rat>::from_coeffs(vec![Rat::new(1.into(), 3.into()), Rat::from_i64(0), Rat::from_i64(-7)]);
        let v = encode_poly(&p);
        assert_eq!(v.to_string(), r#"{"0":"1/3","2":"-7"}"#);
        assert_eq!(decode_poly::<Rat>(&v).unwrap(), p);
        assert!(decode_poly::<Rat>(&json!({"a": "1"})).is_err());
        assert!(decode_poly::<Rat>(&json!({"0": "1/0"})).is_err());
    }

    #[test]
    fn model_round_trip() {
        let m = FermatModel::new(8, vec![4, 2, 1, 1]).unwrap().with_name("mixed");
        assert_eq!(decode_model(&encode_model(&m)).unwrap(), m);
        assert_eq!(
            decode_model(&json!({"d": 6, "weights": [4]})),
            Err(Error::NotFermat { d: 6, weight: 4 })
        );
    }

    #[test]
    fn series_round_trip() {
        let m = FermatModel::quintic();
        let cfg = SeriesConfig::new(m.clone(), (-1, 1), 2);
        let f = (&RatFunc::one() - &x(5)).recip().unwrap();
        let mut s = TSeries::<Rat>::dilaton_shift(&cfg).add(&TSeries::t_inverse(&cfg));
        s.insert(
            Monomial::from_pairs([(Var::U { k: 1 }, 1), (Var::T { k: 2, j: -1 }, 1)]),
            KElement::basis(3, &f * &x(-2)),
        );
        let v = encode_tseries(&s);
        let back: TSeries<Rat> = decode_tseries(&v, &m).unwrap();
        assert_eq!(back, s);
        assert_eq!(encode_tseries(&back).to_string(), v.to_string());
        assert!(decode_tseries::<Rat>(&v, &FermatModel::cubic()).is_err());
    }

    #[test]
    fn tail_round_trip() {
        let m = FermatModel::cubic();
        let tr = Truncation::defaults(&m, 2);
        let c = TailCoefficient {
            block: 6,
            monomial: Monomial::from_pairs([(Var::U { k: 0 }, 2)]),
            pole: 1,
            state: 1,
            numerator: Poly::from_i64(&[2, -1]),
        };
        let v = encode_tail(&m, &tr, std::slice::from_ref(&c));
        let (m2, tr2, cs) = decode_tail::<Rat>(&v).unwrap();
        assert_eq!((m2, tr2, cs), (m, tr, vec![c]));
    }
}
