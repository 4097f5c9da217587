use std::path::{Path, PathBuf};
use std::sync::Arc;

use kwall_core::codec::{
    decode_kelement, decode_model, decode_terms, decode_tseries, encode_hypergeometric_term,
    encode_kelement, encode_model, encode_ratfunc, encode_scalar, encode_tail, encode_tseries,
};
use kwall_core::genfun::{SeriesConfig, TSeries};
use kwall_core::ifunction::{cech_rank, hypergeometric_terms, j_infinity_explicit, unstable_contribution, EpsilonChamber};
use kwall_core::loopspace::{omega as omega_form, ShapeDiagnostic};
use kwall_core::qalg::{aggregate_node_factor, node_factor_from_ghosts, verify_ghost_identity};
use kwall_core::statespace::FermatModel;
use kwall_core::wallcross::{solve_tail, verify_cone_point, NoPoleReport, PoleEntry, SolverState, Truncation};
use kwall_core::{Error, Rat, Series};
use serde_json::{json, Value};

use crate::{read_json, resolve_nmax, text, write_json, CliError, Output};

fn load_model(path: &Path) -> Result<FermatModel, CliError> {
    Ok(decode_model(&read_json(path)?)?)
}

fn chamber(eps: &str) -> Result<EpsilonChamber, CliError> {
    Ok(eps.parse()?)
}

fn ok(json: Value, text: String) -> Result<Output, CliError> {
    Ok(Output { json, text, failure: None })
}

pub fn model_validate(path: &Path) -> Result<Output, CliError> {
    let m = load_model(path)?;
    let nar = m.narrow_set().indices;
    let dual: serde_json::Map<String, Value> = nar
        .iter()
        .map(|&k| Ok((k.to_string(), json!(m.dual_index(k)?))))
        .collect::<Result<_, Error>>()?;
    let json = json!({
        "model": encode_model(&m),
        "charges": m.charges().iter().map(encode_scalar).collect::<Vec<_>>(),
        "total_charge": encode_scalar(&m.total_charge()),
        "nar": nar,
        "dual": dual,
    });
    let text = text::model(&m);
    ok(json, text)
}

pub fn ifun(path: &Path, eps: &str, dmax: u32) -> Result<Output, CliError> {
    let m = load_model(path)?;
    let ch = chamber(eps)?;
    let terms = hypergeometric_terms::<Rat>(&m, &ch, dmax);
    let json = json!({
        "d": m.d(),
        "eps": ch.to_string(),
        "cap": ch.cap(),
        "dmax": dmax,
        "terms": terms.iter().map(|t| encode_hypergeometric_term(t, m.d())).collect::<Vec<_>>(),
    });
    let text = text::ifun(&ch, &terms);
    ok(json, text)
}

pub fn jinf(path: &Path, dmax: u32, window: (i32, i32)) -> Result<Output, CliError> {
    let m = load_model(path)?;
    let cfg = SeriesConfig::new(m, window, dmax);
    let j = j_infinity_explicit::<Rat>(&cfg);
    let placeholders: Vec<String> = j.placeholders.iter().map(ToString::to_string).collect();
    let json = json!({ "series": encode_tseries(&j.series), "placeholders": placeholders });
    let text = format!("{}placeholders: {}\n", text::series(&j.series), placeholders.len());
    ok(json, text)
}

pub fn unstable(path: &Path, eps: &str, r: usize, l0: &[usize]) -> Result<Output, CliError> {
    let m = load_model(path)?;
    let ch = chamber(eps)?;
    let u = unstable_contribution::<Rat>(&m, &ch, r, l0)?;
    let cech = (0..m.n_vars())
        .map(|j| cech_rank(&m, j, r, l0))
        .collect::<Result<Vec<_>, _>>()?;
    let b_lists: Vec<Vec<String>> = u.b_lists.iter().map(|bs| bs.iter().map(ToString::to_string).collect()).collect();
    let json = json!({
        "d": m.d(),
        "r": r,
        "l0": l0,
        "state": u.state,
        "monomial": u.monomial.to_string(),
        "b_lists": b_lists,
        "coefficient": encode_ratfunc(&u.coefficient, m.d()),
        "cech": cech,
    });
    let text = format!(
        "state = {}\nmonomial = {}\ncoefficient = {}\ncech = {:?}\n",
        u.state, u.monomial, u.coefficient, cech
    );
    ok(json, text)
}

pub fn decompose(model: &Path, input: &Path) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let e = decode_kelement::<Rat>(&read_json(input)?, m.d())?;
    e.validate(&m)?;
    let dec = e.decompose()?;
    let json = json!({ "plus": encode_kelement(&dec.plus, m.d()), "minus": encode_kelement(&dec.minus, m.d()) });
    let text = format!("plus:\n{}minus:\n{}", text::kelement(&dec.plus), text::kelement(&dec.minus));
    ok(json, text)
}

pub fn omega(model: &Path, f: &Path, g: &Path) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let f = decode_kelement::<Rat>(&read_json(f)?, m.d())?;
    let g = decode_kelement::<Rat>(&read_json(g)?, m.d())?;
    let w = omega_form(&m, &f, &g)?;
    ok(json!({ "omega": encode_scalar(&w) }), format!("omega = {w}\n"))
}

pub fn check_identity(max_d: u32) -> Result<Output, CliError> {
    if max_d == 0 {
        return Err(CliError::Usage("max-d must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut failed = Vec::new();
    for d in 1..=max_d {
        let ghost = verify_ghost_identity(d);
        let node = node_factor_from_ghosts::<Rat>(d) == aggregate_node_factor::<Rat>(d);
        if !(ghost && node) {
            failed.push(d);
        }
        rows.push(json!({ "d": d, "ghost_identity": ghost, "node_factor": node }));
        text.push_str(&format!("d = {d:>3}: ghost {} node {}\n", pass(ghost), pass(node)));
    }
    let json = json!({ "max_d": max_d, "all_pass": failed.is_empty(), "results": rows });
    let failure = (!failed.is_empty()).then(|| format!("identities fail for d in {failed:?}"));
    Ok(Output { json, text, failure })
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub struct SolveArgs {
    pub model: PathBuf,
    pub eps: String,
    pub dmax: u32,
    pub jmax: Option<u32>,
    pub nmax: Option<u32>,
    pub window: (i32, i32),
    pub baseline: Option<PathBuf>,
    pub f: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub series_out: Option<PathBuf>,
}

/// Series terms from a file holding either a full series or a bare `terms` map.
fn load_terms(path: &Path, cfg: &Arc<SeriesConfig>) -> Result<Series, CliError> {
    let v = read_json(path)?;
    if let Some(d) = v.get("d").and_then(Value::as_u64) {
        if d != cfg.d() as u64 {
            return Err(Error::Parse(format!("{}: d = {d}, model has d = {}", path.display(), cfg.d())).into());
        }
    }
    let terms = v.get("terms").unwrap_or(&v);
    Ok(decode_terms(terms, cfg)?)
}

pub fn solve(a: SolveArgs) -> Result<Output, CliError> {
    let m = load_model(&a.model)?;
    let mut tr = Truncation::defaults(&m, a.dmax);
    if let Some(j) = a.jmax {
        tr.jmax = j;
    }
    tr.nmax = resolve_nmax(a.nmax, m.d())?;
    tr.window = a.window;
    let mut st = SolverState::<Rat>::new(m.clone(), chamber(&a.eps)?, tr)?;
    if let Some(p) = &a.baseline {
        let b = load_terms(p, &st.cfg)?;
        st = st.with_baseline(b)?;
    }
    if let Some(p) = &a.f {
        let f = load_terms(p, &st.cfg)?;
        st = st.with_f(f)?;
    }
    let sol = solve_tail(&st)?;
    let tail = encode_tail(&m, &tr, &sol.tail);
    if let Some(p) = &a.series_out {
        write_json(p, &encode_tseries(&st.assemble_with(&sol.series)))?;
    }
    let summary = format!(
        "{} tail coefficients on {} monomials; {} equations in {} unknowns over {} grades\n",
        sol.tail.len(),
        sol.series.len(),
        sol.equations,
        sol.unknowns,
        sol.grades.len()
    );
    match &a.out {
        Some(p) => {
            write_json(p, &tail)?;
            let json = json!({
                "out": p.display().to_string(),
                "coefficients": sol.tail.len(),
                "equations": sol.equations,
                "unknowns": sol.unknowns,
                "grades": sol.grades.iter().map(|g| [g.0, g.1]).collect::<Vec<_>>(),
            });
            ok(json, summary)
        }
        None => ok(tail, format!("{summary}{}", text::tail(&sol.tail))),
    }
}

fn pole_entries(es: &[PoleEntry]) -> Vec<Value> {
    es.iter()
        .map(|p| json!({ "monomial": p.monomial.to_string(), "block": p.block, "order": p.order }))
        .collect()
}

fn pole_report(r: usize, s: usize, rep: &NoPoleReport) -> Value {
    json!({
        "r": r,
        "s": s,
        "clean": rep.is_clean(),
        "violations": pole_entries(&rep.violations),
        "overflow": pole_entries(&rep.overflow),
        "malformed": rep.malformed.iter().map(|(m, why)| json!({ "monomial": m.to_string(), "factor": why })).collect::<Vec<_>>(),
    })
}

pub fn diagnostic(d: &ShapeDiagnostic) -> String {
    match d {
        ShapeDiagnostic::Undecomposable { monomial, component, detail } => {
            format!("{monomial} φ{component}: cannot decompose ({detail})")
        }
        ShapeDiagnostic::LowDegreeTail { monomial, component } => {
            format!("{monomial} φ{component}: tail below degree two")
        }
        ShapeDiagnostic::InputMismatch { monomial, component } => {
            format!("{monomial} φ{component}: u = 0 part differs from t(1/q)")
        }
        ShapeDiagnostic::Broad { monomial, component } => format!("{monomial} φ{component}: broad component"),
    }
}

pub fn verify(model: &Path, input: &Path, nmax: Option<u32>) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let v = read_json(input)?;
    let series_json = v.get("series").unwrap_or(&v);
    let f: TSeries<Rat> = decode_tseries(series_json, &m)?;
    let nmax = resolve_nmax(nmax, m.d())?;
    let rep = verify_cone_point(&m, nmax, &f)?;
    let diagnostics: Vec<String> = rep.shape.diagnostics.iter().map(diagnostic).collect();
    let json = json!({
        "passes": rep.passes,
        "nmax": nmax,
        "shape": {
            "passes": rep.shape.passes,
            "diagnostics": diagnostics,
            "t_hat_minus_t": encode_tseries(&rep.shape.t_hat_minus_t),
            "tail": encode_tseries(&rep.shape.tail),
        },
        "poles": rep.poles.iter().map(|(&(r, s), p)| pole_report(r, s, p)).collect::<Vec<_>>(),
    });
    let text = text::verification(&rep, &diagnostics);
    let failure = (!rep.passes).then(|| "series is not a cone point within the truncation".to_string());
    Ok(Output { json, text, failure })
}
