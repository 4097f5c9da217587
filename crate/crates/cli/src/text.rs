//! Plain-text renderings.

use std::fmt::Write;

use kwall_core::ifunction::{EpsilonChamber, HypergeometricTerm};
use kwall_core::statespace::FermatModel;
use kwall_core::wallcross::ConeVerification;
use kwall_core::{KElem, Rat, Series, Tail};

pub fn model(m: &FermatModel) -> String {
    let mut s = String::new();
    let charges: Vec<String> = m.charges().iter().map(ToString::to_string).collect();
    let nar = m.narrow_set().indices;
    writeln!(s, "d = {}", m.d()).unwrap();
    writeln!(s, "weights = {:?}", m.weights()).unwrap();
    writeln!(s, "charges = [{}]", charges.join(", ")).unwrap();
    writeln!(s, "q = {}", m.total_charge()).unwrap();
    writeln!(s, "nar = {nar:?}").unwrap();
    for k in nar {
        writeln!(s, "dual {k} -> {}", m.dual_index(k).unwrap()).unwrap();
    }
    s
}

pub fn ifun(ch: &EpsilonChamber, terms: &[HypergeometricTerm<Rat>]) -> String {
    let mut s = format!("eps = {ch}, cap = {}\n", ch.cap());
    for t in terms {
        let tag = if t.narrow { "" } else { " (broad)" };
        writeln!(s, "{} φ{}: {}{tag}", t.monomial, t.state, t.coefficient).unwrap();
    }
    s
}

pub fn kelement(e: &KElem) -> String {
    let mut s = String::new();
    for (k, c) in e.components() {
        writeln!(s, "  φ{k}: {c}").unwrap();
    }
    s
}

pub fn series(f: &Series) -> String {
    let mut s = String::new();
    for (m, e) in f.terms() {
        for (k, c) in e.components() {
            writeln!(s, "{m} φ{k}: {c}").unwrap();
        }
    }
    s
}

pub fn tail(t: &[Tail]) -> String {
    let mut s = String::new();
    for c in t {
        writeln!(s, "{} φ^{} block {} pole {}: {}", c.monomial, c.state, c.block, c.pole, c.numerator).unwrap();
    }
    s
}

pub fn verification(rep: &ConeVerification<Rat>, diagnostics: &[String]) -> String {
    let mut s = format!("cone point: {}\n", if rep.passes { "yes" } else { "no" });
    writeln!(s, "shape: {}", if rep.shape.passes { "ok" } else { "failed" }).unwrap();
    for d in diagnostics {
        writeln!(s, "  {d}").unwrap();
    }
    for (&(r, sidx), p) in &rep.poles {
        if p.is_clean() {
            continue;
        }
        writeln!(s, "pairing r = {r}, s = {sidx}:").unwrap();
        for e in p.violations.iter().chain(&p.overflow) {
            writeln!(s, "  {} block {} order {}", e.monomial, e.block, e.order).unwrap();
        }
        for (m, why) in &p.malformed {
            writeln!(s, "  {m} non-cyclotomic factor {why}").unwrap();
        }
    }
    s
}
