//! Cyclotomic polynomials over the integers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::poly::Poly;
use crate::scalar::Scalar;

pub fn divisors(n: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Euler's totient, which is also `deg Φ_n`.
pub fn totient(n: u32) -> u32 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

fn cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Exact division of integer polynomials by a monic divisor.
fn int_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        if c == 0 {
            continue;
        }
        for (k, &b) in den.iter().enumerate() {
            rem[i + k] -= c * b;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Integer coefficients of `Φ_n`, low degree first.
pub fn cyclotomic_coeffs(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic index must be positive");
    if let Some(c) = cache().lock().unwrap().get(&n) {
        return c.clone();
    }
    // x^n - 1 divided by Φ_m for every proper divisor m.
    let mut acc = vec![0i64; n as usize + 1];
    acc[0] = -1;
    acc[n as usize] = 1;
    for m in divisors(n) {
        if m == n {
            continue;
        }
        let phi = cyclotomic_coeffs(m);
        acc = int_div_monic(&acc, &phi);
    }
    let out = Arc::new(acc);
    cache().lock().unwrap().insert(n, out.clone());
    out
}

/// The `n`-th cyclotomic polynomial `Φ_n(x)`.
pub fn cyclotomic<T: Scalar>(n: u32) -> Poly<T> {
    Poly::from_i64(&cyclotomic_coeffs(n))
}
