//! Identities over roots of unity, reduced to power-sum orthogonality.

use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::scalar::Scalar;

/// `Σ_{k=0}^{d−1} ζ^{km}` for a primitive `d`-th root of unity `ζ`.
pub fn roots_of_unity_power_sum(d: u32, m: i64) -> i64 {
    assert!(d >= 1);
    if m.rem_euclid(d as i64) == 0 {
        d as i64
    } else {
        0
    }
}

/// Checks `Σ_{k=1}^{d−1} 1/(1−ζ^k x) + 1/(1−x) = d/(1−x^d)`.
///
/// Clearing the common denominator `1 − x^d`, the left numerator is
/// `Σ_k f(ζ^k x)` with `f(y) = 1 + y + … + y^{d−1}`, whose `x^m` coefficient
/// is the power sum `Σ_k ζ^{km}`. The identity holds iff that numerator is the
/// constant `d`. The power-series form is also checked to order `3d`.
pub fn verify_ghost_identity(d: u32) -> bool {
    assert!(d >= 1);
    let numerator_is_d = (0..d as i64).all(|m| {
        let expected = if m == 0 { d as i64 } else { 0 };
        roots_of_unity_power_sum(d, m) == expected
    });
    // Σ_k 1/(1 − ζ^k x) = Σ_m (Σ_k ζ^{km}) x^m against d/(1 − x^d) = Σ_j d x^{jd}.
    let series_match = (0..3 * d as i64).all(|m| {
        let rhs = if m % d as i64 == 0 { d as i64 } else { 0 };
        roots_of_unity_power_sum(d, m) == rhs
    });
    numerator_is_d && series_match
}

/// The aggregated node factor `(1 − y)/d`, where `y` stands for `q/L`.
pub fn aggregate_node_factor<T: Scalar>(d: u32) -> RatFunc<T> {
    assert!(d >= 1);
    RatFunc::from_poly(Poly::one_minus_x_pow(1).scale(&T::from_frac(1, d as i64)))
}

/// `(Σ_{k=0}^{d−1} 1/(1 − ζ^k y^{1/d}))^{−1}` as a function of `y`, built
/// from power sums alone.
pub fn node_factor_from_ghosts<T: Scalar>(d: u32) -> RatFunc<T> {
    assert!(d >= 1);
    // Numerator over (1 − x^d): Σ_m (Σ_k ζ^{km}) x^m for m < d.
    let num = Poly::from_i64(
        &(0..d as i64)
            .map(|m| roots_of_unity_power_sum(d, m))
            .collect::<Vec<_>>(),
    );
    let sum = RatFunc::new_unchecked(num, Poly::one_minus_x_pow(d as usize));
    // Both parts are polynomials in x^d = y after the reduction above.
    let inv = sum.recip().expect("ghost sum is nonzero");
    let deflate = |p: &Poly<T>| {
        Poly::from_coeffs(
            p.coeffs()
                .iter()
                .step_by(d as usize)
                .cloned()
                .collect(),
        )
    };
    RatFunc::new_unchecked(deflate(inv.num()), deflate(inv.den()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn power_sums() {
        assert_eq!(roots_of_unity_power_sum(5, 0), 5);
        assert_eq!(roots_of_unity_power_sum(5, 3), 0);
        assert_eq!(roots_of_unity_power_sum(6, 12), 6);
        assert_eq!(roots_of_unity_power_sum(4, -8), 4);
    }

    #[test]
    fn ghost_identity_small() {
        assert!(verify_ghost_identity(1));
        assert!(verify_ghost_identity(3));
        assert!(verify_ghost_identity(12));
    }

    #[test]
    fn node_factor() {
        assert_eq!(
            aggregate_node_factor::<Rat>(1),
            RatFunc::from_poly(Poly::from_i64(&[1, -1]))
        );
        let five = aggregate_node_factor::<Rat>(5);
        assert_eq!(five.eval(&Rat::from_i64(0)).unwrap(), Rat::from_frac(1, 5));
        for d in 1..=12 {
            assert_eq!(node_factor_from_ghosts::<Rat>(d), aggregate_node_factor::<Rat>(d), "d = {d}");
        }
    }
}
