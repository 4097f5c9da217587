mod common;

use std::collections::BTreeSet;

use common::*;
use kwall_core::genfun::SeriesConfig;
use kwall_core::ifunction::{
    cech_rank, hypergeometric_part, hypergeometric_term, hypergeometric_terms, unstable_contribution,
    EpsilonChamber,
};
use kwall_core::statespace::FermatModel;
use kwall_core::{Error, Rat};
use proptest::prelude::*;

fn eps(s: &str) -> EpsilonChamber {
    s.parse().unwrap()
}

fn index_set(model: &FermatModel, chamber: &EpsilonChamber, max_total: u32) -> BTreeSet<Vec<(usize, u32)>> {
    hypergeometric_terms::<Rat>(model, chamber, max_total)
        .into_iter()
        .map(|t| t.multi_index)
        .collect()
}

#[test]
fn plateau_above_one() {
    for model in [FermatModel::quintic(), FermatModel::cubic()] {
        let cfg = SeriesConfig::new(model.clone(), (0, 0), 4);
        let reference = hypergeometric_part::<Rat>(&cfg, &eps("inf"));
        for e in ["1", "3/2", "100"] {
            assert_eq!(hypergeometric_part::<Rat>(&cfg, &eps(e)), reference, "eps = {e}");
        }
        let half = index_set(&model, &eps("1/2"), 4);
        let top = index_set(&model, &eps("inf"), 4);
        assert!(top.is_subset(&half) && half.len() > top.len());
    }
}

#[test]
fn monotone_in_epsilon() {
    let chambers = ["inf", "1", "2/3", "1/2", "2/5", "1/3", "1/4"];
    for model in [FermatModel::quintic(), FermatModel::cubic()] {
        let sets: Vec<_> = chambers.iter().map(|e| index_set(&model, &eps(e), 6)).collect();
        for w in sets.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
    }
}

#[test]
fn broad_terms_vanish() {
    let mut g = rng(31);
    let mut models = vec![FermatModel::quintic(), FermatModel::cubic()];
    models.extend((0..10).map(|_| random_fermat_model(&mut g, 9)));
    for model in models {
        for t in hypergeometric_terms::<Rat>(&model, &eps("1/3"), 3) {
            assert_eq!(t.narrow, model.is_narrow(t.state));
            if !t.narrow {
                assert!(t.coefficient.is_zero(), "{:?} on {:?}", t.multi_index, model.weights());
            } else {
                assert!(!t.coefficient.is_zero());
            }
        }
    }
}

#[test]
fn unstable_matches_hypergeometric_on_narrow_states() {
    for model in [FermatModel::quintic(), FermatModel::cubic()] {
        let nar = model.narrow_set().indices;
        let chamber = eps("1/3");
        for &r in &nar {
            for &l1 in &nar {
                for l0 in [vec![], vec![l1]] {
                    let u = unstable_contribution::<Rat>(&model, &chamber, r, &l0).unwrap();
                    let mut counts = std::collections::BTreeMap::new();
                    for &k in std::iter::once(&r).chain(&l0) {
                        *counts.entry(k).or_insert(0u32) += 1;
                    }
                    let idx: Vec<_> = counts.into_iter().collect();
                    let h = hypergeometric_term::<Rat>(&model, &idx);
                    assert_eq!(u.state, h.state);
                    if h.narrow {
                        assert_eq!(u.b_lists, h.b_lists);
                        assert_eq!(u.coefficient, h.coefficient);
                    }
                    let total: usize = (0..model.n_vars())
                        .map(|j| cech_rank(&model, j, r, &l0).unwrap())
                        .sum();
                    assert_eq!(total, u.b_lists.iter().map(Vec::len).sum::<usize>());
                }
            }
        }
    }
}

#[test]
fn unstable_locus_bounds() {
    let model = FermatModel::quintic();
    assert!(matches!(
        unstable_contribution::<Rat>(&model, &eps("inf"), 1, &[]),
        Err(Error::UnstableLocusAbsent(_))
    ));
    assert!(unstable_contribution::<Rat>(&model, &eps("1/2"), 1, &[2]).is_ok());
    assert!(matches!(
        unstable_contribution::<Rat>(&model, &eps("1/2"), 1, &[2, 2]),
        Err(Error::UnstableLocusAbsent(_))
    ));
    assert!(matches!(
        unstable_contribution::<Rat>(&model, &eps("1/2"), 4, &[]),
        Err(Error::NotNarrow { index: 4 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plateau_for_random_models(seed in any::<u64>(), p in 1i64..50, q in 1i64..=50) {
        let mut g = rng(seed);
        let model = random_fermat_model(&mut g, 10);
        let e = Rat::new(p.into(), q.into());
        let chamber = EpsilonChamber::finite(e.clone()).unwrap();
        let inf = index_set(&model, &EpsilonChamber::Infinite, 3);
        let got = index_set(&model, &chamber, 3);
        if e >= int(1) {
            prop_assert_eq!(got, inf);
        } else {
            prop_assert!(inf.is_subset(&got));
        }
        for t in hypergeometric_terms::<Rat>(&model, &chamber, 3) {
            prop_assert!(t.total() <= chamber.cap());
            prop_assert!(t.narrow || t.coefficient.is_zero());
        }
    }
}
