//! Property tests of the word algebra and rate predictors.

use proptest::prelude::*;

use ergolab::ergodic::{balance_epsilon, predict_uniform_rate};
use ergolab::freegroup::{profinite_metric, sign_character, GroupHom, HomImages, ReducedWord, SubgroupChain};

fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec(0..(2 * rank) as u8, 0..max_len)
        .prop_map(move |letters| ReducedWord::from_letters(rank, letters).unwrap())
}

fn shift_chain() -> SubgroupChain {
    let lvl = |m: usize| {
        let s: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
        GroupHom::new(2, HomImages::Permutation { degree: m, gens: vec![s.clone(), s] }).unwrap()
    };
    SubgroupChain::new(vec![lvl(2), lvl(4), lvl(8)]).unwrap()
}

proptest! {
    #[test]
    fn sign_character_is_multiplicative(u in arb_word(2, 12), v in arb_word(2, 12)) {
        let uv = u.mul(&v);
        prop_assert_eq!(sign_character(&uv), sign_character(&u) * sign_character(&v));
    }

    #[test]
    fn reduction_is_idempotent(w in arb_word(3, 16)) {
        let again = ReducedWord::from_letters(3, w.letters().iter().copied()).unwrap();
        prop_assert_eq!(&again, &w);
        prop_assert!(w.is_reduced());
    }

    #[test]
    fn inverse_is_an_involution(w in arb_word(2, 14)) {
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn profinite_metric_is_invariant(
        u in arb_word(2, 10),
        v in arb_word(2, 10),
        g in arb_word(2, 10),
    ) {
        let chain = shift_chain();
        let d0 = profinite_metric(&u, &v, &chain).value;
        let d1 = profinite_metric(&g.mul(&u), &g.mul(&v), &chain).value;
        prop_assert_eq!(d0, d1);
    }

    #[test]
    fn profinite_metric_triangle(
        u in arb_word(2, 8),
        v in arb_word(2, 8),
        w in arb_word(2, 8),
    ) {
        let chain = shift_chain();
        let duv = profinite_metric(&u, &v, &chain).value;
        let duw = profinite_metric(&u, &w, &chain).value;
        let dwv = profinite_metric(&w, &v, &chain).value;
        // ultrametric: even stronger than the triangle inequality
        prop_assert!(duv <= duw.max(dwv) + 1e-15);
    }

    #[test]
    fn balancing_identity_holds(
        a in 0.05f64..1.0,
        rho in 0.1f64..4.0,
        e in 1e-9f64..0.99,
    ) {
        let eps = balance_epsilon(a, rho, e).unwrap();
        let lhs = eps.powf(-rho) * e + eps.powf(a);
        let rhs = 2.0 * predict_uniform_rate(a, rho, e).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-11);
    }

    #[test]
    fn rate_prediction_monotone_in_error(
        a in 0.05f64..1.0,
        rho in 0.1f64..4.0,
        e1 in 1e-9f64..0.5,
        factor in 1.01f64..10.0,
    ) {
        let e2 = (e1 * factor).min(0.999);
        let r1 = predict_uniform_rate(a, rho, e1).unwrap();
        let r2 = predict_uniform_rate(a, rho, e2).unwrap();
        prop_assert!(r1 <= r2 + 1e-15);
    }
}
