mod common;

use common::*;
use dq_core::algebra::{HSeries, Poly};
use dq_core::dpoly::{assoc_defect, moyal_series, PolyDiffOp};
use dq_core::mc::{
    bch_compose, compose_unary, exp_unary, gauge_act, mc_residual, mc_residual_vanishes, mc_to_star,
    precompose_both, star_to_mc,
};
use dq_core::tpoly::PolyVector;
use proptest::prelude::*;

fn tail<E: Clone>(zero: E, parts: Vec<E>) -> HSeries<E> {
    let mut v = vec![zero];
    v.extend(parts);
    HSeries::from_coeffs(v)
}

fn arb_vf_series(dim: usize, n: usize) -> impl Strategy<Value = HSeries<PolyVector>> {
    prop::collection::vec(arb_polyvector(dim, 1, 2, 2), n)
        .prop_map(move |v| tail(PolyVector::zero(dim, 1), v))
}

fn arb_unary_series(dim: usize, n: usize) -> impl Strategy<Value = HSeries<PolyDiffOp>> {
    prop::collection::vec(arb_op(dim, 1, 2, 1, 2), n).prop_map(move |v| tail(PolyDiffOp::zero(dim, 1), v))
}

fn constant_pi(dim: usize) -> impl Strategy<Value = PolyVector> {
    prop::collection::vec(arb_rational(), dim * (dim - 1) / 2).prop_map(move |cs| {
        let mut pi = PolyVector::zero(dim, 2);
        let mut k = 0;
        for i in 0..dim {
            for j in i + 1..dim {
                pi.add_component(&[i, j], &Poly::constant(dim, cs[k].clone())).unwrap();
                k += 1;
            }
        }
        pi
    })
}

fn hbar_pi(pi: PolyVector, n: usize) -> HSeries<PolyVector> {
    let d = pi.dim();
    let mut v = vec![PolyVector::zero(d, 2); n + 1];
    v[1] = pi;
    HSeries::from_coeffs(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_preserves_mc_in_tpoly(alpha in arb_vf_series(3, 3), pick in 0usize..4, scale in arb_rational()) {
        let pi = match pick {
            0 => dq_core::fixtures::so3(),
            1 => dq_core::fixtures::poisson_corpus()[7].1.clone(),
            2 => dq_core::fixtures::poisson_corpus()[8].1.clone(),
            _ => dq_core::fixtures::poisson_corpus()[1].1.clone(),
        }.scale(&scale);
        let l = hbar_pi(pi, 3);
        prop_assert!(mc_residual_vanishes(&l).unwrap());
        let moved = gauge_act(&alpha, &l).unwrap();
        prop_assert!(mc_residual_vanishes(&moved).unwrap());
    }

    #[test]
    fn gauge_preserves_mc_in_dpoly(alpha in arb_unary_series(2, 3), pi in constant_pi(2)) {
        let l = star_to_mc(&moyal_series(&pi, 3).unwrap()).unwrap();
        let moved = gauge_act(&alpha, &l).unwrap();
        prop_assert!(mc_residual_vanishes(&moved).unwrap());
    }

    #[test]
    fn bch_composes_actions_in_tpoly(x in arb_vf_series(3, 3), y in arb_vf_series(3, 3)) {
        let l = hbar_pi(dq_core::fixtures::so3(), 3);
        let z = bch_compose(&x, &y).unwrap();
        prop_assert_eq!(gauge_act(&z, &l).unwrap(), gauge_act(&x, &gauge_act(&y, &l).unwrap()).unwrap());
    }

    #[test]
    fn bch_matches_direct_conjugation(x in arb_unary_series(2, 3), y in arb_unary_series(2, 3), pi in constant_pi(2)) {
        let star = moyal_series(&pi, 3).unwrap();
        let l = star_to_mc(&star).unwrap();
        let via_bch = mc_to_star(&gauge_act(&bch_compose(&x, &y).unwrap(), &l).unwrap()).unwrap();
        let nested = mc_to_star(&gauge_act(&x, &gauge_act(&y, &l).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(&via_bch, &nested);
        // transported star satisfies star'(E⊗E) = E star with E = e^X e^Y
        let e = compose_unary(&exp_unary(&x).unwrap(), &exp_unary(&y).unwrap()).unwrap();
        let lhs = precompose_both(&via_bch, &e).unwrap();
        let rhs = e.convolve(&star, || PolyDiffOp::zero(2, 2),
            |a, b| dq_core::dpoly::circle_i(a, b, 1).unwrap(), |acc, v| acc.add_assign_ref(&v)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mc_residual_is_the_associator(nu in prop::collection::vec(arb_op(2, 2, 2, 1, 2), 3)) {
        let s = tail(PolyDiffOp::zero(2, 2), nu);
        let r = mc_residual(&s).unwrap();
        let a = assoc_defect(&s).unwrap();
        prop_assert_eq!(r, a.into_coeffs());
    }
}
