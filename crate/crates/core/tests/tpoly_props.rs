mod common;

use common::*;
use dq_core::algebra::{Poly, Rational};
use dq_core::fixtures::{monomial_basis, non_poisson_corpus, poisson_corpus};
use dq_core::tpoly::{is_poisson, jacobiator, PolyVector};
use proptest::prelude::*;

fn vf_apply(v: &PolyVector, f: &Poly) -> Poly {
    v.contract(&[f]).unwrap()
}

fn add(a: &PolyVector, b: &PolyVector) -> PolyVector {
    a.add(b).unwrap()
}

fn scaled(a: &PolyVector, s: &Rational) -> PolyVector {
    a.scale(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_skew_symmetry(a in arb_any_polyvector(3, 3), b in arb_any_polyvector(3, 3)) {
        prop_assume!(a.degree() + b.degree() >= 1);
        let ab = a.sn_bracket(&b).unwrap();
        let ba = b.sn_bracket(&a).unwrap();
        let s = -sign((a.degree() as i64 - 1) * (b.degree() as i64 - 1));
        prop_assert_eq!(ab, scaled(&ba, &s));
    }

    #[test]
    fn graded_jacobi(
        a in arb_any_polyvector(3, 3),
        b in arb_any_polyvector(3, 3),
        c in arb_any_polyvector(3, 3),
    ) {
        // skip triples whose nested brackets leave the non-negative degrees
        prop_assume!(a.degree() + b.degree() >= 1 && b.degree() + c.degree() >= 1 && a.degree() + c.degree() >= 1);
        prop_assume!(a.degree() + b.degree() + c.degree() >= 2);
        let da = a.degree() as i64 - 1;
        let db = b.degree() as i64 - 1;
        let lhs = a.sn_bracket(&b.sn_bracket(&c).unwrap()).unwrap();
        let r1 = a.sn_bracket(&b).unwrap().sn_bracket(&c).unwrap();
        let r2 = b.sn_bracket(&a.sn_bracket(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, add(&r1, &scaled(&r2, &sign(da * db))));
    }

    #[test]
    fn vector_field_bracket_is_commutator(
        x in arb_polyvector(3, 1, 2, 3),
        y in arb_polyvector(3, 1, 2, 3),
        f in arb_poly(3, 3, 4),
    ) {
        let br = x.sn_bracket(&y).unwrap();
        let direct = &vf_apply(&x, &vf_apply(&y, &f)) - &vf_apply(&y, &vf_apply(&x, &f));
        prop_assert_eq!(vf_apply(&br, &f), direct);
    }
}

fn jacobiator_vanishes_on_monomials(pi: &PolyVector) -> bool {
    let basis = monomial_basis(pi.dim(), 2);
    for f in &basis {
        for g in &basis {
            for h in &basis {
                if !jacobiator(pi, f, g, h).unwrap().is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn self_bracket_matches_jacobiator_both_directions() {
    for (name, pi) in poisson_corpus() {
        assert!(is_poisson(&pi).unwrap(), "{name}");
        assert!(jacobiator_vanishes_on_monomials(&pi), "{name}");
    }
    for (name, pi) in non_poisson_corpus() {
        assert!(!is_poisson(&pi).unwrap(), "{name}");
        assert!(!jacobiator_vanishes_on_monomials(&pi), "{name}");
    }
}
