mod common;

use std::sync::OnceLock;

use dq_core::algebra::Rational;
use dq_core::dpoly::{hkr, moyal_op, PolyDiffOp};
use dq_core::fixtures::{non_poisson_corpus, poisson_corpus, random_constant_bivector, so3};
use dq_core::graphs::Target;
use dq_core::par::Exec;
use dq_core::star::*;
use dq_core::tpoly::{apply_bivector, PolyVector};
use dq_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table() -> &'static WeightTable {
    static T: OnceLock<WeightTable> = OnceLock::new();
    T.get_or_init(|| {
        let graphs = un_graphs(2, 2, Some(&[2, 2])).unwrap();
        WeightTable::estimate(&graphs, 200_000, 42, Exec::default()).unwrap()
    })
}

fn minus(a: &WeightedOp, b: &PolyDiffOp) -> WeightedOp {
    let mut d = a.clone();
    d.exact.add_scaled(b, &Rational::from_int(-1));
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn u1_equals_hkr(d in 1usize..=4, deg in 0usize..=4, seed in any::<u64>()) {
        prop_assume!(deg <= d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = dq_core::fixtures::random_polyvector(&mut rng, d, deg, 2, 3);
        prop_assume!(deg >= 1);
        let u1 = build_un(1, deg, None, &WeightTable::default()).unwrap().evaluate(&[&xi]).unwrap();
        prop_assert!(u1.is_exact());
        prop_assert_eq!(u1.exact, hkr(&xi));
    }

    #[test]
    fn formality_n1_is_exact(xi in common::arb_any_polyvector(3, 3)) {
        prop_assume!(xi.degree() >= 1);
        let r = formality_residual(1, &[&xi], &probe_basis(3, 2), &WeightTable::default()).unwrap();
        prop_assert_eq!(r.normal_form, Verdict::exact_zero());
        prop_assert_eq!(r.probes, Verdict::exact_zero());
    }
}

#[test]
fn order_one_is_moyal_and_commutator_is_twice_the_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in [2, 3] {
        let pi = random_constant_bivector(&mut rng, d);
        let star = build_star(&pi, 1, &WeightTable::default()).unwrap();
        assert!(star.terms[1].is_exact());
        assert_eq!(star.terms[1].exact, moyal_op(&pi, 1).unwrap());
        for f in probe_basis(d, 2) {
            for g in probe_basis(d, 2) {
                let fg = star.terms[1].exact.apply(&[&f, &g]).unwrap();
                let gf = star.terms[1].exact.apply(&[&g, &f]).unwrap();
                let two = apply_bivector(&pi, &f, &g).unwrap().scale(&Rational::from_int(2));
                assert_eq!(&fg - &gf, two);
            }
        }
    }
}

#[test]
fn order_two_matches_moyal_within_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [2, 3] {
        let pi = random_constant_bivector(&mut rng, d);
        let star = build_star(&pi, 2, table()).unwrap();
        let diff = minus(&star.terms[2], &moyal_op(&pi, 2).unwrap());
        assert!(!diff.is_exact());
        assert!(diff.coefficients().verdict().pass, "{:?}", diff.coefficients().verdict());
        for f in probe_basis(d, 3) {
            for g in probe_basis(d, 3) {
                let v = diff.evaluate(&[&f, &g]).unwrap().verdict();
                assert!(v.pass, "{v:?}");
            }
        }
    }
}

#[test]
fn assembled_star_is_associative_through_second_order() {
    for (name, pi) in poisson_corpus() {
        let star = build_star(&pi, 2, table()).unwrap();
        assert!(star.poisson);
        let nf = associativity_normal_form(&star).unwrap();
        assert_eq!(nf[0], Verdict::exact_zero(), "{name}");
        assert_eq!(nf[1], Verdict::exact_zero(), "{name}");
        assert!(nf[2].pass, "{name}: {:?}", nf[2]);
    }
    let star = build_star(&so3(), 2, table()).unwrap();
    let probes = probe_triples(&probe_basis(3, 3));
    let v = associativity_residual(&star, &probes).unwrap();
    assert!(v.iter().all(|v| v.pass), "{v:?}");
}

#[test]
fn non_poisson_input_breaks_associativity() {
    let (name, pi) = non_poisson_corpus().remove(2);
    let star = build_star(&pi, 2, table()).unwrap();
    assert!(!star.poisson);
    let nf = associativity_normal_form(&star).unwrap();
    assert!(nf[1].pass);
    assert!(!nf[2].pass, "{name}: {:?}", nf[2]);
}

#[test]
fn wrong_internal_signs_are_detected() {
    let mut flipped = table().clone();
    for g in un_graphs(2, 2, Some(&[2, 2])).unwrap() {
        if g.stars().iter().flatten().any(|t| matches!(t, Target::P(_))) {
            if let Some(Weight::MonteCarlo(e)) = flipped.0.get_mut(&g.key()) {
                e.value = -e.value;
            }
        }
    }
    let star = build_star(&so3(), 2, &flipped).unwrap();
    assert!(!associativity_normal_form(&star).unwrap()[2].pass);
}

#[test]
fn u2_is_symmetric_on_bivectors() {
    let (a, b) = (so3(), poisson_corpus()[7].1.clone());
    let un = build_un(2, 2, Some(&[2, 2]), table()).unwrap();
    let ab = un.evaluate(&[&a, &b]).unwrap();
    let ba = un.evaluate(&[&b, &a]).unwrap();
    let mut diff = ab.clone();
    diff.add_scaled(&ba, &Rational::from_int(-1));
    assert!(diff.coefficients().verdict().pass);
    // relabeled table: Γ ↦ σΓ carrying sign·Ŵ_Γ reproduces U₂ exactly
    let mut relabeled = WeightTable::default();
    for (g, w) in &un.table {
        let (h, sign) = g.permute_vertices(&[1, 0]).unwrap();
        let w = match w {
            Weight::MonteCarlo(e) => {
                let mut e = e.clone();
                e.value *= sign as f64;
                Weight::MonteCarlo(e)
            }
            Weight::Exact { value } => Weight::Exact { value: value * &Rational::from_int(sign) },
        };
        relabeled.0.insert(h.key(), w);
    }
    let swapped = build_un(2, 2, Some(&[2, 2]), &relabeled).unwrap().evaluate(&[&b, &a]).unwrap();
    let exact_diff = {
        let mut d = swapped.coefficients();
        for (k, (v, _)) in ab.coefficients().coeffs {
            d.coeffs.entry(k).or_insert((0.0, 0.0)).0 -= v;
        }
        d
    };
    assert!(exact_diff.coeffs.values().all(|(v, _)| v.abs() < 1e-12));
}

#[test]
fn formality_n2_within_error() {
    let np = non_poisson_corpus();
    let cases: Vec<(PolyVector, PolyVector)> = vec![
        (so3(), so3()),
        (so3(), poisson_corpus()[7].1.clone()),
        (so3(), np[3].1.clone()),
        (np[2].1.clone(), np[4].1.clone()),
        (poisson_corpus()[1].1.clone(), poisson_corpus()[1].1.clone()),
    ];
    for (a, b) in &cases {
        let r = formality_residual(2, &[a, b], &probe_basis(3, 1), table()).unwrap();
        assert_eq!(r.bracket_coefficient, Some(Rational::from_int(-1)));
        assert!(r.normal_form.pass && r.probes.pass, "{r:?}");
    }
}

#[test]
fn formality_rejects_unsupported_orders() {
    let pi = so3();
    assert!(matches!(
        formality_residual(3, &[&pi, &pi, &pi], &probe_basis(3, 1), table()),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(build_star(&pi, 3, table()), Err(Error::Unsupported(_))));
}

#[test]
fn probes_and_normal_form_agree_on_exact_orders() {
    let star = build_star(&so3(), 1, &WeightTable::default()).unwrap();
    let probes = probe_triples(&probe_basis(3, 2));
    let v = associativity_residual(&star, &probes).unwrap();
    assert_eq!(v, vec![Verdict::exact_zero(); 2]);
}
