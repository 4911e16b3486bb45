#![allow(dead_code)]

use dq_core::algebra::{MultiIndex, Poly, Rational};
use dq_core::dpoly::PolyDiffOp;
use dq_core::tpoly::PolyVector;
use proptest::prelude::*;

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn arb_exps(dim: usize, max_degree: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_degree, dim)
        .prop_filter("degree bound", move |v| v.iter().sum::<u32>() <= max_degree)
        .prop_map(MultiIndex::from_vec)
}

pub fn arb_poly(dim: usize, max_degree: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((arb_exps(dim, max_degree), arb_rational()), 0..=max_terms)
        .prop_map(move |t| Poly::from_terms(dim, t))
}

pub fn arb_op(
    dim: usize,
    arity: usize,
    max_slot_order: u32,
    coeff_degree: u32,
    max_terms: usize,
) -> impl Strategy<Value = PolyDiffOp> {
    prop::collection::vec(
        (
            prop::collection::vec(arb_exps(dim, max_slot_order), arity),
            arb_poly(dim, coeff_degree, 2),
        ),
        1..=max_terms,
    )
    .prop_map(move |t| PolyDiffOp::from_terms(dim, arity, t).unwrap())
}

/// Operator of random arity in `0..=max_arity`.
pub fn arb_any_op(dim: usize, max_arity: usize) -> impl Strategy<Value = PolyDiffOp> {
    (0..=max_arity).prop_flat_map(move |m| arb_op(dim, m, 2, 1, 2))
}

pub fn arb_polyvector(
    dim: usize,
    degree: usize,
    coeff_degree: u32,
    max_terms: usize,
) -> impl Strategy<Value = PolyVector> {
    prop::collection::vec(
        (prop::collection::vec(0..dim, degree), arb_poly(dim, coeff_degree, 2)),
        0..=max_terms,
    )
    .prop_map(move |t| PolyVector::from_components(dim, degree, t).unwrap())
}

pub fn arb_any_polyvector(dim: usize, max_degree: usize) -> impl Strategy<Value = PolyVector> {
    (0..=max_degree.min(dim)).prop_flat_map(move |p| arb_polyvector(dim, p, 2, 3))
}

pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        Rational::from_int(-1)
    }
}
