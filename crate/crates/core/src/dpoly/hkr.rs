//! The HKR map from polyvector fields to polydifferential operators.

use super::PolyDiffOp;
use crate::algebra::{MultiIndex, Rational};
use crate::tpoly::{permutations, PolyVector};

/// `Ψ(ξ)(f₁,…,f_p) = (1/p!) Σ_σ sgn σ ξ^{i_{σ(1)}…}∂_{i_{σ(1)}}f₁⋯`, i.e.
/// `(1/p!)·ξ(df₁,…,df_p)`. Degree 0 maps to the constant operator.
pub fn hkr(xi: &PolyVector) -> PolyDiffOp {
    let p = xi.degree();
    let d = xi.dim();
    let mut op = PolyDiffOp::zero(d, p);
    let inv = Rational::inv_factorial(p);
    let perms = permutations(p);
    for (idx, c) in xi.components() {
        for (perm, sign) in &perms {
            let derivs: Vec<MultiIndex> = perm.iter().map(|&s| MultiIndex::unit(d, idx[s])).collect();
            op.add_term(derivs, &c.scale(&(&inv * &Rational::from_int(*sign))));
        }
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::dpoly::hochschild_delta;

    #[test]
    fn bivector_value() {
        let xi = PolyVector::basis(2, &[0, 1], Poly::one(2)).unwrap();
        let v = hkr(&xi).apply(&[&Poly::var(2, 0), &Poly::var(2, 1)]).unwrap();
        assert_eq!(v, Poly::constant(2, Rational::new(1, 2)));
    }

    #[test]
    fn vector_field_is_derivation() {
        let xi = PolyVector::basis(2, &[1], Poly::var(2, 0)).unwrap();
        let f = &Poly::var(2, 1) * &Poly::var(2, 1);
        assert_eq!(hkr(&xi).apply(&[&f]).unwrap(), (&Poly::var(2, 0) * &Poly::var(2, 1)).scale(&Rational::from_int(2)));
        assert!(hochschild_delta(&hkr(&xi)).is_zero());
    }

    #[test]
    fn scalar_maps_to_constant() {
        let f = Poly::var(3, 2);
        assert_eq!(hkr(&PolyVector::scalar(f.clone())), PolyDiffOp::constant(f));
    }
}
