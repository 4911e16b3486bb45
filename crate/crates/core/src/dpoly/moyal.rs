//! The Moyal product for constant bivectors and evaluation of star products.

use super::PolyDiffOp;
use crate::algebra::{HSeries, MultiIndex, Poly, Rational};
use crate::error::{Error, Result};
use crate::tpoly::PolyVector;

fn check_constant_bivector(pi: &PolyVector) -> Result<()> {
    if pi.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, got: pi.degree() });
    }
    if let Some((idx, _)) = pi.components().find(|(_, c)| !c.is_constant()) {
        return Err(Error::NonConstant(idx.iter().map(|i| i + 1).collect()));
    }
    Ok(())
}

/// `B_k = (1/k!) (Σ_{i,j} Π^{ij} ∂_i ⊗ ∂_j)^k` for constant `Π`, so that
/// `B₁(f,g) = {f,g}`.
pub fn moyal_op(pi: &PolyVector, k: usize) -> Result<PolyDiffOp> {
    check_constant_bivector(pi)?;
    let d = pi.dim();
    let mut first = PolyDiffOp::zero(d, 2);
    for i in 0..d {
        for j in 0..d {
            let t = pi.tensor(&[i, j]);
            first.add_term(vec![MultiIndex::unit(d, i), MultiIndex::unit(d, j)], &t);
        }
    }
    let mut acc = PolyDiffOp::mu(d);
    for _ in 0..k {
        let mut next = PolyDiffOp::zero(d, 2);
        for (da, ca) in acc.terms() {
            for (db, cb) in first.terms() {
                next.add_term(vec![da[0].add(&db[0]), da[1].add(&db[1])], &(ca * cb));
            }
        }
        acc = next;
    }
    Ok(acc.scale(&Rational::inv_factorial(k)))
}

/// `μ + ℏB₁ + … + ℏ^N B_N`.
pub fn moyal_series(pi: &PolyVector, n: usize) -> Result<HSeries<PolyDiffOp>> {
    Ok(HSeries::from_coeffs((0..=n).map(|k| moyal_op(pi, k)).collect::<Result<_>>()?))
}

/// `f ⋆ g` for constant `Π` through `ℏ^N`.
pub fn moyal(f: &Poly, g: &Poly, pi: &PolyVector, n: usize) -> Result<HSeries<Poly>> {
    star_apply(&moyal_series(pi, n)?, f, g)
}

/// `Σ_k ℏ^k B_k(f,g)`.
pub fn star_apply(star: &HSeries<PolyDiffOp>, f: &Poly, g: &Poly) -> Result<HSeries<Poly>> {
    Ok(HSeries::from_coeffs(
        star.coeffs().iter().map(|b| b.apply(&[f, g])).collect::<Result<_>>()?,
    ))
}

/// `a ⋆ b` for series arguments: `Σ_l ℏ^l Σ_{i+j+k=l} B_k(a_i, b_j)`.
pub fn star_apply_series(star: &HSeries<PolyDiffOp>, a: &HSeries<Poly>, b: &HSeries<Poly>) -> Result<HSeries<Poly>> {
    let n = star.order();
    if a.order() != n {
        return Err(Error::TruncationMismatch(n, a.order()));
    }
    if b.order() != n {
        return Err(Error::TruncationMismatch(n, b.order()));
    }
    let dim = star.coeff(0).dim();
    let mut out: Vec<Poly> = vec![Poly::zero(dim); n + 1];
    for (i, ai) in a.coeffs().iter().enumerate() {
        for (j, bj) in b.coeffs().iter().enumerate().take(n + 1 - i) {
            for (k, bk) in star.coeffs().iter().enumerate().take(n + 1 - i - j) {
                out[i + j + k].add_assign_ref(&bk.apply(&[ai, bj])?);
            }
        }
    }
    Ok(HSeries::from_coeffs(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi12() -> PolyVector {
        PolyVector::basis(2, &[0, 1], Poly::one(2)).unwrap()
    }

    #[test]
    fn coordinates() {
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        let s = moyal(&x1, &x2, &pi12(), 1).unwrap();
        assert_eq!(s.coeff(0), &(&x1 * &x2));
        assert_eq!(s.coeff(1), &Poly::one(2));
        let t = moyal(&x2, &x1, &pi12(), 1).unwrap();
        assert_eq!(&s.coeff(1).clone() - t.coeff(1), Poly::constant(2, Rational::from_int(2)));
    }

    #[test]
    fn order_zero_is_product() {
        let f = &Poly::var(2, 0) * &Poly::var(2, 0);
        let s = moyal(&f, &Poly::var(2, 1), &pi12(), 0).unwrap();
        assert_eq!(s.coeffs(), &[&f * &Poly::var(2, 1)]);
    }

    #[test]
    fn rejects_non_constant() {
        let pi = PolyVector::basis(2, &[0, 1], Poly::var(2, 0)).unwrap();
        assert!(matches!(moyal_op(&pi, 1), Err(Error::NonConstant(_))));
    }

    #[test]
    fn second_order_on_squares() {
        // B₂(x₁², x₂²) = ½ (Π¹²)² ∂₁²x₁² ∂₂²x₂² = 2
        let f = &Poly::var(2, 0) * &Poly::var(2, 0);
        let g = &Poly::var(2, 1) * &Poly::var(2, 1);
        let s = moyal(&f, &g, &pi12(), 2).unwrap();
        assert_eq!(s.coeff(2), &Poly::constant(2, Rational::from_int(2)));
    }
}
