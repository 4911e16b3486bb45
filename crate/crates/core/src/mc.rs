//! Maurer–Cartan equations, gauge actions and BCH composition in
//! `ℏT_poly[[ℏ]]` and `ℏD_poly[[ℏ]]`.
//!
//! On `T_poly` the differential is zero. On `D_poly` it is `d = [−, μ]`,
//! i.e. `d = −hochschild_delta`, with `θ = μ`; with this sign
//! `dν + ½[ν,ν]` at each order is exactly the associator of `μ + ν`.

use crate::algebra::{HSeries, Rational};
use crate::dpoly::{circle_i, gerstenhaber, PolyDiffOp};
use crate::error::{Error, Result};
use crate::tpoly::PolyVector;

/// Homogeneous element of a DGLA.
pub trait GradedLie: Clone + PartialEq + std::fmt::Debug {
    /// Degree in the shifted grading.
    fn shifted_degree(&self) -> i64;
    fn zero_of_degree(&self, shifted_degree: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn bracket(&self, other: &Self) -> Result<Self>;
    fn differential(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, s: &Rational);
}

impl GradedLie for PolyVector {
    fn shifted_degree(&self) -> i64 {
        self.degree() as i64 - 1
    }
    fn zero_of_degree(&self, k: i64) -> Self {
        PolyVector::zero(self.dim(), (k + 1).max(0) as usize)
    }
    fn is_zero(&self) -> bool {
        PolyVector::is_zero(self)
    }
    fn bracket(&self, other: &Self) -> Result<Self> {
        self.sn_bracket(other)
    }
    fn differential(&self) -> Self {
        PolyVector::zero(self.dim(), self.degree() + 1)
    }
    fn add_scaled(&mut self, other: &Self, s: &Rational) {
        if other.is_zero() || s.is_zero() {
            return;
        }
        if PolyVector::is_zero(self) && self.degree() != other.degree() {
            *self = other.scale(s);
            return;
        }
        *self = self.add(&other.scale(s)).expect("matching shape");
    }
}

impl GradedLie for PolyDiffOp {
    fn shifted_degree(&self) -> i64 {
        PolyDiffOp::shifted_degree(self)
    }
    fn zero_of_degree(&self, k: i64) -> Self {
        PolyDiffOp::zero(self.dim(), (k + 1).max(0) as usize)
    }
    fn is_zero(&self) -> bool {
        PolyDiffOp::is_zero(self)
    }
    fn bracket(&self, other: &Self) -> Result<Self> {
        gerstenhaber(self, other)
    }
    fn differential(&self) -> Self {
        gerstenhaber(self, &PolyDiffOp::mu(self.dim())).expect("same dimension")
    }
    fn add_scaled(&mut self, other: &Self, s: &Rational) {
        if other.is_zero() || s.is_zero() {
            return;
        }
        if PolyDiffOp::is_zero(self) && self.arity() != other.arity() {
            *self = other.scale(s);
            return;
        }
        PolyDiffOp::add_scaled(self, other, s);
    }
}

fn check_no_constant<E: GradedLie>(s: &HSeries<E>) -> Result<()> {
    if !s.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    Ok(())
}

fn check_order<A, B>(a: &HSeries<A>, b: &HSeries<B>) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::TruncationMismatch(a.order(), b.order()));
    }
    Ok(())
}

/// Coefficientwise bracket of two ℏ-series, truncated.
pub fn series_bracket<E: GradedLie>(a: &HSeries<E>, b: &HSeries<E>) -> Result<HSeries<E>> {
    check_order(a, b)?;
    let deg = a.coeff(0).shifted_degree() + b.coeff(0).shifted_degree();
    let zero = a.coeff(0).zero_of_degree(deg);
    let mut out: Vec<E> = vec![zero; a.order() + 1];
    for (i, ai) in a.coeffs().iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs().iter().enumerate().take(a.order() + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j].add_scaled(&ai.bracket(bj)?, &Rational::one());
        }
    }
    Ok(HSeries::from_coeffs(out))
}

fn series_add_scaled<E: GradedLie>(acc: &mut HSeries<E>, other: &HSeries<E>, s: &Rational) {
    for k in 0..=acc.order() {
        acc.coeff_mut(k).add_scaled(other.coeff(k), s);
    }
}

fn series_scale<E: GradedLie>(a: &HSeries<E>, s: &Rational) -> HSeries<E> {
    let mut out = a.map(|c| c.zero_of_degree(c.shifted_degree()));
    series_add_scaled(&mut out, a, s);
    out
}

/// `d s_k + ½ Σ_{i+j=k} [s_i, s_j]` for `k = 0..=N` (the `k = 0` entry is
/// always zero for valid input).
pub fn mc_residual<E: GradedLie>(s: &HSeries<E>) -> Result<Vec<E>> {
    check_no_constant(s)?;
    let mut out = Vec::with_capacity(s.order() + 1);
    let half = Rational::new(1, 2);
    for k in 0..=s.order() {
        let mut r = s.coeff(k).differential();
        for i in 1..k {
            r.add_scaled(&s.coeff(i).bracket(s.coeff(k - i))?, &half);
        }
        out.push(r);
    }
    Ok(out)
}

pub fn mc_residual_vanishes<E: GradedLie>(s: &HSeries<E>) -> Result<bool> {
    Ok(mc_residual(s)?.iter().all(GradedLie::is_zero))
}

/// `α·l = l + Σ_{k≥1} Y_k/k!` with `Y₁ = dα + [α,l]`, `Y_{k+1} = [α, Y_k]`,
/// i.e. `exp(ad_α)(θ + l) − θ`. Terminates because `Y_k = O(ℏ^k)`.
pub fn gauge_act<E: GradedLie>(alpha: &HSeries<E>, l: &HSeries<E>) -> Result<HSeries<E>> {
    check_order(alpha, l)?;
    check_no_constant(alpha)?;
    check_no_constant(l)?;
    let mut y = series_bracket(alpha, l)?;
    let da = alpha.map(GradedLie::differential);
    series_add_scaled(&mut y, &da, &Rational::one());
    let mut out = l.clone();
    for k in 1..=alpha.order() {
        series_add_scaled(&mut out, &y, &Rational::inv_factorial(k));
        y = series_bracket(alpha, &y)?;
    }
    Ok(out)
}

/// Highest truncation order for which [`bch_compose`] is exact.
pub const BCH_MAX_ORDER: usize = 4;

/// `Z` with `exp(ad_Z) = exp(ad_X) exp(ad_Y)`:
/// `X + Y + ½[X,Y] + (1/12)([X,[X,Y]] + [Y,[Y,X]]) − (1/24)[Y,[X,[X,Y]]]`,
/// exact through `ℏ⁴` since brackets of `k` elements are `O(ℏ^k)`.
pub fn bch_compose<E: GradedLie>(x: &HSeries<E>, y: &HSeries<E>) -> Result<HSeries<E>> {
    check_order(x, y)?;
    check_no_constant(x)?;
    check_no_constant(y)?;
    if x.order() > BCH_MAX_ORDER {
        return Err(Error::BchDepth { max: BCH_MAX_ORDER, requested: x.order() });
    }
    let xy = series_bracket(x, y)?;
    let yx = series_scale(&xy, &Rational::from_int(-1));
    let xxy = series_bracket(x, &xy)?;
    let yyx = series_bracket(y, &yx)?;
    let yxxy = series_bracket(y, &xxy)?;
    let mut z = x.clone();
    series_add_scaled(&mut z, y, &Rational::one());
    series_add_scaled(&mut z, &xy, &Rational::new(1, 2));
    series_add_scaled(&mut z, &xxy, &Rational::new(1, 12));
    series_add_scaled(&mut z, &yyx, &Rational::new(1, 12));
    series_add_scaled(&mut z, &yxxy, &Rational::new(-1, 24));
    Ok(z)
}

/// Strip `μ` from a star product.
pub fn star_to_mc(star: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    let dim = star.coeff(0).dim();
    if star.coeff(0) != &PolyDiffOp::mu(dim) {
        return Err(Error::WrongConstantTerm);
    }
    let mut out = star.clone();
    *out.coeff_mut(0) = PolyDiffOp::zero(dim, 2);
    Ok(out)
}

/// Attach `μ` to an MC element.
pub fn mc_to_star(m: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    if !m.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let mut out = m.clone();
    *out.coeff_mut(0) = PolyDiffOp::mu(m.coeff(0).dim());
    Ok(out)
}

/// Composition of two series of 1-ary operators.
pub fn compose_unary(a: &HSeries<PolyDiffOp>, b: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    let dim = a.coeff(0).dim();
    a.convolve(
        b,
        || PolyDiffOp::zero(dim, 1),
        |x, y| circle_i(x, y, 1).expect("unary composition"),
        |acc, v| acc.add_assign_ref(&v),
    )
}

/// `exp(α) = Σ α^k/k!` as a series of 1-ary operators.
pub fn exp_unary(alpha: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    check_no_constant(alpha)?;
    let dim = alpha.coeff(0).dim();
    let n = alpha.order();
    let mut out = HSeries::from_coeffs(vec![PolyDiffOp::zero(dim, 1); n + 1]);
    *out.coeff_mut(0) = PolyDiffOp::identity(dim);
    let mut power = out.clone();
    for k in 1..=n {
        power = compose_unary(&power, alpha)?;
        for i in 0..=n {
            out.coeff_mut(i).add_scaled(power.coeff(i), &Rational::inv_factorial(k));
        }
    }
    Ok(out)
}

/// `B(E⊗E)` for a series of bidifferential `B` and 1-ary `E`.
pub fn precompose_both(b: &HSeries<PolyDiffOp>, e: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    check_order(b, e)?;
    let dim = b.coeff(0).dim();
    let n = b.order();
    let mut out = vec![PolyDiffOp::zero(dim, 2); n + 1];
    for (i, bi) in b.coeffs().iter().enumerate() {
        for (j, ej) in e.coeffs().iter().enumerate().take(n + 1 - i) {
            let first = circle_i(bi, ej, 1)?;
            if first.is_zero() {
                continue;
            }
            for (k, ek) in e.coeffs().iter().enumerate().take(n + 1 - i - j) {
                out[i + j + k].add_assign_ref(&circle_i(&first, ek, 2)?);
            }
        }
    }
    Ok(HSeries::from_coeffs(out))
}

/// Checks `star₂(e^α ⊗ e^α) = e^α star₁` through the common truncation
/// order.
pub fn star_gauge_equivalent(
    star1: &HSeries<PolyDiffOp>,
    star2: &HSeries<PolyDiffOp>,
    alpha: &HSeries<PolyDiffOp>,
) -> Result<bool> {
    check_order(star1, star2)?;
    check_order(star1, alpha)?;
    let dim = star1.coeff(0).dim();
    if star1.coeff(0) != &PolyDiffOp::mu(dim) || star2.coeff(0) != &PolyDiffOp::mu(dim) {
        return Err(Error::WrongConstantTerm);
    }
    let e = exp_unary(alpha)?;
    let lhs = precompose_both(star2, &e)?;
    let rhs = e.convolve(
        star1,
        || PolyDiffOp::zero(dim, 2),
        |x, y| circle_i(x, y, 1).expect("compose"),
        |acc, v| acc.add_assign_ref(&v),
    )?;
    Ok(lhs == rhs)
}

/// Antisymmetric part `c(f,g) − c(g,f)` of a bidifferential operator. For a
/// Hochschild 2-cocycle this vanishes iff the cocycle is a coboundary, so a
/// nonzero value proves no first-order gauge transformation can remove it.
pub fn antisymmetric_part(c: &PolyDiffOp) -> Result<PolyDiffOp> {
    if c.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, got: c.arity() });
    }
    let swapped = PolyDiffOp::from_terms(
        c.dim(),
        2,
        c.terms().map(|(d, p)| (vec![d[1].clone(), d[0].clone()], p.clone())),
    )?;
    c.sub(&swapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MultiIndex, Poly};
    use crate::dpoly::{hkr, hochschild_delta, moyal_series};

    fn pv(d: usize, axes: &[usize], c: Poly) -> PolyVector {
        PolyVector::basis(d, axes, c).unwrap()
    }

    fn hseries<E: Clone>(zero: E, terms: &[(usize, E)], n: usize) -> HSeries<E> {
        let mut v = vec![zero; n + 1];
        for (k, e) in terms {
            v[*k] = e.clone();
        }
        HSeries::from_coeffs(v)
    }

    #[test]
    fn constant_poisson_is_mc() {
        let pi = pv(3, &[0, 2], Poly::one(3));
        let s = hseries(PolyVector::zero(3, 2), &[(1, pi)], 3);
        assert!(mc_residual_vanishes(&s).unwrap());
    }

    #[test]
    fn non_poisson_fails_at_order_two() {
        let mut pi = pv(3, &[0, 1], &Poly::var(3, 0) * &Poly::var(3, 1));
        pi.add_component(&[1, 2], &Poly::one(3)).unwrap();
        let s = hseries(PolyVector::zero(3, 2), &[(1, pi)], 2);
        let r = mc_residual(&s).unwrap();
        assert!(r[1].is_zero());
        assert!(!r[2].is_zero());
    }

    #[test]
    fn moyal_tail_is_mc() {
        let pi = pv(2, &[0, 1], Poly::constant(2, Rational::new(3, 2)));
        let star = moyal_series(&pi, 3).unwrap();
        let m = star_to_mc(&star).unwrap();
        assert!(mc_residual_vanishes(&m).unwrap());
        assert_eq!(mc_to_star(&m).unwrap(), star);
    }

    #[test]
    fn nonzero_constant_rejected() {
        let s = hseries(PolyVector::zero(2, 2), &[(0, pv(2, &[0, 1], Poly::one(2)))], 1);
        assert!(matches!(mc_residual(&s), Err(Error::NonzeroConstantTerm)));
        let star = moyal_series(&pv(2, &[0, 1], Poly::one(2)), 1).unwrap();
        assert!(matches!(star_to_mc(&star.map(|b| b.scale(&Rational::from_int(2)))), Err(Error::WrongConstantTerm)));
    }

    #[test]
    fn zero_gauge_is_identity() {
        let pi = pv(2, &[0, 1], Poly::var(2, 0));
        let l = hseries(PolyVector::zero(2, 2), &[(1, pi)], 2);
        let a = hseries(PolyVector::zero(2, 1), &[], 2);
        assert_eq!(gauge_act(&a, &l).unwrap(), l);
        let zero_l = hseries(PolyVector::zero(2, 2), &[], 1);
        let a1 = hseries(PolyVector::zero(2, 1), &[(1, pv(2, &[0], Poly::var(2, 1)))], 1);
        assert!(gauge_act(&a1, &zero_l).unwrap().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn bch_trivial_cases() {
        let x = hseries(PolyVector::zero(2, 1), &[(1, pv(2, &[0], Poly::var(2, 1)))], 3);
        let zero = hseries(PolyVector::zero(2, 1), &[], 3);
        assert_eq!(bch_compose(&x, &zero).unwrap(), x);
        let y = hseries(PolyVector::zero(2, 1), &[(2, pv(2, &[0], Poly::one(2)))], 3);
        let x1 = hseries(PolyVector::zero(2, 1), &[(1, pv(2, &[1], Poly::one(2)))], 3);
        let mut sum = x1.clone();
        series_add_scaled(&mut sum, &y, &Rational::one());
        assert_eq!(bch_compose(&x1, &y).unwrap(), sum);
        let deep = hseries(PolyVector::zero(2, 1), &[], 5);
        assert!(matches!(bch_compose(&deep, &deep), Err(Error::BchDepth { .. })));
    }

    #[test]
    fn d_poly_gauge_matches_conjugation() {
        let dim = 2;
        let mi = |v: &[u32]| MultiIndex::from_vec(v.to_vec());
        let a1 = PolyDiffOp::monomial(vec![mi(&[0, 1])], Poly::var(dim, 0));
        let a2 = PolyDiffOp::monomial(vec![mi(&[2, 0])], Poly::one(dim));
        let alpha = hseries(PolyDiffOp::zero(dim, 1), &[(1, a1), (2, a2)], 3);
        let star = moyal_series(&pv(dim, &[0, 1], Poly::one(dim)), 3).unwrap();
        let l = star_to_mc(&star).unwrap();
        let moved = mc_to_star(&gauge_act(&alpha, &l).unwrap()).unwrap();
        assert!(star_gauge_equivalent(&star, &moved, &alpha).unwrap());
        assert!(!star_gauge_equivalent(&star, &star, &alpha).unwrap());
        assert!(mc_residual_vanishes(&star_to_mc(&moved).unwrap()).unwrap());
    }

    #[test]
    fn hkr_bivector_is_non_trivial_cocycle() {
        let c = hkr(&pv(2, &[0, 1], Poly::one(2)));
        assert!(hochschild_delta(&c).is_zero());
        assert!(!antisymmetric_part(&c).unwrap().is_zero());
    }
}
