//! Sparse multivariate polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{MultiIndex, Rational};
use crate::error::{Error, Result};

/// Polynomial in `dim` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate function `x_axis` (0-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, axis), Rational::one())
    }

    pub fn monomial(exps: MultiIndex, c: Rational) -> Self {
        let dim = exps.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { dim, terms }
    }

    pub fn from_terms(dim: usize, it: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut p = Poly::zero(dim);
        for (m, c) in it {
            assert_eq!(m.dim(), dim, "monomial dimension");
            p.add_term(m, &c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(MultiIndex::is_zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    pub fn add_term(&mut self, m: MultiIndex, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, s: &Rational) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    fn check_dim(&self, other: &Poly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// `∂/∂x_axis` (0-based axis).
    pub fn partial(&self, axis: usize) -> Result<Poly> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.get(axis);
            if e == 0 {
                continue;
            }
            let mut v = m.as_slice().to_vec();
            v[axis] -= 1;
            out.add_term(MultiIndex::from_vec(v), &(c * &Rational::from_int(e as i64)));
        }
        Ok(out)
    }

    /// `∂^d` for a derivative multi-index `d`.
    pub fn derivative(&self, d: &MultiIndex) -> Poly {
        assert_eq!(d.dim(), self.dim, "derivative multi-index dimension");
        if d.is_zero() {
            return self.clone();
        }
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some(rest) = m.checked_sub(d) {
                let mut f: i64 = 1;
                for (&e, &k) in m.as_slice().iter().zip(d.as_slice()) {
                    for t in 0..k {
                        f *= (e - t) as i64;
                    }
                }
                out.add_term(rest, &(c * &Rational::from_int(f)));
            }
        }
        out
    }

    /// Multiply by the monomial `c·x^m`.
    pub fn mul_monomial(&self, m: &MultiIndex, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.add(m), v * c)).collect(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                c.to_f64()
                    * m.as_slice()
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.add(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Rational::from_int(-1))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}")?;
            for (i, &e) in m.as_slice().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermRepr {
    coeff: Rational,
    exps: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<PolyTermRepr>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PolyTermRepr { coeff: c.clone(), exps: m.as_slice().to_vec() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let mut p = Poly::zero(r.dim);
        for t in r.terms {
            if t.exps.len() != r.dim {
                return Err(serde::de::Error::custom(format!(
                    "exps has length {} but dim is {}",
                    t.exps.len(),
                    r.dim
                )));
            }
            p.add_term(MultiIndex::from_vec(t.exps), &t.coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    #[test]
    fn additive_inverse_is_zero() {
        let a = x(0);
        assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let lhs = &(&x(0) + &x(1)) * &(&x(0) - &x(1));
        // collect x1² - x2² term by term
        let expected = Poly::from_terms(
            2,
            [
                (MultiIndex::from_vec(vec![2, 0]), Rational::one()),
                (MultiIndex::from_vec(vec![0, 2]), Rational::from_int(-1)),
            ],
        );
        assert_eq!(lhs, expected);
    }

    #[test]
    fn scale_by_rational() {
        let p = &x(0) * &x(1);
        let s = p.scale(&Rational::new(3, 2));
        assert_eq!(s.coeff(&MultiIndex::from_vec(vec![1, 1])), Rational::new(3, 2));
        assert!(p.scale(&Rational::zero()).is_zero());
    }

    #[test]
    fn partials() {
        let x1sq = &x(0) * &x(0);
        assert_eq!(x1sq.partial(0).unwrap(), x(0).scale(&Rational::from_int(2)));
        assert!(x(0).partial(1).unwrap().is_zero());
        let p = &x(0) * &(&x(1) * &x(1));
        assert_eq!(p.partial(0).unwrap(), &x(1) * &x(1));
        assert!(matches!(p.partial(2), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Poly::var(2, 0);
        let b = Poly::var(3, 0);
        assert!(matches!(a.checked_add(&b), Err(Error::DimensionMismatch(2, 3))));
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn derivative_matches_iterated_partials() {
        let p = Poly::from_terms(
            2,
            [
                (MultiIndex::from_vec(vec![3, 2]), Rational::new(1, 3)),
                (MultiIndex::from_vec(vec![1, 1]), Rational::from_int(5)),
            ],
        );
        let d = MultiIndex::from_vec(vec![2, 1]);
        let iter = p.partial(0).unwrap().partial(0).unwrap().partial(1).unwrap();
        assert_eq!(p.derivative(&d), iter);
    }

    #[test]
    fn json_shape() {
        let p = Poly::from_terms(2, [(MultiIndex::from_vec(vec![1, 0]), Rational::new(-1, 2))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":2,"terms":[{"coeff":"-1/2","exps":[1,0]}]}"#);
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"dim":2,"terms":[{"coeff":"1","exps":[1]}]}"#;
        assert!(serde_json::from_str::<Poly>(bad).is_err());
    }
}
