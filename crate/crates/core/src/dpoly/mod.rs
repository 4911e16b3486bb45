//! Polydifferential operators on polynomials.
//!
//! An arity-`m` operator is `Σ c(x) ∂^{D₁}f₁ ⋯ ∂^{D_m}f_m`, stored with one
//! coefficient per derivative signature `(D₁,…,D_m)`. Equality of operators is
//! equality of these normal forms.

mod bracket;
mod hkr;
mod moyal;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{MultiIndex, Poly, Rational};
use crate::error::{Error, Result};

pub use bracket::{assoc_defect, circle, circle_i, gerstenhaber, hochschild_delta, hochschild_delta_eval};
pub use hkr::hkr;
pub use moyal::{moyal, moyal_op, moyal_series, star_apply, star_apply_series};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyDiffOp {
    dim: usize,
    arity: usize,
    terms: BTreeMap<Vec<MultiIndex>, Poly>,
}

impl PolyDiffOp {
    pub fn zero(dim: usize, arity: usize) -> Self {
        PolyDiffOp { dim, arity, terms: BTreeMap::new() }
    }

    /// The arity-0 operator returning `f`.
    pub fn constant(f: Poly) -> Self {
        let mut op = Self::zero(f.dim(), 0);
        op.add_term(Vec::new(), &f);
        op
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim, 1);
        op.add_term(vec![MultiIndex::zero(dim)], &Poly::one(dim));
        op
    }

    /// Pointwise multiplication `μ(f,g) = fg`.
    pub fn mu(dim: usize) -> Self {
        let mut op = Self::zero(dim, 2);
        op.add_term(vec![MultiIndex::zero(dim); 2], &Poly::one(dim));
        op
    }

    /// Single term `c · ∂^{derivs₁} ⊗ … ⊗ ∂^{derivs_m}`.
    pub fn monomial(derivs: Vec<MultiIndex>, c: Poly) -> Self {
        let mut op = Self::zero(c.dim(), derivs.len());
        op.add_term(derivs, &c);
        op
    }

    pub fn from_terms(
        dim: usize,
        arity: usize,
        it: impl IntoIterator<Item = (Vec<MultiIndex>, Poly)>,
    ) -> Result<Self> {
        let mut op = Self::zero(dim, arity);
        for (d, c) in it {
            if d.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: d.len() });
            }
            if c.dim() != dim {
                return Err(Error::DimensionMismatch(dim, c.dim()));
            }
            if let Some(m) = d.iter().find(|m| m.dim() != dim) {
                return Err(Error::DimensionMismatch(dim, m.dim()));
            }
            op.add_term(d, &c);
        }
        Ok(op)
    }

    pub(crate) fn add_term(&mut self, derivs: Vec<MultiIndex>, c: &Poly) {
        debug_assert_eq!(derivs.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(derivs) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree in the shifted grading, `arity − 1`.
    pub fn shifted_degree(&self) -> i64 {
        self.arity as i64 - 1
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<MultiIndex>, &Poly)> {
        self.terms.iter()
    }

    /// Highest derivative order appearing in any slot.
    pub fn max_slot_order(&self) -> u32 {
        self.terms.keys().flat_map(|d| d.iter().map(MultiIndex::degree)).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &Rational::from_int(-1));
        Ok(out)
    }

    /// Panics on dimension or arity mismatch.
    pub fn add_assign_ref(&mut self, other: &Self) {
        self.add_scaled(other, &Rational::one());
    }

    /// `self += s·other`; panics on dimension or arity mismatch.
    pub fn add_scaled(&mut self, other: &Self, s: &Rational) {
        assert_eq!((self.dim, self.arity), (other.dim, other.arity), "operator shape mismatch");
        if s.is_zero() {
            return;
        }
        for (d, c) in &other.terms {
            self.add_term(d.clone(), &c.scale(s));
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.dim, self.arity);
        out.add_scaled(self, s);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from_int(-1))
    }

    /// Multiply every coefficient by `f`.
    pub fn mul_poly(&self, f: &Poly) -> Self {
        let mut out = Self::zero(self.dim, self.arity);
        for (d, c) in &self.terms {
            out.add_term(d.clone(), &(c * f));
        }
        out
    }

    pub fn apply(&self, args: &[&Poly]) -> Result<Poly> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.dim() != self.dim) {
            return Err(Error::DimensionMismatch(self.dim, a.dim()));
        }
        let mut cache: Vec<BTreeMap<&MultiIndex, Poly>> = vec![BTreeMap::new(); self.arity];
        let mut out = Poly::zero(self.dim);
        for (derivs, c) in &self.terms {
            let mut term = c.clone();
            for (k, d) in derivs.iter().enumerate() {
                let dk = cache[k].entry(d).or_insert_with(|| args[k].derivative(d));
                term = &term * dk;
                if term.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&term);
        }
        Ok(out)
    }
}

impl std::fmt::Debug for PolyDiffOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolyDiffOp(d={}, m={}) {{", self.dim, self.arity)?;
        for (d, c) in &self.terms {
            write!(f, " {d:?}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

/// Element of `D_poly` with parts of several arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DPolyElement {
    dim: usize,
    parts: BTreeMap<usize, PolyDiffOp>,
}

impl DPolyElement {
    pub fn zero(dim: usize) -> Self {
        DPolyElement { dim, parts: BTreeMap::new() }
    }

    pub fn from_parts(dim: usize, parts: impl IntoIterator<Item = PolyDiffOp>) -> Result<Self> {
        let mut out = Self::zero(dim);
        for p in parts {
            out.add_part(p)?;
        }
        Ok(out)
    }

    pub fn add_part(&mut self, p: PolyDiffOp) -> Result<()> {
        if p.dim != self.dim {
            return Err(Error::DimensionMismatch(self.dim, p.dim));
        }
        let arity = p.arity;
        let merged = match self.parts.remove(&arity) {
            Some(q) => q.add(&p)?,
            None => p,
        };
        if !merged.is_zero() {
            self.parts.insert(arity, merged);
        }
        Ok(())
    }

    pub fn part(&self, arity: usize) -> Option<&PolyDiffOp> {
        self.parts.get(&arity)
    }

    pub fn parts(&self) -> impl Iterator<Item = &PolyDiffOp> {
        self.parts.values()
    }

    /// Bilinear extension of the Gerstenhaber bracket.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for a in self.parts.values() {
            for b in other.parts.values() {
                out.add_part(gerstenhaber(a, b)?)?;
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Poly,
    derivs: Vec<MultiIndex>,
}

#[derive(Serialize, Deserialize)]
struct OpRepr {
    dim: usize,
    arity: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for PolyDiffOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpRepr {
            dim: self.dim,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| TermRepr { coeff: c.clone(), derivs: d.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyDiffOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = OpRepr::deserialize(d)?;
        PolyDiffOp::from_terms(r.dim, r.arity, r.terms.into_iter().map(|t| (t.derivs, t.coeff)))
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::from_vec(v.to_vec())
    }

    #[test]
    fn apply_basics() {
        let f = &Poly::var(2, 0) * &Poly::var(2, 1);
        assert_eq!(PolyDiffOp::identity(2).apply(&[&f]).unwrap(), f);
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        assert_eq!(PolyDiffOp::mu(2).apply(&[&x1, &x2]).unwrap(), &x1 * &x2);
        let op = PolyDiffOp::monomial(vec![mi(&[1, 0]), mi(&[0, 1])], Poly::one(2));
        assert_eq!(op.apply(&[&x1, &x2]).unwrap(), Poly::one(2));
        assert!(matches!(op.apply(&[&x1]), Err(Error::ArityMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn normal_form_merges_terms() {
        let a = PolyDiffOp::monomial(vec![mi(&[1])], Poly::var(1, 0));
        let b = a.neg();
        assert!(a.add(&b).unwrap().is_zero());
        assert_eq!(a.add(&a).unwrap().len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let op = PolyDiffOp::monomial(vec![mi(&[1, 0]), mi(&[0, 2])], Poly::var(2, 1));
        let s = serde_json::to_string(&op).unwrap();
        assert!(s.starts_with(r#"{"dim":2,"arity":2,"terms":[{"coeff":"#));
        assert_eq!(serde_json::from_str::<PolyDiffOp>(&s).unwrap(), op);
        let bad = r#"{"dim":2,"arity":2,"terms":[{"coeff":{"dim":2,"terms":[]},"derivs":[[0,0]]}]}"#;
        assert!(serde_json::from_str::<PolyDiffOp>(bad).is_err());
    }
}
