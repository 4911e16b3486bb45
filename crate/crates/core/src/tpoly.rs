//! Polyvector fields with polynomial coefficients and the Schouten–Nijenhuis
//! bracket.
//!
//! A degree-`p` field is stored as `Σ_{i₁<…<i_p} ξ^{i₁…i_p} ∂_{i₁}∧…∧∂_{i_p}`.
//! Axes are 0-based in the API and 1-based in JSON. The bivector convention is
//! `{f,g} = Σ_{i<j} Π^{ij}(∂_i f ∂_j g − ∂_j f ∂_i g)`, so `Π = ∂₁∧∂₂` gives
//! `{x₁,x₂} = 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{MultiIndex, Poly, Rational};
use crate::error::{Error, Result};

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    // insertion sort counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyVector {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly>,
}

impl PolyVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PolyVector { dim, degree, components: BTreeMap::new() }
    }

    /// Degree-0 field.
    pub fn scalar(f: Poly) -> Self {
        let mut v = Self::zero(f.dim(), 0);
        v.add_component(&[], &f).expect("empty index");
        v
    }

    /// `c · ∂_{axes[0]}∧…` for arbitrary (possibly unsorted) axes.
    pub fn basis(dim: usize, axes: &[usize], c: Poly) -> Result<Self> {
        let mut v = Self::zero(dim, axes.len());
        v.add_component(axes, &c)?;
        Ok(v)
    }

    /// Builds a field from `(index tuple, coefficient)` pairs. Tuples need not
    /// be sorted; repeated indices contribute nothing.
    pub fn from_components<I>(dim: usize, degree: usize, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        let mut v = Self::zero(dim, degree);
        for (idx, c) in it {
            if idx.len() != degree {
                return Err(Error::WrongDegree { expected: degree, got: idx.len() });
            }
            v.add_component(&idx, &c)?;
        }
        Ok(v)
    }

    pub fn add_component(&mut self, idx: &[usize], c: &Poly) -> Result<()> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, c.dim()));
        }
        if let Some(&axis) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        if idx.len() != self.degree {
            return Err(Error::WrongDegree { expected: self.degree, got: idx.len() });
        }
        let Some((sorted, sign)) = sort_sign(idx) else {
            return Ok(());
        };
        let entry = self.components.entry(sorted.clone()).or_insert_with(|| Poly::zero(self.dim));
        entry.add_scaled(c, &Rational::from_int(sign));
        if entry.is_zero() {
            self.components.remove(&sorted);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.components.iter()
    }

    /// The skew tensor component `ξ^{idx}` for any index order.
    pub fn tensor(&self, idx: &[usize]) -> Poly {
        match sort_sign(idx) {
            Some((s, sign)) => match self.components.get(&s) {
                Some(c) => c.scale(&Rational::from_int(sign)),
                None => Poly::zero(self.dim),
            },
            None => Poly::zero(self.dim),
        }
    }

    /// True if every coefficient is a constant.
    pub fn is_constant(&self) -> bool {
        self.components.values().all(Poly::is_constant)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::WrongDegree { expected: self.degree, got: other.degree });
        }
        let mut out = self.clone();
        for (k, c) in &other.components {
            out.add_component(k, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        if s.is_zero() {
            return out;
        }
        out.components = self.components.iter().map(|(k, c)| (k.clone(), c.scale(s))).collect();
        out
    }

    pub fn mul_poly(&self, f: &Poly) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (k, c) in &self.components {
            let p = c * f;
            if !p.is_zero() {
                out.components.insert(k.clone(), p);
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        if out.degree > self.dim {
            return Ok(out);
        }
        for (ka, ca) in &self.components {
            for (kb, cb) in &other.components {
                let mut idx = ka.clone();
                idx.extend_from_slice(kb);
                out.add_component(&idx, &(ca * cb))?;
            }
        }
        Ok(out)
    }

    /// `∂/∂ζ_axis` acting from the right: `ζ_axis` is moved to the end with
    /// the Koszul sign, then removed.
    fn odd_partial(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (k, c) in &self.components {
            if let Some(pos) = k.iter().position(|&i| i == axis) {
                let mut rest = k.clone();
                rest.remove(pos);
                let c = if (k.len() - 1 - pos) % 2 == 0 { c.clone() } else { -c };
                out.components.insert(rest, c);
            }
        }
        out
    }

    fn even_partial(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (k, c) in &self.components {
            let d = c.partial(axis).expect("axis in range");
            if !d.is_zero() {
                out.components.insert(k.clone(), d);
            }
        }
        out
    }

    fn bullet(&self, other: &Self) -> Result<Self> {
        let deg = (self.degree + other.degree).saturating_sub(1);
        let mut out = Self::zero(self.dim, deg);
        if self.degree == 0 {
            return Ok(out);
        }
        for i in 0..self.dim {
            let a = self.odd_partial(i);
            if a.is_zero() {
                continue;
            }
            let b = other.even_partial(i);
            if b.is_zero() {
                continue;
            }
            out = out.add(&a.wedge(&b)?)?;
        }
        Ok(out)
    }

    /// Schouten–Nijenhuis bracket `a•b − (−1)^{(p₁−1)(p₂−1)} b•a`.
    /// For two scalars the result is the zero scalar.
    pub fn sn_bracket(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let ab = self.bullet(other)?;
        let ba = other.bullet(self)?;
        let p1 = self.degree as i64 - 1;
        let p2 = other.degree as i64 - 1;
        if (p1 * p2).rem_euclid(2) == 0 {
            ab.sub(&ba)
        } else {
            ab.add(&ba)
        }
    }

    /// Contraction with exact differentials: `ξ(df₁,…,df_p)` with
    /// `ξ = Σ_{i₁<…} ξ^I ∂_{i₁}∧…`, i.e. the full antisymmetrized sum.
    pub fn contract(&self, fs: &[&Poly]) -> Result<Poly> {
        if fs.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: fs.len() });
        }
        for f in fs {
            if f.dim() != self.dim {
                return Err(Error::DimensionMismatch(self.dim, f.dim()));
            }
        }
        let mut grads: Vec<Vec<Poly>> = Vec::with_capacity(fs.len());
        for f in fs {
            grads.push((0..self.dim).map(|i| f.partial(i).expect("axis")).collect());
        }
        let mut out = Poly::zero(self.dim);
        let perms = permutations(self.degree);
        for (idx, c) in &self.components {
            for (perm, sign) in &perms {
                // Σ_σ sgn σ Π_k ∂_{idx[σ(k)]} f_k
                let mut term = c.scale(&Rational::from_int(*sign));
                for (k, &s) in perm.iter().enumerate() {
                    term = &term * &grads[k][idx[s]];
                    if term.is_zero() {
                        break;
                    }
                }
                out.add_assign_ref(&term);
            }
        }
        Ok(out)
    }
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let s = sort_sign(&p).map(|(_, s)| s).unwrap_or(0);
            (p, s)
        })
        .collect()
}

fn require_bivector(pi: &PolyVector) -> Result<()> {
    if pi.degree != 2 {
        return Err(Error::WrongDegree { expected: 2, got: pi.degree });
    }
    Ok(())
}

/// `{f,g}` for the bivector `pi`.
pub fn apply_bivector(pi: &PolyVector, f: &Poly, g: &Poly) -> Result<Poly> {
    require_bivector(pi)?;
    pi.contract(&[f, g])
}

/// `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`.
pub fn jacobiator(pi: &PolyVector, f: &Poly, g: &Poly, h: &Poly) -> Result<Poly> {
    let b = |a: &Poly, c: &Poly| apply_bivector(pi, a, c);
    let mut out = b(f, &b(g, h)?)?;
    out.add_assign_ref(&b(g, &b(h, f)?)?);
    out.add_assign_ref(&b(h, &b(f, g)?)?);
    Ok(out)
}

pub fn is_poisson(pi: &PolyVector) -> Result<bool> {
    require_bivector(pi)?;
    Ok(pi.sn_bracket(pi)?.is_zero())
}

/// Linear bivector `Σ_{i<j} c[i][j][k] x_k ∂_i∧∂_j` from structure
/// constants `c[i][j][k] = c^k_{ij}`.
pub fn lie_poisson(c: &[Vec<Vec<Rational>>]) -> Result<PolyVector> {
    let d = c.len();
    for (i, ci) in c.iter().enumerate() {
        if ci.len() != d {
            return Err(Error::DimensionMismatch(d, ci.len()));
        }
        for (j, cij) in ci.iter().enumerate() {
            if cij.len() != d {
                return Err(Error::DimensionMismatch(d, cij.len()));
            }
            for k in 0..d {
                if cij[k] != -&c[j][i][k] {
                    return Err(Error::NonSkew { i, j, k });
                }
            }
        }
    }
    let mut pi = PolyVector::zero(d, 2);
    for i in 0..d {
        for j in i + 1..d {
            let coeff = Poly::from_terms(
                d,
                (0..d).map(|k| (MultiIndex::unit(d, k), c[i][j][k].clone())),
            );
            pi.add_component(&[i, j], &coeff)?;
        }
    }
    Ok(pi)
}

/// Mixed-degree element of `T_poly`, keyed by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPolyElement {
    dim: usize,
    parts: BTreeMap<usize, PolyVector>,
}

impl TPolyElement {
    pub fn zero(dim: usize) -> Self {
        TPolyElement { dim, parts: BTreeMap::new() }
    }

    pub fn from_parts(dim: usize, parts: impl IntoIterator<Item = PolyVector>) -> Result<Self> {
        let mut out = Self::zero(dim);
        for p in parts {
            out.add_part(p)?;
        }
        Ok(out)
    }

    pub fn add_part(&mut self, p: PolyVector) -> Result<()> {
        if p.dim != self.dim {
            return Err(Error::DimensionMismatch(self.dim, p.dim));
        }
        let deg = p.degree;
        let merged = match self.parts.remove(&deg) {
            Some(q) => q.add(&p)?,
            None => p,
        };
        if !merged.is_zero() {
            self.parts.insert(deg, merged);
        }
        Ok(())
    }

    pub fn part(&self, degree: usize) -> Option<&PolyVector> {
        self.parts.get(&degree)
    }

    pub fn parts(&self) -> impl Iterator<Item = &PolyVector> {
        self.parts.values()
    }

    /// Bilinear extension of the SN bracket.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for a in self.parts.values() {
            for b in other.parts.values() {
                out.add_part(a.sn_bracket(b)?)?;
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for PolyVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolyVector(d={}, p={}) {{", self.dim, self.degree)?;
        for (k, c) in &self.components {
            let ix: Vec<usize> = k.iter().map(|i| i + 1).collect();
            write!(f, " {ix:?}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    idx: Vec<usize>,
    poly: Poly,
}

#[derive(Serialize, Deserialize)]
struct PolyVectorRepr {
    dim: usize,
    degree: usize,
    components: Vec<ComponentRepr>,
}

impl Serialize for PolyVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyVectorRepr {
            dim: self.dim,
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(k, c)| ComponentRepr { idx: k.iter().map(|i| i + 1).collect(), poly: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PolyVectorRepr::deserialize(d)?;
        let mut v = PolyVector::zero(r.dim, r.degree);
        for c in r.components {
            if c.idx.contains(&0) {
                return Err(D::Error::custom("component indices are 1-based"));
            }
            let idx: Vec<usize> = c.idx.iter().map(|i| i - 1).collect();
            v.add_component(&idx, &c.poly).map_err(D::Error::custom)?;
        }
        Ok(v)
    }
}
