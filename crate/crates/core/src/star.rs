//! Assembly of `U_n` from graph tables and of the star product
//! `P(Π) = Σ_j ℏ^j/j! · U_j(Π̃,…,Π̃)` with `Π̃ = 2Π`, so that the first-order
//! term is `{f,g} = Σ T^{ij}∂_i f ∂_j g`.
//!
//! Operators stay exact; Monte-Carlo weights enter linearly as
//! `exact + Σ_Γ w_Γ·X_Γ`, and every numeric verdict compares a coefficient
//! against `Σ_Γ σ_Γ |X_Γ|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{MultiIndex, Poly, Rational};
use crate::dpoly::{circle_i, gerstenhaber, hkr, hochschild_delta, PolyDiffOp};
use crate::error::{Error, Result};
use crate::graphs::{sorted_representatives, AdmissibleGraph, GraphKey, DEFAULT_GUARD};
use crate::par::Exec;
use crate::tpoly::{is_poisson, permutations, PolyVector};
use crate::weights::{integrate_weight_with, wedge_weight_closed_form, WeightCache, WeightEstimate};

/// Highest ℏ-order [`build_star`] assembles.
pub const MAX_STAR_ORDER: usize = 2;

/// Verdict multiple of the propagated standard error.
pub const SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Exact { value: Rational },
    MonteCarlo(WeightEstimate),
}

pub trait WeightSource {
    fn weight(&self, g: &AdmissibleGraph) -> Option<Weight>;
}

/// In-memory table of weights keyed by graph.
#[derive(Clone, Debug, Default)]
pub struct WeightTable(pub BTreeMap<GraphKey, Weight>);

impl WeightTable {
    pub fn from_cache(cache: &WeightCache) -> Self {
        let mut t = WeightTable::default();
        for (k, r) in cache.records() {
            t.0.insert(k.clone(), Weight::MonteCarlo(r.into()));
        }
        t
    }

    /// Fresh estimates for `graphs`; graph `i` uses seed `seed + i`.
    pub fn estimate(graphs: &[AdmissibleGraph], samples: u64, seed: u64, exec: Exec) -> Result<Self> {
        let mut t = WeightTable::default();
        for (i, g) in graphs.iter().enumerate() {
            let e = integrate_weight_with(g, samples, seed.wrapping_add(i as u64), exec)?;
            t.0.insert(g.key(), Weight::MonteCarlo(e));
        }
        Ok(t)
    }
}

impl WeightSource for WeightTable {
    fn weight(&self, g: &AdmissibleGraph) -> Option<Weight> {
        self.0.get(&g.key()).cloned()
    }
}

impl WeightSource for WeightCache {
    fn weight(&self, g: &AdmissibleGraph) -> Option<Weight> {
        self.get(&g.key()).map(|r| Weight::MonteCarlo(r.into()))
    }
}

/// The one-vertex weights `1/n̄!`; nothing else.
pub struct ClosedForms;

impl WeightSource for ClosedForms {
    fn weight(&self, g: &AdmissibleGraph) -> Option<Weight> {
        (g.n() == 1 && g.has_sorted_stars() && g.stars()[0].iter().all(|t| matches!(t, crate::graphs::Target::Q(_))))
            .then(|| Weight::Exact { value: wedge_weight_closed_form(g.nbar()) })
    }
}

/// Closed forms first, then `rest`.
pub struct WithClosedForms<'a>(pub &'a dyn WeightSource);

impl WeightSource for WithClosedForms<'_> {
    fn weight(&self, g: &AdmissibleGraph) -> Option<Weight> {
        ClosedForms.weight(g).or_else(|| self.0.weight(g))
    }
}

/// The sorted-star graphs of `U_n` with `n̄` boundary vertices and their
/// weights. `degrees`, when given, keeps only graphs whose star sizes match.
#[derive(Clone, Debug)]
pub struct UnComponent {
    pub n: usize,
    pub nbar: usize,
    pub table: Vec<(AdmissibleGraph, Weight)>,
}

/// Graphs needed for `U_n` on inputs of the given degrees with `n̄`
/// boundary vertices.
pub fn un_graphs(n: usize, nbar: usize, degrees: Option<&[usize]>) -> Result<Vec<AdmissibleGraph>> {
    if 2 * n + nbar < 2 {
        return Err(Error::Unsupported(format!("U_{n} with {nbar} boundary vertices")));
    }
    let e = 2 * n + nbar - 2;
    Ok(sorted_representatives(n, nbar, e, DEFAULT_GUARD)?
        .into_iter()
        .filter(|g| degrees.is_none_or(|d| g.star_sizes() == d))
        .collect())
}

pub fn build_un(
    n: usize,
    nbar: usize,
    degrees: Option<&[usize]>,
    source: &dyn WeightSource,
) -> Result<UnComponent> {
    let graphs = un_graphs(n, nbar, degrees)?;
    let mut table = Vec::with_capacity(graphs.len());
    let mut missing = Vec::new();
    for g in graphs {
        assert!(g.degree_identity_holds(), "degree bookkeeping fails on {}", g.key());
        match WithClosedForms(source).weight(&g) {
            Some(w) => table.push((g, w)),
            None => missing.push(g.key().0),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingWeights(missing));
    }
    Ok(UnComponent { n, nbar, table })
}

/// An operator `exact + Σ_Γ w_Γ·X_Γ` with Monte-Carlo weights `w_Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedOp {
    pub exact: PolyDiffOp,
    pub terms: BTreeMap<GraphKey, (WeightEstimate, PolyDiffOp)>,
}

impl WeightedOp {
    pub fn exact(op: PolyDiffOp) -> Self {
        WeightedOp { exact: op, terms: BTreeMap::new() }
    }

    pub fn zero(dim: usize, arity: usize) -> Self {
        Self::exact(PolyDiffOp::zero(dim, arity))
    }

    pub fn dim(&self) -> usize {
        self.exact.dim()
    }

    pub fn arity(&self) -> usize {
        self.exact.arity()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_weighted(&mut self, key: GraphKey, w: &Weight, op: &PolyDiffOp) {
        match w {
            Weight::Exact { value } => self.exact.add_scaled(op, value),
            Weight::MonteCarlo(e) => {
                let slot = self
                    .terms
                    .entry(key)
                    .or_insert_with(|| (e.clone(), PolyDiffOp::zero(op.dim(), op.arity())));
                slot.1.add_assign_ref(op);
            }
        }
    }

    /// `self += s·other`.
    pub fn add_scaled(&mut self, other: &WeightedOp, s: &Rational) {
        self.exact.add_scaled(&other.exact, s);
        for (k, (e, op)) in &other.terms {
            let slot = self.terms.entry(k.clone()).or_insert_with(|| (e.clone(), PolyDiffOp::zero(op.dim(), op.arity())));
            slot.1.add_scaled(op, s);
        }
    }

    /// Applies an exact linear map to every constituent.
    pub fn map(&self, f: impl Fn(&PolyDiffOp) -> Result<PolyDiffOp>) -> Result<WeightedOp> {
        let mut out = WeightedOp::exact(f(&self.exact)?);
        for (k, (e, op)) in &self.terms {
            out.terms.insert(k.clone(), (e.clone(), f(op)?));
        }
        Ok(out)
    }

    /// Coefficient-wise value and propagated error of the normal form.
    pub fn coefficients(&self) -> NumericValue<(Vec<MultiIndex>, MultiIndex)> {
        let mut out = NumericValue::default();
        let flat = |op: &PolyDiffOp| {
            op.terms()
                .flat_map(|(d, c)| c.terms().map(move |(m, r)| ((d.clone(), m.clone()), r.to_f64())))
                .collect::<Vec<_>>()
        };
        for (k, v) in flat(&self.exact) {
            out.add(k, v, 0.0, 0.0);
        }
        for (e, op) in self.terms.values() {
            for (k, v) in flat(op) {
                out.add(k, 0.0, e.value * v, e.stderr * v.abs());
            }
        }
        out
    }

    /// Value and propagated error of the polynomial `self(args)`.
    pub fn evaluate(&self, args: &[&Poly]) -> Result<NumericValue<MultiIndex>> {
        let mut out = NumericValue::default();
        for (m, r) in self.exact.apply(args)?.terms() {
            out.add(m.clone(), r.to_f64(), 0.0, 0.0);
        }
        for (e, op) in self.terms.values() {
            for (m, r) in op.apply(args)?.terms() {
                let v = r.to_f64();
                out.add(m.clone(), 0.0, e.value * v, e.stderr * v.abs());
            }
        }
        Ok(out)
    }
}

/// Coefficients `exact + Σ w·x` with errors `Σ σ·|x|`.
#[derive(Clone, Debug)]
pub struct NumericValue<K: Ord> {
    pub coeffs: BTreeMap<K, (f64, f64)>,
}

impl<K: Ord> Default for NumericValue<K> {
    fn default() -> Self {
        NumericValue { coeffs: BTreeMap::new() }
    }
}

impl<K: Ord> NumericValue<K> {
    fn add(&mut self, k: K, exact: f64, mc: f64, err: f64) {
        let e = self.coeffs.entry(k).or_insert((0.0, 0.0));
        e.0 += exact + mc;
        e.1 += err;
    }

    pub fn verdict(&self) -> Verdict {
        let mut v = Verdict { residual: 0.0, error_budget: 0.0, pass: true };
        for &(x, e) in self.coeffs.values() {
            v.residual = v.residual.max(x.abs());
            v.error_budget = v.error_budget.max(e);
            if x.abs() > SIGMAS * e + 1e-9 * (1.0 + e) {
                v.pass = false;
            }
        }
        v
    }
}

/// Worst coefficient magnitude, worst per-coefficient error, and whether
/// every coefficient lies within [`SIGMAS`] of its own error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub residual: f64,
    pub error_budget: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn merge(self, o: Verdict) -> Verdict {
        Verdict {
            residual: self.residual.max(o.residual),
            error_budget: self.error_budget.max(o.error_budget),
            pass: self.pass && o.pass,
        }
    }

    pub fn exact_zero() -> Verdict {
        Verdict { residual: 0.0, error_budget: 0.0, pass: true }
    }
}

impl UnComponent {
    /// `U_n(ξ₁,…,ξ_n) = Σ_Γ Ŵ_Γ U_Γ(ξ₁,…,ξ_n)` over the table.
    pub fn evaluate(&self, xi: &[&PolyVector]) -> Result<WeightedOp> {
        let dim = xi.first().map(|x| x.dim()).ok_or_else(|| Error::Unsupported("U_0".into()))?;
        let ops: Vec<Result<PolyDiffOp>> = Exec::default().map(&self.table, |(g, _)| g.compile(xi));
        let mut out = WeightedOp::zero(dim, self.nbar);
        for ((g, w), op) in self.table.iter().zip(ops) {
            let op = op?;
            if !op.is_zero() {
                out.add_weighted(g.key(), w, &op);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct StarProduct {
    pub dim: usize,
    /// `B_0 = μ, B_1, …, B_N`.
    pub terms: Vec<WeightedOp>,
    /// Weights used at each order.
    pub provenance: Vec<Vec<(GraphKey, Weight)>>,
    /// Whether the input bivector satisfies the Jacobi identity.
    pub poisson: bool,
}

impl StarProduct {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }
}

/// `P(Π)` through `ℏ^N`, `N ≤ 2`.
pub fn build_star(pi: &PolyVector, order: usize, source: &dyn WeightSource) -> Result<StarProduct> {
    if pi.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, got: pi.degree() });
    }
    if order > MAX_STAR_ORDER {
        return Err(Error::Unsupported(format!("star products beyond order {MAX_STAR_ORDER}")));
    }
    let dim = pi.dim();
    let doubled = pi.scale(&Rational::from_int(2));
    let mut terms = vec![WeightedOp::exact(PolyDiffOp::mu(dim))];
    let mut provenance = vec![Vec::new()];
    for j in 1..=order {
        let un = build_un(j, 2, Some(&vec![2; j]), source)?;
        let inputs = vec![&doubled; j];
        let mut b = WeightedOp::zero(dim, 2);
        b.add_scaled(&un.evaluate(&inputs)?, &Rational::inv_factorial(j));
        terms.push(b);
        provenance.push(un.table.iter().map(|(g, w)| (g.key(), w.clone())).collect());
    }
    Ok(StarProduct { dim, terms, provenance, poisson: is_poisson(pi)? })
}

/// `Σ_{i+j=k} B_i(B_j(f,g),h) − B_i(f,B_j(g,h))` for each `k ≤ N`, as
/// tridifferential operators. Only orders where at most one factor carries
/// Monte-Carlo weights are formed (`k ≤ 3` at `N = 2`).
pub fn associativity_defect(star: &StarProduct) -> Result<Vec<WeightedOp>> {
    let n = star.order();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = WeightedOp::zero(star.dim, 3);
        for i in 0..=k {
            let (bi, bj) = (&star.terms[i], &star.terms[k - i]);
            let (outer, inner, flip) = if bi.is_exact() { (bi, bj, false) } else { (bj, bi, true) };
            if !outer.is_exact() {
                return Err(Error::Unsupported("products of two Monte-Carlo weighted operators".into()));
            }
            // B_i ∘_1 B_j − B_i ∘_2 B_j, with the weighted factor mapped through
            let term = if flip {
                inner.map(|op| circle_i(op, &outer.exact, 1)?.sub(&circle_i(op, &outer.exact, 2)?))?
            } else {
                inner.map(|op| circle_i(&outer.exact, op, 1)?.sub(&circle_i(&outer.exact, op, 2)?))?
            };
            acc.add_scaled(&term, &Rational::one());
        }
        out.push(acc);
    }
    Ok(out)
}

/// Per-order verdicts of `f⋆(g⋆h) − (f⋆g)⋆h` over the probe triples.
pub fn associativity_residual(star: &StarProduct, probes: &[[Poly; 3]]) -> Result<Vec<Verdict>> {
    let defects = associativity_defect(star)?;
    defects
        .iter()
        .map(|d| {
            let parts: Vec<Result<Verdict>> = Exec::default().map(probes, |[f, g, h]| {
                Ok(d.evaluate(&[f, g, h])?.verdict())
            });
            merge_all(parts)
        })
        .collect()
}

/// Per-order verdicts on the operator normal forms themselves.
pub fn associativity_normal_form(star: &StarProduct) -> Result<Vec<Verdict>> {
    Ok(associativity_defect(star)?.iter().map(|d| d.coefficients().verdict()).collect())
}

/// All monomials of total degree at most `degree`.
pub fn probe_basis(dim: usize, degree: u32) -> Vec<Poly> {
    MultiIndex::all_up_to(dim, degree).into_iter().map(|m| Poly::monomial(m, Rational::one())).collect()
}

/// All ordered triples of `basis` elements.
pub fn probe_triples(basis: &[Poly]) -> Vec<[Poly; 3]> {
    let mut out = Vec::with_capacity(basis.len().pow(3));
    for f in basis {
        for g in basis {
            for h in basis {
                out.push([f.clone(), g.clone(), h.clone()]);
            }
        }
    }
    out
}

/// Full antisymmetrization `Σ_σ sgn σ · D(f_{σ(1)},…)` of the slots.
pub fn alternate(op: &PolyDiffOp) -> PolyDiffOp {
    let mut out = PolyDiffOp::zero(op.dim(), op.arity());
    for (perm, sign) in permutations(op.arity()) {
        let permuted = PolyDiffOp::from_terms(
            op.dim(),
            op.arity(),
            op.terms().map(|(d, c)| {
                let mut nd = vec![MultiIndex::zero(op.dim()); d.len()];
                for (slot, &p) in perm.iter().enumerate() {
                    nd[p] = d[slot].clone();
                }
                (nd, c.scale(&Rational::from_int(sign)))
            }),
        )
        .expect("same shape");
        out.add_assign_ref(&permuted);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FormalityReport {
    pub n: usize,
    /// Coefficient of `U₁([ξ₁,ξ₂])` fixed by the antisymmetrized identity.
    pub bracket_coefficient: Option<Rational>,
    pub normal_form: Verdict,
    pub probes: Verdict,
}

/// The constant `c` with `Alt([U₁ξ₁, U₁ξ₂]) = c · Alt(U₁[ξ₁,ξ₂])`:
/// antisymmetrization kills Hochschild coboundaries, so `d U₂` drops out
/// and `c` is fixed exactly. `None` if `Alt(U₁[ξ₁,ξ₂]) = 0`.
pub fn calibrate_bracket_coefficient(xi1: &PolyVector, xi2: &PolyVector) -> Result<Option<Rational>> {
    let lhs = alternate(&gerstenhaber(&hkr(xi1), &hkr(xi2))?);
    let rhs = alternate(&hkr(&xi1.sn_bracket(xi2)?));
    let Some((key, r)) = rhs.terms().next() else {
        return Ok(None);
    };
    let (m, rc) = r.terms().next().expect("nonzero coefficient");
    let lc = lhs.terms().find(|(k, _)| *k == key).map(|(_, p)| p.coeff(m)).unwrap_or_else(Rational::zero);
    let c = &lc / rc;
    if lhs != rhs.scale(&c) {
        return Err(Error::Unsupported("antisymmetrized bracket terms are not proportional".into()));
    }
    Ok(Some(c))
}

/// The frozen value of [`calibrate_bracket_coefficient`] (see the tests).
pub fn bracket_coefficient() -> Rational {
    Rational::from_int(-1)
}

/// Residual of the formality equation.
///
/// `n = 1`: `δ(U₁ξ)`, exactly zero. `n = 2`:
/// `[U₂(ξ₁,ξ₂), μ] + [U₁ξ₁, U₁ξ₂] − c·U₁([ξ₁,ξ₂])`, where the first term is
/// the Hochschild differential in the sign fixed by the Maurer–Cartan
/// equation of the star product.
pub fn formality_residual(
    n: usize,
    xi: &[&PolyVector],
    probes: &[Poly],
    source: &dyn WeightSource,
) -> Result<FormalityReport> {
    if xi.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: xi.len() });
    }
    let residual = match n {
        1 => WeightedOp::exact(hochschild_delta(&hkr(xi[0]))),
        2 => {
            let (a, b) = (xi[0], xi[1]);
            let nbar = (a.degree() + b.degree()).checked_sub(2).ok_or_else(|| {
                Error::Unsupported("U_2 needs total degree at least 2".into())
            })?;
            if nbar < 2 {
                return Err(Error::Unsupported(format!("U_2 with {nbar} boundary vertices has no weights")));
            }
            let un = build_un(2, nbar, Some(&[a.degree(), b.degree()]), source)?;
            let u2 = un.evaluate(&[a, b])?;
            let mu = PolyDiffOp::mu(a.dim());
            let mut r = u2.map(|op| gerstenhaber(op, &mu))?;
            r.exact.add_assign_ref(&gerstenhaber(&hkr(a), &hkr(b))?);
            r.exact.add_scaled(&hkr(&a.sn_bracket(b)?), &-bracket_coefficient());
            r
        }
        _ => return Err(Error::Unsupported(format!("formality residual for n = {n}"))),
    };
    let arity = residual.arity();
    let tuples = probe_tuples(probes, arity);
    let parts: Vec<Result<Verdict>> = Exec::default().map(&tuples, |t| {
        let refs: Vec<&Poly> = t.iter().collect();
        Ok(residual.evaluate(&refs)?.verdict())
    });
    let probes = merge_all(parts)?;
    Ok(FormalityReport {
        n,
        bracket_coefficient: (n == 2).then(bracket_coefficient),
        normal_form: residual.coefficients().verdict(),
        probes,
    })
}

fn merge_all(parts: Vec<Result<Verdict>>) -> Result<Verdict> {
    parts.into_iter().try_fold(Verdict::exact_zero(), |a, v| Ok(a.merge(v?)))
}

fn probe_tuples(basis: &[Poly], arity: usize) -> Vec<Vec<Poly>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                basis.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    out
}
