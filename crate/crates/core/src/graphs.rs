//! Admissible graphs: vertices `p₁…p_n` (first type, in the upper half-plane)
//! and `q₁…q_n̄` (second type, on the real line); every edge leaves a first-type
//! vertex and the edges leaving `p_j` form its ordered star.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::MultiIndex;
use crate::dpoly::PolyDiffOp;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::tpoly::PolyVector;

/// Default bound on raw enumeration candidates.
pub const DEFAULT_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed vertex label {0:?} (expected p<k> or q<k>)")]
    BadLabel(String),
    #[error("vertex {0} does not exist")]
    UnknownVertex(String),
    #[error("edge {from}->{to} starts at a second-type vertex")]
    SourceNotFirstType { from: String, to: String },
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("star of {vertex} hits {target} more than once")]
    ParallelEdges { vertex: String, target: String },
    #[error("expected {expected} stars, one per first-type vertex, got {got}")]
    StarCount { expected: usize, got: usize },
    #[error("2n + nbar - 2 = {0} is negative")]
    NegativeDimension(i64),
    #[error("give exactly one of `stars` or `edges`")]
    Ambiguous,
}

/// Endpoint of an edge, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    P(usize),
    Q(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::P(i) => write!(f, "p{}", i + 1),
            Target::Q(i) => write!(f, "q{}", i + 1),
        }
    }
}

impl FromStr for Target {
    type Err = GraphError;
    fn from_str(s: &str) -> std::result::Result<Self, GraphError> {
        let bad = || GraphError::BadLabel(s.to_string());
        let (kind, num) = s.split_at_checked(1).ok_or_else(bad)?;
        let k: usize = num.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match kind {
            "p" => Ok(Target::P(k - 1)),
            "q" => Ok(Target::Q(k - 1)),
            _ => Err(bad()),
        }
    }
}

/// Unvalidated graph data as read from JSON. Either `stars` (targets of
/// `p₁, p₂, …` in order) or an ordered `edges` list of `[from, to]` pairs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    pub n: usize,
    pub nbar: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stars: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleGraph {
    n: usize,
    nbar: usize,
    stars: Vec<Vec<Target>>,
}

/// Canonical string identifying a graph as ordered data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphKey(pub String);

impl fmt::Display for GraphKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn validate(raw: &RawGraph) -> std::result::Result<AdmissibleGraph, GraphError> {
    let dimension = 2 * raw.n as i64 + raw.nbar as i64 - 2;
    if dimension < 0 {
        return Err(GraphError::NegativeDimension(dimension));
    }
    let check = |t: Target| -> std::result::Result<Target, GraphError> {
        let ok = match t {
            Target::P(i) => i < raw.n,
            Target::Q(i) => i < raw.nbar,
        };
        if ok {
            Ok(t)
        } else {
            Err(GraphError::UnknownVertex(t.to_string()))
        }
    };
    let stars: Vec<Vec<Target>> = match (&raw.stars, &raw.edges) {
        (Some(stars), None) => {
            if stars.len() != raw.n {
                return Err(GraphError::StarCount { expected: raw.n, got: stars.len() });
            }
            stars
                .iter()
                .map(|s| s.iter().map(|t| check(t.parse()?)).collect())
                .collect::<std::result::Result<_, _>>()?
        }
        (None, Some(edges)) => {
            let mut stars = vec![Vec::new(); raw.n];
            for [from, to] in edges {
                let src = check(from.parse()?)?;
                let dst = check(to.parse()?)?;
                match src {
                    Target::P(j) => stars[j].push(dst),
                    Target::Q(_) => {
                        return Err(GraphError::SourceNotFirstType { from: from.clone(), to: to.clone() })
                    }
                }
            }
            stars
        }
        (None, None) if raw.n == 0 => Vec::new(),
        _ => return Err(GraphError::Ambiguous),
    };
    AdmissibleGraph::new(raw.n, raw.nbar, stars)
}

impl AdmissibleGraph {
    pub fn new(n: usize, nbar: usize, stars: Vec<Vec<Target>>) -> std::result::Result<Self, GraphError> {
        let dimension = 2 * n as i64 + nbar as i64 - 2;
        if dimension < 0 {
            return Err(GraphError::NegativeDimension(dimension));
        }
        if stars.len() != n {
            return Err(GraphError::StarCount { expected: n, got: stars.len() });
        }
        for (j, star) in stars.iter().enumerate() {
            for (a, &t) in star.iter().enumerate() {
                match t {
                    Target::P(i) if i >= n => return Err(GraphError::UnknownVertex(t.to_string())),
                    Target::Q(i) if i >= nbar => return Err(GraphError::UnknownVertex(t.to_string())),
                    Target::P(i) if i == j => return Err(GraphError::SelfLoop(t.to_string())),
                    _ => {}
                }
                if star[..a].contains(&t) {
                    return Err(GraphError::ParallelEdges {
                        vertex: Target::P(j).to_string(),
                        target: t.to_string(),
                    });
                }
            }
        }
        Ok(AdmissibleGraph { n, nbar, stars })
    }

    /// The graph with one vertex whose star is `q₁,…,q_n̄` in order.
    pub fn wedge(nbar: usize) -> Self {
        AdmissibleGraph::new(1, nbar, vec![(0..nbar).map(Target::Q).collect()]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nbar(&self) -> usize {
        self.nbar
    }

    pub fn stars(&self) -> &[Vec<Target>] {
        &self.stars
    }

    pub fn star_sizes(&self) -> Vec<usize> {
        self.stars.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.stars.iter().map(Vec::len).sum()
    }

    /// Edges `(source, target)` ordered by source then star position.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Target)> + '_ {
        self.stars.iter().enumerate().flat_map(|(j, s)| s.iter().map(move |&t| (j, t)))
    }

    /// Real dimension `2n + n̄ − 2` of the configuration space.
    pub fn config_dim(&self) -> usize {
        2 * self.n + self.nbar - 2
    }

    /// `(n̄ − 1) − Σ_j (#star(p_j) − 1) = 1 − n`, i.e. `#E = 2n + n̄ − 2`.
    pub fn degree_identity_holds(&self) -> bool {
        let lhs = self.nbar as i64 - 1 - self.stars.iter().map(|s| s.len() as i64 - 1).sum::<i64>();
        lhs == 1 - self.n as i64
    }

    pub fn key(&self) -> GraphKey {
        let stars: Vec<String> = self
            .stars
            .iter()
            .map(|s| s.iter().map(Target::to_string).collect::<Vec<_>>().join(","))
            .collect();
        GraphKey(format!("n{}nb{}:{}", self.n, self.nbar, stars.join("|")))
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            n: self.n,
            nbar: self.nbar,
            stars: Some(self.stars.iter().map(|s| s.iter().map(Target::to_string).collect()).collect()),
            edges: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("serializable")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: RawGraph = serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph: {e}")))?;
        validate(&raw).map_err(|e| Error::Parse(format!("graph: {e}")))
    }

    /// Graphviz rendering: first-type vertices as filled circles, second-type
    /// vertices on a common bottom rank in order, edges labeled by star
    /// position.
    pub fn export_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  rankdir=TB;\n");
        for j in 0..self.n {
            s += &format!("  p{0} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label=\"p{0}\"];\n", j + 1);
        }
        if self.nbar > 0 {
            s += "  { rank=sink;";
            for i in 0..self.nbar {
                s += &format!(" q{} [shape=box];", i + 1);
            }
            s += " }\n";
            for i in 1..self.nbar {
                s += &format!("  q{} -> q{} [style=invis];\n", i, i + 1);
            }
        }
        for (j, star) in self.stars.iter().enumerate() {
            for (pos, t) in star.iter().enumerate() {
                s += &format!("  p{} -> {} [label=\"{}\"];\n", j + 1, t, pos + 1);
            }
        }
        s += "}\n";
        s
    }

    /// Relabels first-type vertices by `sigma` (old `p_j` becomes
    /// `p_{sigma[j]}`) and returns the sign relating the weights,
    /// `W_{Γ'} = sign · W_Γ`: the Koszul sign of permuting the edge-form blocks,
    /// `∏ (−1)^{k_a k_b}` over pairs `a < b` with `sigma[a] > sigma[b]`.
    pub fn permute_vertices(&self, sigma: &[usize]) -> Result<(AdmissibleGraph, i64)> {
        let mut seen = vec![false; self.n];
        if sigma.len() != self.n || sigma.iter().any(|&s| s >= self.n || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::Parse(format!("{sigma:?} is not a permutation of {} vertices", self.n)));
        }
        let mut stars = vec![Vec::new(); self.n];
        for (j, star) in self.stars.iter().enumerate() {
            stars[sigma[j]] = star
                .iter()
                .map(|&t| match t {
                    Target::P(i) => Target::P(sigma[i]),
                    q => q,
                })
                .collect();
        }
        let sizes = self.star_sizes();
        let mut sign = 1;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if sigma[a] > sigma[b] && (sizes[a] * sizes[b]) % 2 == 1 {
                    sign = -sign;
                }
            }
        }
        Ok((AdmissibleGraph { n: self.n, nbar: self.nbar, stars }, sign))
    }

    /// Sorts every star (first-type targets before second-type, by index)
    /// and returns the sign of the combined edge permutation.
    pub fn sort_stars(&self) -> (AdmissibleGraph, i64) {
        let mut sign = 1;
        let stars = self
            .stars
            .iter()
            .map(|s| {
                let mut v = s.clone();
                for i in 1..v.len() {
                    let mut j = i;
                    while j > 0 && v[j - 1] > v[j] {
                        v.swap(j - 1, j);
                        sign = -sign;
                        j -= 1;
                    }
                }
                v
            })
            .collect();
        (AdmissibleGraph { n: self.n, nbar: self.nbar, stars }, sign)
    }

    pub fn has_sorted_stars(&self) -> bool {
        self.stars.iter().all(|s| s.windows(2).all(|w| w[0] < w[1]))
    }

    /// The operator `U_Γ(ξ₁⊗…⊗ξ_n)` of arity `n̄`. Each vertex `p_j` carries
    /// the skew tensor of `ξ_j` with one summation index per outgoing edge;
    /// an edge into `p_k` differentiates the tensor at `p_k`, an edge into `q_l`
    /// differentiates the `l`-th argument. Zero unless `deg ξ_j = #star(p_j)`.
    pub fn compile(&self, xi: &[&PolyVector]) -> Result<PolyDiffOp> {
        if xi.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: xi.len() });
        }
        let dim = match xi.first() {
            Some(x) => x.dim(),
            None => return Err(Error::Unsupported("compiling a graph without first-type vertices".into())),
        };
        if let Some(x) = xi.iter().find(|x| x.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, x.dim()));
        }
        let mut out = PolyDiffOp::zero(dim, self.nbar);
        if xi.iter().zip(&self.stars).any(|(x, s)| x.degree() != s.len()) {
            return Ok(out);
        }
        let edges: Vec<(usize, Target)> = self.edges().collect();
        let e = edges.len();
        let mut idx = vec![0usize; e];
        loop {
            let mut into_p = vec![vec![0u32; dim]; self.n];
            let mut into_q = vec![vec![0u32; dim]; self.nbar];
            for (&(_, t), &i) in edges.iter().zip(&idx) {
                match t {
                    Target::P(k) => into_p[k][i] += 1,
                    Target::Q(l) => into_q[l][i] += 1,
                }
            }
            let mut coeff = crate::algebra::Poly::one(dim);
            let mut start = 0;
            for (j, star) in self.stars.iter().enumerate() {
                let comp = xi[j].tensor(&idx[start..start + star.len()]);
                start += star.len();
                let c = comp.derivative(&MultiIndex::from_vec(into_p[j].clone()));
                coeff = &coeff * &c;
                if coeff.is_zero() {
                    break;
                }
            }
            if !coeff.is_zero() {
                out.add_term(into_q.into_iter().map(MultiIndex::from_vec).collect(), &coeff);
            }
            // odometer over index assignments
            let mut pos = 0;
            loop {
                if pos == e {
                    return Ok(out);
                }
                idx[pos] += 1;
                if idx[pos] < dim {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Raw candidate count `Σ_{k₁+…+k_n=E} ∏_j (n−1+n̄)^{k_j}` visited by
/// [`enumerate`].
pub fn raw_candidate_count(n: usize, nbar: usize, edges: usize) -> u128 {
    let t = (n + nbar).saturating_sub(1) as u128;
    compositions(edges, n).iter().map(|ks| ks.iter().map(|&k| t.pow(k as u32)).product::<u128>()).sum()
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in 0..=total {
        for mut rest in compositions(total - k, parts - 1) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Ordered sequences of `k` distinct targets for vertex `j`.
fn star_choices(j: usize, n: usize, nbar: usize, k: usize) -> Vec<Vec<Target>> {
    let allowed: Vec<Target> =
        (0..n).filter(|&i| i != j).map(Target::P).chain((0..nbar).map(Target::Q)).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(allowed: &[Target], k: usize, cur: &mut Vec<Target>, out: &mut Vec<Vec<Target>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for &t in allowed {
            if !cur.contains(&t) {
                cur.push(t);
                rec(allowed, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(&allowed, k, &mut cur, &mut out);
    out
}

/// Every admissible graph with the given vertex and edge counts, as ordered
/// data, sorted by key.
pub fn enumerate(n: usize, nbar: usize, edges: usize, guard: u128) -> Result<Vec<AdmissibleGraph>> {
    enumerate_with(n, nbar, edges, guard, Exec::default())
}

pub fn enumerate_with(n: usize, nbar: usize, edges: usize, guard: u128, exec: Exec) -> Result<Vec<AdmissibleGraph>> {
    if (2 * n + nbar) < 2 {
        return Err(GraphError::NegativeDimension(2 * n as i64 + nbar as i64 - 2).into());
    }
    let candidates = raw_candidate_count(n, nbar, edges);
    if candidates > guard {
        return Err(Error::EnumerationGuard {
            candidates,
            bound: guard,
            formula: format!("sum over star sizes k_1+..+k_{n}={edges} of prod_j ({})^k_j", (n + nbar).saturating_sub(1)),
        });
    }
    let comps = compositions(edges, n);
    let per_comp: Vec<Vec<AdmissibleGraph>> = exec.map(&comps, |ks| {
        let choices: Vec<Vec<Vec<Target>>> =
            ks.iter().enumerate().map(|(j, &k)| star_choices(j, n, nbar, k)).collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; n];
        if choices.iter().any(Vec::is_empty) {
            return out;
        }
        loop {
            let stars = (0..n).map(|j| choices[j][pick[j]].clone()).collect();
            out.push(AdmissibleGraph { n, nbar, stars });
            let mut pos = 0;
            loop {
                if pos == n {
                    return out;
                }
                pick[pos] += 1;
                if pick[pos] < choices[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
        }
    });
    let mut all: Vec<AdmissibleGraph> = per_comp.into_iter().flatten().collect();
    all.sort_by_key(AdmissibleGraph::key);
    Ok(all)
}

/// One graph per star-reordering class: those whose stars are sorted.
pub fn sorted_representatives(n: usize, nbar: usize, edges: usize, guard: u128) -> Result<Vec<AdmissibleGraph>> {
    Ok(enumerate(n, nbar, edges, guard)?.into_iter().filter(AdmissibleGraph::has_sorted_stars).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::tpoly::apply_bivector;

    fn raw(n: usize, nbar: usize, stars: &[&[&str]]) -> RawGraph {
        RawGraph {
            n,
            nbar,
            stars: Some(stars.iter().map(|s| s.iter().map(|t| t.to_string()).collect()).collect()),
            edges: None,
        }
    }

    #[test]
    fn validation_clauses() {
        assert!(validate(&raw(1, 2, &[&["q1", "q2"]])).is_ok());
        let from_q = RawGraph {
            n: 1,
            nbar: 2,
            edges: Some(vec![["q1".into(), "p1".into()]]),
            ..Default::default()
        };
        assert!(matches!(validate(&from_q), Err(GraphError::SourceNotFirstType { .. })));
        assert!(matches!(validate(&raw(1, 2, &[&["p1"]])), Err(GraphError::SelfLoop(_))));
        assert!(matches!(validate(&raw(1, 2, &[&["q1", "q1"]])), Err(GraphError::ParallelEdges { .. })));
        assert!(matches!(validate(&raw(0, 1, &[])), Err(GraphError::NegativeDimension(-1))));
        assert!(matches!(validate(&raw(1, 2, &[&["q3"]])), Err(GraphError::UnknownVertex(_))));
        assert!(matches!(validate(&raw(1, 2, &[&["x1"]])), Err(GraphError::BadLabel(_))));
        assert!(matches!(validate(&raw(2, 2, &[&["q1"]])), Err(GraphError::StarCount { .. })));
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate(1, 2, 2, DEFAULT_GUARD).unwrap().len(), 2);
        assert_eq!(enumerate(1, 1, 1, DEFAULT_GUARD).unwrap().len(), 1);
        let empty = enumerate(0, 2, 0, DEFAULT_GUARD).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].edge_count(), 0);
        assert_eq!(enumerate(2, 2, 4, DEFAULT_GUARD).unwrap().len(), 72);
        assert_eq!(sorted_representatives(2, 2, 4, DEFAULT_GUARD).unwrap().len(), 15);
    }

    #[test]
    fn guard_reports_formula() {
        let e = enumerate(4, 4, 10, 1000).unwrap_err();
        assert!(matches!(e, Error::EnumerationGuard { bound: 1000, .. }));
    }

    #[test]
    fn wedge_compiles_to_bracket() {
        let pi = PolyVector::basis(2, &[0, 1], &Poly::var(2, 0) + &Poly::one(2)).unwrap();
        let op = AdmissibleGraph::wedge(2).compile(&[&pi]).unwrap();
        let f = &Poly::var(2, 0) * &Poly::var(2, 1);
        let g = &Poly::var(2, 1) * &Poly::var(2, 1);
        assert_eq!(op.apply(&[&f, &g]).unwrap(), apply_bivector(&pi, &f, &g).unwrap());
    }

    #[test]
    fn degree_mismatch_compiles_to_zero() {
        let v = PolyVector::basis(2, &[0], Poly::one(2)).unwrap();
        assert!(AdmissibleGraph::wedge(2).compile(&[&v]).unwrap().is_zero());
    }

    #[test]
    fn internal_edge_differentiates_tensor() {
        // p1 -> (p2, q1), p2 -> (q1, q2) in d=2 with ξ₂ = x₁ ∂₁∧∂₂
        let g = validate(&raw(2, 2, &[&["p2", "q1"], &["q1", "q2"]])).unwrap();
        let xi1 = PolyVector::basis(2, &[0, 1], Poly::one(2)).unwrap();
        let xi2 = PolyVector::basis(2, &[0, 1], Poly::var(2, 0)).unwrap();
        let op = g.compile(&[&xi1, &xi2]).unwrap();
        // Σ T1^{ab} ∂_a T2^{cd} ∂_b∂_c f ∂_d h = ∂₂∂₁f ∂₂h − ∂₂∂₂f ∂₁h
        let f = &Poly::var(2, 1) * &Poly::var(2, 0);
        let h = Poly::var(2, 1);
        assert_eq!(op.apply(&[&f, &h]).unwrap(), Poly::one(2));
    }

    #[test]
    fn permutation_signs() {
        let g = validate(&raw(2, 2, &[&["q1"], &["p1", "q1", "q2"]])).unwrap();
        let (same, s) = g.permute_vertices(&[0, 1]).unwrap();
        assert_eq!((same, s), (g.clone(), 1));
        let (swapped, s) = g.permute_vertices(&[1, 0]).unwrap();
        assert_eq!(s, -1);
        assert_eq!(swapped.stars()[0], vec![Target::P(1), Target::Q(0), Target::Q(1)]);
        let (back, s2) = swapped.permute_vertices(&[1, 0]).unwrap();
        assert_eq!(back, g);
        assert_eq!(s * s2, 1);
    }

    #[test]
    fn star_sorting_sign() {
        let g = validate(&raw(1, 3, &[&["q3", "q1", "q2"]])).unwrap();
        let (s, sign) = g.sort_stars();
        assert!(s.has_sorted_stars());
        assert_eq!(sign, 1);
        let g = validate(&raw(1, 2, &[&["q2", "q1"]])).unwrap();
        assert_eq!(g.sort_stars().1, -1);
    }

    #[test]
    fn dot_and_json() {
        let w = AdmissibleGraph::wedge(2);
        let dot = w.export_dot();
        assert_eq!(dot.matches("style=filled").count(), 1);
        assert_eq!(dot.matches("shape=box").count(), 2);
        assert!(dot.contains("p1 -> q1 [label=\"1\"]") && dot.contains("p1 -> q2 [label=\"2\"]"));
        assert_eq!(AdmissibleGraph::parse_json(&w.to_json()).unwrap(), w);
        let err = AdmissibleGraph::parse_json(r#"{"n":1,"stars":[["q1"]]}"#).unwrap_err();
        assert!(err.to_string().contains("nbar"), "{err}");
    }
}
