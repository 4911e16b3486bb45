//! JSON report shapes shared by the command-line tool and the acceptance
//! run. Every numeric result carries its value, a standard error or
//! `"exact"`, and the seed and sample count that produced it.

use serde::{Serialize, Serializer};

use crate::algebra::{Poly, Rational};
use crate::dpoly::{moyal_op, PolyDiffOp};
use crate::error::Result;
use crate::graphs::{AdmissibleGraph, GraphKey};
use crate::par::Exec;
use crate::star::{
    associativity_normal_form, associativity_residual, probe_basis, probe_triples, StarProduct, Verdict, Weight,
    WeightedOp,
};
use crate::tpoly::PolyVector;
use crate::weights::{integrate_weight_with, vanishing_check_with, wedge_weight_closed_form, WeightEstimate};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stderr {
    Exact,
    Estimate(f64),
}

impl Serialize for Stderr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Stderr::Exact => s.serialize_str("exact"),
            Stderr::Estimate(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Numeric {
    pub value: f64,
    pub stderr: Stderr,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl Numeric {
    pub fn exact(value: f64) -> Self {
        Numeric { value, stderr: Stderr::Exact, seed: None, samples: None }
    }
}

impl From<&WeightEstimate> for Numeric {
    fn from(e: &WeightEstimate) -> Self {
        Numeric { value: e.value, stderr: Stderr::Estimate(e.stderr), seed: Some(e.seed), samples: Some(e.samples) }
    }
}

impl From<&Weight> for Numeric {
    fn from(w: &Weight) -> Self {
        match w {
            Weight::Exact { value } => Numeric::exact(value.to_f64()),
            Weight::MonteCarlo(e) => e.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightUse {
    pub graph: GraphKey,
    pub weight: Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    pub graph: GraphKey,
    pub n: usize,
    pub nbar: usize,
    /// Weight summed over star orderings.
    pub weight: Numeric,
    /// The same divided by the number of star orderings.
    pub labeled: f64,
    /// `1/n̄!` for one-vertex graphs into distinct boundary points.
    pub closed_form: Option<Rational>,
    pub rejected: u64,
}

impl WeightReport {
    pub fn new(g: &AdmissibleGraph, e: &WeightEstimate) -> Self {
        let wedge = g.n() == 1 && g.stars()[0].iter().all(|t| matches!(t, crate::graphs::Target::Q(_)));
        WeightReport {
            graph: g.key(),
            n: g.n(),
            nbar: g.nbar(),
            weight: e.into(),
            labeled: e.labeled(g),
            closed_form: (wedge && g.has_sorted_stars()).then(|| wedge_weight_closed_form(g.nbar())),
            rejected: e.rejected,
        }
    }
}

pub fn weight_report(g: &AdmissibleGraph, samples: u64, seed: u64, exec: Exec) -> Result<WeightReport> {
    Ok(WeightReport::new(g, &integrate_weight_with(g, samples, seed, exec)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub order: usize,
    pub residual: f64,
    pub error_budget: f64,
    pub pass: bool,
}

impl OrderVerdict {
    pub fn new(order: usize, v: Verdict) -> Self {
        OrderVerdict { order, residual: v.residual, error_budget: v.error_budget, pass: v.pass }
    }
}

fn order_verdicts(vs: &[Verdict]) -> Vec<OrderVerdict> {
    vs.iter().enumerate().map(|(k, v)| OrderVerdict::new(k, *v)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedTerm {
    pub graph: GraphKey,
    pub weight: Numeric,
    pub op: PolyDiffOp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorReport {
    pub order: usize,
    pub exact: PolyDiffOp,
    pub weighted: Vec<WeightedTerm>,
}

impl OperatorReport {
    pub fn new(order: usize, w: &WeightedOp) -> Self {
        OperatorReport {
            order,
            exact: w.exact.clone(),
            weighted: w
                .terms
                .iter()
                .map(|(k, (e, op))| WeightedTerm { graph: k.clone(), weight: e.into(), op: op.clone() })
                .collect(),
        }
    }
}

fn weight_uses(star: &StarProduct) -> Vec<WeightUse> {
    star.provenance.iter().flatten().map(|(k, w)| WeightUse { graph: k.clone(), weight: w.into() }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoyalComparison {
    /// Verdicts of `B_k − B_k^Moyal` on operator coefficients, per order.
    pub coefficients: Vec<OrderVerdict>,
    /// The same on all pairs from the probe basis.
    pub probes: Vec<OrderVerdict>,
    pub probe_degree: u32,
    pub pass: bool,
}

/// Compares each order of `star` with the Moyal product of the same
/// constant bivector.
pub fn moyal_comparison(star: &StarProduct, pi: &PolyVector, probe_degree: u32) -> Result<MoyalComparison> {
    let basis = probe_basis(star.dim, probe_degree);
    let mut coefficients = Vec::new();
    let mut probes = Vec::new();
    for (k, b) in star.terms.iter().enumerate() {
        let mut diff = b.clone();
        diff.exact.add_scaled(&moyal_op(pi, k)?, &Rational::from_int(-1));
        coefficients.push(OrderVerdict::new(k, diff.coefficients().verdict()));
        let pairs: Vec<(Poly, Poly)> =
            basis.iter().flat_map(|f| basis.iter().map(move |g| (f.clone(), g.clone()))).collect();
        let parts: Vec<Result<Verdict>> = Exec::default().map(&pairs, |(f, g)| Ok(diff.evaluate(&[f, g])?.verdict()));
        let mut v = Verdict::exact_zero();
        for p in parts {
            v = v.merge(p?);
        }
        probes.push(OrderVerdict::new(k, v));
    }
    let pass = coefficients.iter().chain(&probes).all(|v| v.pass);
    Ok(MoyalComparison { coefficients, probes, probe_degree, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarReport {
    pub dim: usize,
    pub order: usize,
    pub poisson: bool,
    pub terms: Vec<OperatorReport>,
    pub weights: Vec<WeightUse>,
    /// Present for constant bivectors.
    pub moyal: Option<MoyalComparison>,
}

pub fn star_report(star: &StarProduct, pi: &PolyVector, probe_degree: u32) -> Result<StarReport> {
    Ok(StarReport {
        dim: star.dim,
        order: star.order(),
        poisson: star.poisson,
        terms: star.terms.iter().enumerate().map(|(k, t)| OperatorReport::new(k, t)).collect(),
        weights: weight_uses(star),
        moyal: if pi.is_constant() { Some(moyal_comparison(star, pi, probe_degree)?) } else { None },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssocReport {
    pub dim: usize,
    pub order: usize,
    pub poisson: bool,
    pub probe_degree: u32,
    pub probe_triples: usize,
    pub normal_form: Vec<OrderVerdict>,
    pub probes: Vec<OrderVerdict>,
    pub weights: Vec<WeightUse>,
    pub pass: bool,
}

pub fn assoc_report(star: &StarProduct, probe_degree: u32) -> Result<AssocReport> {
    let triples = probe_triples(&probe_basis(star.dim, probe_degree));
    let normal_form = order_verdicts(&associativity_normal_form(star)?);
    let probes = order_verdicts(&associativity_residual(star, &triples)?);
    let pass = normal_form.iter().chain(&probes).all(|v| v.pass);
    Ok(AssocReport {
        dim: star.dim,
        order: star.order(),
        poisson: star.poisson,
        probe_degree,
        probe_triples: triples.len(),
        normal_form,
        probes,
        weights: weight_uses(star),
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingReport {
    /// Edges between the three interior points, 1-based.
    pub edges: [[usize; 2]; 3],
    pub estimate: Numeric,
    pub rejected: u64,
    /// `|estimate| < 3·stderr`.
    pub pass: bool,
}

pub fn vanishing_report(edges: [(usize, usize); 3], samples: u64, seed: u64, exec: Exec) -> Result<VanishingReport> {
    let e = vanishing_check_with(edges, samples, seed, exec)?;
    Ok(VanishingReport {
        edges: edges.map(|(a, b)| [a + 1, b + 1]),
        estimate: (&e).into(),
        rejected: e.rejected,
        pass: e.value.abs() < 3.0 * e.stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_shapes() {
        let e = WeightEstimate { value: 0.5, stderr: 0.01, samples: 10, seed: 3, rejected: 0 };
        let j = serde_json::to_string(&Numeric::from(&e)).unwrap();
        assert_eq!(j, r#"{"value":0.5,"stderr":0.01,"seed":3,"samples":10}"#);
        let j = serde_json::to_string(&Numeric::exact(0.0)).unwrap();
        assert_eq!(j, r#"{"value":0.0,"stderr":"exact","seed":null,"samples":null}"#);
    }
}
