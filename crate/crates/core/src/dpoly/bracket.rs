//! Circle products, the Gerstenhaber bracket and the Hochschild differential.

use std::collections::HashMap;

use super::PolyDiffOp;
use crate::algebra::{HSeries, MultiIndex, Poly, Rational};
use crate::error::{Error, Result};

fn binomial(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for t in 0..k as i64 {
        r = r * (n as i64 - t) / (t + 1);
    }
    r
}

/// All ways to write `d = a₀ + … + a_{parts−1}` with their multinomial
/// coefficients `d!/(a₀!⋯)`, the Leibniz expansion of `∂^d` on a product.
pub(crate) fn leibniz_splits(d: &MultiIndex, parts: usize) -> Vec<(Vec<MultiIndex>, Rational)> {
    assert!(parts > 0);
    if parts == 1 {
        return vec![(vec![d.clone()], Rational::one())];
    }
    let mut out = Vec::new();
    for a in d.sub_indices() {
        let rest = d.checked_sub(&a).expect("sub-index");
        let c: i64 = d
            .as_slice()
            .iter()
            .zip(a.as_slice())
            .map(|(&n, &k)| binomial(n, k))
            .product();
        for (mut tail, tc) in leibniz_splits(&rest, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(a.clone());
            v.append(&mut tail);
            out.push((v, &tc * &Rational::from_int(c)));
        }
    }
    out
}

/// `f ∘_i g`: `g` plugged into slot `i` (1-based) of `f`.
pub fn circle_i(f: &PolyDiffOp, g: &PolyDiffOp, i: usize) -> Result<PolyDiffOp> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(f.dim, g.dim));
    }
    if i == 0 || i > f.arity {
        return Err(Error::SlotOutOfRange { slot: i, arity: f.arity });
    }
    let n = g.arity;
    let mut out = PolyDiffOp::zero(f.dim, f.arity + n - 1);
    let mut splits: HashMap<&MultiIndex, Vec<(Vec<MultiIndex>, Rational)>> = HashMap::new();
    let mut coeff_derivs: HashMap<(&Poly, MultiIndex), Poly> = HashMap::new();
    for (df, cf) in &f.terms {
        let d = &df[i - 1];
        let sp = splits.entry(d).or_insert_with(|| leibniz_splits(d, n + 1));
        for (dg, cg) in &g.terms {
            for (parts, mult) in sp.iter() {
                let dc = coeff_derivs
                    .entry((cg, parts[0].clone()))
                    .or_insert_with(|| cg.derivative(&parts[0]));
                if dc.is_zero() {
                    continue;
                }
                let coeff = (cf * &*dc).scale(mult);
                let mut derivs = Vec::with_capacity(out.arity);
                derivs.extend_from_slice(&df[..i - 1]);
                for (e, a) in dg.iter().zip(&parts[1..]) {
                    derivs.push(e.add(a));
                }
                derivs.extend_from_slice(&df[i..]);
                out.add_term(derivs, &coeff);
            }
        }
    }
    Ok(out)
}

fn result_arity(m: usize, n: usize) -> usize {
    (m + n).saturating_sub(1)
}

/// `f ∘ g = Σ_i (−1)^{(i−1)(n+1)} f ∘_i g` with `n = arity(g)`.
pub fn circle(f: &PolyDiffOp, g: &PolyDiffOp) -> Result<PolyDiffOp> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(f.dim, g.dim));
    }
    let n = g.arity;
    let mut out = PolyDiffOp::zero(f.dim, result_arity(f.arity, n));
    for i in 1..=f.arity {
        let sign = if ((i - 1) * (n + 1)).is_multiple_of(2) { 1 } else { -1 };
        out.add_scaled(&circle_i(f, g, i)?, &Rational::from_int(sign));
    }
    Ok(out)
}

/// `[f,g] = f∘g − (−1)^{(m−1)(n−1)} g∘f` in shifted degrees.
/// Two arity-0 operators bracket to the zero constant.
pub fn gerstenhaber(f: &PolyDiffOp, g: &PolyDiffOp) -> Result<PolyDiffOp> {
    let fg = circle(f, g)?;
    let gf = circle(g, f)?;
    let s = (f.shifted_degree() * g.shifted_degree()).rem_euclid(2);
    let mut out = fg;
    out.add_scaled(&gf, &Rational::from_int(if s == 0 { -1 } else { 1 }));
    Ok(out)
}

/// Hochschild differential `δf = [f, −μ]`, equal to the alternating-sum
/// formula evaluated by [`hochschild_delta_eval`].
pub fn hochschild_delta(f: &PolyDiffOp) -> PolyDiffOp {
    gerstenhaber(f, &PolyDiffOp::mu(f.dim).neg()).expect("same dimension")
}

/// Direct evaluation of
/// `δf(a₁,…,a_{n+1}) = a₁f(a₂,…) + Σ_i (−1)^i f(…,a_i a_{i+1},…) + (−1)^{n+1} f(a₁,…,a_n)a_{n+1}`.
pub fn hochschild_delta_eval(f: &PolyDiffOp, args: &[&Poly]) -> Result<Poly> {
    let n = f.arity;
    if args.len() != n + 1 {
        return Err(Error::ArityMismatch { expected: n + 1, got: args.len() });
    }
    let mut out = args[0] * &f.apply(&args[1..])?;
    for i in 1..=n {
        let merged = args[i - 1] * args[i];
        let mut a: Vec<&Poly> = Vec::with_capacity(n);
        a.extend_from_slice(&args[..i - 1]);
        a.push(&merged);
        a.extend_from_slice(&args[i + 1..]);
        let v = f.apply(&a)?;
        if i % 2 == 0 {
            out.add_assign_ref(&v);
        } else {
            out = &out - &v;
        }
    }
    let last = &f.apply(&args[..n])? * args[n];
    if (n + 1).is_multiple_of(2) {
        out.add_assign_ref(&last);
    } else {
        out = &out - &last;
    }
    Ok(out)
}

/// Order-by-order associator of `μ + ν`:
/// `[μ,ν_k] + ½ Σ_{i+j=k} [ν_i,ν_j]`, which equals `(a⋆b)⋆c − a⋆(b⋆c)` at `ℏ^k`.
/// Vanishes through order N iff `μ + ν` is associative through order N.
pub fn assoc_defect(nu: &HSeries<PolyDiffOp>) -> Result<HSeries<PolyDiffOp>> {
    if !nu.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let dim = nu.coeff(0).dim;
    for c in nu.coeffs() {
        if c.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: c.arity });
        }
        if c.dim != dim {
            return Err(Error::DimensionMismatch(dim, c.dim));
        }
    }
    let mu = PolyDiffOp::mu(dim);
    let half = Rational::new(1, 2);
    let mut out = Vec::with_capacity(nu.order() + 1);
    for k in 0..=nu.order() {
        let mut r = gerstenhaber(&mu, nu.coeff(k))?;
        for i in 1..k {
            r.add_scaled(&gerstenhaber(nu.coeff(i), nu.coeff(k - i))?, &half);
        }
        out.push(r);
    }
    Ok(HSeries::from_coeffs(out))
}
