//! Hochschild cohomology of finite-dimensional algebras given by structure
//! constants: cochain differentials as exact matrices, cohomology
//! dimensions, the bar-complex contracting homotopy, and low-order
//! deformation obstructions.

pub mod linalg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::par::Exec;
pub use linalg::SparseMatrix;

/// Largest accepted matrix side, counted as `m^(n+2)` for degree `n`.
pub const SIZE_GUARD: u128 = 100_000;

fn guard(m: usize, power: u32) -> Result<usize> {
    let entries = (m as u128).checked_pow(power).unwrap_or(u128::MAX);
    if entries > SIZE_GUARD {
        return Err(Error::SizeGuard { entries, bound: SIZE_GUARD });
    }
    Ok(entries as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    dim: usize,
    c: Vec<Vec<Vec<Rational>>>,
    unit: Vec<Rational>,
}

/// A unital associative algebra with basis `e_0..e_{m-1}` and
/// `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra", into = "RawAlgebra")]
pub struct FinDimAlgebra {
    c: Vec<Vec<Vec<Rational>>>,
    unit: Vec<Rational>,
}

impl TryFrom<RawAlgebra> for FinDimAlgebra {
    type Error = Error;
    fn try_from(r: RawAlgebra) -> Result<Self> {
        if r.c.len() != r.dim {
            return Err(Error::Parse(format!("c: expected {} rows, got {}", r.dim, r.c.len())));
        }
        FinDimAlgebra::new(r.c, r.unit)
    }
}

impl From<FinDimAlgebra> for RawAlgebra {
    fn from(a: FinDimAlgebra) -> Self {
        RawAlgebra { dim: a.dim(), c: a.c, unit: a.unit }
    }
}

impl FinDimAlgebra {
    /// Validates shapes, associativity on basis triples and the unit laws.
    pub fn new(c: Vec<Vec<Vec<Rational>>>, unit: Vec<Rational>) -> Result<Self> {
        let m = c.len();
        for (i, row) in c.iter().enumerate() {
            if row.len() != m || row.iter().any(|v| v.len() != m) {
                return Err(Error::Parse(format!("c[{}]: expected an {m} x {m} block", i)));
            }
        }
        if unit.len() != m {
            return Err(Error::Parse(format!("unit: expected {m} coordinates, got {}", unit.len())));
        }
        let a = FinDimAlgebra { c, unit };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let left = a.mul(a.basis_product(i, j), &a.basis(k));
                    let right = a.mul(&a.basis(i), &a.mul(&a.basis(j), &a.basis(k)));
                    if left != right {
                        return Err(Error::BadAlgebra(format!(
                            "associative: (e{i} e{j}) e{k} != e{i} (e{j} e{k})"
                        )));
                    }
                }
            }
            let b = a.basis(i);
            if a.mul(&a.unit, &b) != b || a.mul(&b, &a.unit) != b {
                return Err(Error::BadAlgebra(format!("unital: 1 e{i} or e{i} 1 differs from e{i}")));
            }
        }
        Ok(a)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => Error::Parse(e.to_string()),
            _ => Error::Json(e),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serializes")
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn unit(&self) -> &[Rational] {
        &self.unit
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Coordinates of `e_i e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i][j]
    }

    pub fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let m = self.dim();
        let mut out = vec![Rational::zero(); m];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let xy = x * y;
                for (k, c) in self.c[i][j].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    out[k] += &(&xy * c);
                }
            }
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.c[i][j] == self.c[j][i]))
    }

    /// `k[x]/(x^n)` in the basis `1, x, …, x^(n-1)`.
    pub fn truncated_polynomial(n: usize) -> Self {
        assert!(n >= 1);
        let c = (0..n)
            .map(|i| (0..n).map(|j| unit_vec(n, (i + j < n).then_some(i + j))).collect())
            .collect();
        FinDimAlgebra::new(c, unit_vec(n, Some(0))).expect("truncated polynomial algebra")
    }

    pub fn dual_numbers() -> Self {
        Self::truncated_polynomial(2)
    }

    /// `k^m` with componentwise product.
    pub fn product_of_fields(m: usize) -> Self {
        let c = (0..m).map(|i| (0..m).map(|j| unit_vec(m, (i == j).then_some(i))).collect()).collect();
        FinDimAlgebra::new(c, vec![Rational::one(); m]).expect("product of fields")
    }

    /// `n × n` matrices in the basis of matrix units `E_{ab}` at index `a n + b`.
    pub fn matrices(n: usize) -> Self {
        let m = n * n;
        let c = (0..m)
            .map(|i| (0..m).map(|j| unit_vec(m, (i % n == j / n).then_some((i / n) * n + j % n))).collect())
            .collect();
        let unit = (0..m).map(|i| if i / n == i % n { Rational::one() } else { Rational::zero() }).collect();
        FinDimAlgebra::new(c, unit).expect("matrix algebra")
    }

    /// Group algebra of `ℤ/n` in the basis of group elements.
    pub fn cyclic_group_algebra(n: usize) -> Self {
        let c = (0..n).map(|i| (0..n).map(|j| unit_vec(n, Some((i + j) % n))).collect()).collect();
        FinDimAlgebra::new(c, unit_vec(n, Some(0))).expect("group algebra")
    }

    /// `k[x,y]/(x,y)²` in the basis `1, x, y`.
    pub fn square_zero_plane() -> Self {
        let c = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| match (i, j) {
                        (0, j) => unit_vec(3, Some(j)),
                        (i, 0) => unit_vec(3, Some(i)),
                        _ => unit_vec(3, None),
                    })
                    .collect()
            })
            .collect();
        FinDimAlgebra::new(c, unit_vec(3, Some(0))).expect("square-zero algebra")
    }
}

fn unit_vec(m: usize, i: Option<usize>) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); m];
    if let Some(i) = i {
        v[i] = Rational::one();
    }
    v
}

/// The fixture algebras used throughout the tests.
pub fn fixture_algebras() -> Vec<(&'static str, FinDimAlgebra)> {
    vec![
        ("dual numbers", FinDimAlgebra::dual_numbers()),
        ("k x k", FinDimAlgebra::product_of_fields(2)),
        ("2x2 matrices", FinDimAlgebra::matrices(2)),
        ("group algebra Z/2", FinDimAlgebra::cyclic_group_algebra(2)),
    ]
}

fn flat(m: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &w| acc * m + w)
}

fn unflat(m: usize, len: usize, mut idx: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = idx % m;
        idx /= m;
    }
    w
}

/// A k-linear map `A^⊗n → A`, stored as `f(e_w)_k` at `flat(w) m + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    dim: usize,
    arity: usize,
    coeffs: Vec<Rational>,
}

impl Cochain {
    pub fn zero(dim: usize, arity: usize) -> Self {
        Cochain { dim, arity, coeffs: vec![Rational::zero(); dim.pow(arity as u32 + 1)] }
    }

    pub fn from_coeffs(dim: usize, arity: usize, coeffs: Vec<Rational>) -> Result<Self> {
        let want = dim.pow(arity as u32 + 1);
        if coeffs.len() != want {
            return Err(Error::DimensionMismatch(coeffs.len(), want));
        }
        Ok(Cochain { dim, arity, coeffs })
    }

    /// Tabulates `f` on basis words.
    pub fn from_fn(dim: usize, arity: usize, f: impl Fn(&[usize]) -> Vec<Rational>) -> Self {
        let mut out = Cochain::zero(dim, arity);
        for w in 0..dim.pow(arity as u32) {
            let v = f(&unflat(dim, arity, w));
            assert_eq!(v.len(), dim);
            out.coeffs[w * dim..(w + 1) * dim].clone_from_slice(&v);
        }
        out
    }

    /// The multiplication as a 2-cochain.
    pub fn multiplication(a: &FinDimAlgebra) -> Self {
        Cochain::from_fn(a.dim(), 2, |w| a.basis_product(w[0], w[1]).to_vec())
    }

    pub fn identity(a: &FinDimAlgebra) -> Self {
        Cochain::from_fn(a.dim(), 1, |w| a.basis(w[0]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn on_basis(&self, word: &[usize]) -> &[Rational] {
        let i = flat(self.dim, word) * self.dim;
        &self.coeffs[i..i + self.dim]
    }

    /// Multilinear evaluation on arbitrary elements.
    pub fn eval(&self, args: &[&[Rational]]) -> Result<Vec<Rational>> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        let m = self.dim;
        let mut out = vec![Rational::zero(); m];
        for w in 0..m.pow(self.arity as u32) {
            let word = unflat(m, self.arity, w);
            let coef = word.iter().zip(args).fold(Rational::one(), |acc, (i, a)| acc * &a[*i]);
            if coef.is_zero() {
                continue;
            }
            for (k, v) in self.on_basis(&word).iter().enumerate() {
                out[k] += &(&coef * v);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.same_shape(other)?;
        Ok(Cochain { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn scale(&self, s: &Rational) -> Cochain {
        Cochain { coeffs: self.coeffs.iter().map(|a| a * s).collect(), ..self.clone() }
    }

    fn same_shape(&self, other: &Cochain) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        Ok(())
    }
}

/// `(f∘g)(a…) = Σ_i (-1)^{(i-1)(q-1)} f(a_1, …, g(a_i, …, a_{i+q-1}), …)`.
pub fn circle(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(f.dim, g.dim));
    }
    let (m, p, q) = (f.dim, f.arity, g.arity);
    if p == 0 {
        return Ok(Cochain::zero(m, q.saturating_sub(1)));
    }
    let arity = p + q - 1;
    Ok(Cochain::from_fn(m, arity, |w| {
        let mut out = vec![Rational::zero(); m];
        for i in 0..p {
            let sign = if (i * (q + 1)) % 2 == 1 { -1 } else { 1 };
            for (t, gv) in g.on_basis(&w[i..i + q]).iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let word: Vec<usize> = w[..i].iter().copied().chain([t]).chain(w[i + q..].iter().copied()).collect();
                for (k, fv) in f.on_basis(&word).iter().enumerate() {
                    let d = gv * fv;
                    if sign < 0 {
                        out[k] -= &d;
                    } else {
                        out[k] += &d;
                    }
                }
            }
        }
        out
    }))
}

/// `[f,g] = f∘g − (-1)^{(p-1)(q-1)} g∘f`.
pub fn gerstenhaber(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    let fg = circle(f, g)?;
    let gf = circle(g, f)?;
    let odd = (f.arity + 1) * (g.arity + 1) % 2 == 1;
    let s = Rational::from_int(if odd { 1 } else { -1 });
    fg.add(&gf.scale(&s))
}

/// The matrix of `δ^n : Hom(A^⊗n, A) → Hom(A^⊗(n+1), A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainMatrix {
    pub n: usize,
    pub matrix: SparseMatrix,
}

impl CochainMatrix {
    pub fn apply(&self, f: &Cochain) -> Result<Cochain> {
        if f.arity != self.n || f.coeffs.len() != self.matrix.cols() {
            return Err(Error::ArityMismatch { expected: self.n, got: f.arity });
        }
        Ok(Cochain { dim: f.dim, arity: self.n + 1, coeffs: self.matrix.apply(&f.coeffs) })
    }
}

pub fn bar_differential(a: &FinDimAlgebra, n: usize) -> Result<CochainMatrix> {
    bar_differential_with(a, n, Exec::default())
}

/// Assembles `δ^n` row block by row block (one block per input word of
/// length `n+1`).
pub fn bar_differential_with(a: &FinDimAlgebra, n: usize, exec: Exec) -> Result<CochainMatrix> {
    let m = a.dim();
    guard(m, n as u32 + 2)?;
    let cols = m.pow(n as u32 + 1);
    let blocks = exec.map_range(m.pow(n as u32 + 1), |j| {
        let word = unflat(m, n + 1, j);
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); m];
        let mut push = |k: usize, col: usize, v: &Rational, negate: bool| {
            let e = rows[k].entry(col).or_insert_with(Rational::zero);
            if negate {
                *e -= v;
            } else {
                *e += v;
            }
        };
        // a_1 f(a_2, …)
        let tail = flat(m, &word[1..]);
        for l in 0..m {
            for (k, c) in a.basis_product(word[0], l).iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                push(k, tail * m + l, c, false);
            }
        }
        // (-1)^i f(…, a_i a_{i+1}, …)
        for i in 0..n {
            for (t, c) in a.basis_product(word[i], word[i + 1]).iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let merged: Vec<usize> =
                    word[..i].iter().copied().chain([t]).chain(word[i + 2..].iter().copied()).collect();
                let base = flat(m, &merged) * m;
                for k in 0..m {
                    push(k, base + k, c, i % 2 == 0);
                }
            }
        }
        // (-1)^{n+1} f(a_1, …, a_n) a_{n+1}
        let head = flat(m, &word[..n]);
        for l in 0..m {
            for (k, c) in a.basis_product(l, word[n]).iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                push(k, head * m + l, c, n.is_multiple_of(2));
            }
        }
        rows
    });
    let rows = blocks.into_iter().flatten().collect();
    Ok(CochainMatrix { n, matrix: SparseMatrix::from_rows(cols, rows) })
}

/// `dim HH^n(A) = dim ker δ^n − rank δ^{n-1}`.
pub fn hh_dim(a: &FinDimAlgebra, n: usize) -> Result<usize> {
    let m = a.dim();
    let d = bar_differential(a, n)?;
    let kernel = m.pow(n as u32 + 1) - d.matrix.rank();
    let image = if n == 0 { 0 } else { bar_differential(a, n - 1)?.matrix.rank() };
    Ok(kernel - image)
}

/// `dim Z(A)`, solving `x e_i = e_i x` directly.
pub fn center_dim(a: &FinDimAlgebra) -> usize {
    let m = a.dim();
    // unknown x = Σ x_j e_j; equation (i, k): Σ_j x_j (c[j][i][k] − c[i][j][k]) = 0
    let eqs: Vec<Vec<Rational>> = (0..m)
        .flat_map(|i| (0..m).map(move |k| (i, k)))
        .map(|(i, k)| (0..m).map(|j| &a.c[j][i][k] - &a.c[i][j][k]).collect())
        .collect();
    m - linalg::dense_rank(&eqs)
}

/// `dim Der(A)`, solving the Leibniz rule for the matrix of `D` directly.
pub fn derivation_dim(a: &FinDimAlgebra) -> usize {
    let m = a.dim();
    // D(e_j) = Σ_k d[j][k] e_k with unknown d[j][k] at column j m + k
    let mut eqs = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut row = vec![Rational::zero(); m * m];
                // D(e_i e_j)_k
                for (t, c) in a.c[i][j].iter().enumerate() {
                    row[t * m + k] += c;
                }
                // − (e_i D(e_j))_k − (D(e_i) e_j)_k
                for t in 0..m {
                    row[j * m + t] -= &a.c[i][t][k];
                    row[i * m + t] -= &a.c[t][j][k];
                }
                eqs.push(row);
            }
        }
    }
    m * m - linalg::dense_rank(&eqs)
}

/// `dim InnDer(A)`: rank of `x ↦ [a ↦ a x − x a]`.
pub fn inner_derivation_dim(a: &FinDimAlgebra) -> usize {
    let m = a.dim();
    let images: Vec<Vec<Rational>> = (0..m)
        .map(|x| {
            (0..m)
                .flat_map(|i| (0..m).map(move |k| (i, k)))
                .map(|(i, k)| &a.c[i][x][k] - &a.c[x][i][k])
                .collect()
        })
        .collect();
    linalg::dense_rank(&images)
}

/// An element of `A^⊗r` in the basis of words.
pub type Tensor = BTreeMap<Vec<usize>, Rational>;

fn tensor_add(t: &mut Tensor, w: Vec<usize>, v: Rational) {
    use std::collections::btree_map::Entry;
    match t.entry(w) {
        Entry::Vacant(e) => {
            if !v.is_zero() {
                e.insert(v);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += &v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Bar differential `a_0⊗…⊗a_{r-1} ↦ Σ_i (-1)^i …⊗a_i a_{i+1}⊗…`.
pub fn bar_d(a: &FinDimAlgebra, t: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (w, v) in t {
        for i in 0..w.len().saturating_sub(1) {
            for (k, c) in a.basis_product(w[i], w[i + 1]).iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let merged: Vec<usize> = w[..i].iter().copied().chain([k]).chain(w[i + 2..].iter().copied()).collect();
                let x = v * c;
                tensor_add(&mut out, merged, if i % 2 == 0 { x } else { -x });
            }
        }
    }
    out
}

/// Contracting homotopy `t ↦ 1 ⊗ t`.
pub fn bar_r(a: &FinDimAlgebra, t: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (w, v) in t {
        for (u, c) in a.unit().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            tensor_add(&mut out, std::iter::once(u).chain(w.iter().copied()).collect(), v * c);
        }
    }
    out
}

/// Checks `d_{n+1} r_n + r_{n-1} d_n = id` on every basis word of
/// `A^⊗(n+2)`.
pub fn homotopy_check(a: &FinDimAlgebra, n: usize) -> Result<bool> {
    Ok(homotopy_failures(a, n, bar_d)? == 0)
}

/// Number of basis words of `A^⊗(n+2)` on which the identity fails for the
/// differential `d`.
pub fn homotopy_failures(a: &FinDimAlgebra, n: usize, d: impl Fn(&FinDimAlgebra, &Tensor) -> Tensor + Sync) -> Result<usize> {
    let m = a.dim();
    guard(m, n as u32 + 3)?;
    let fails = Exec::default().map_range(m.pow(n as u32 + 2), |idx| {
        let w = unflat(m, n + 2, idx);
        let x: Tensor = [(w, Rational::one())].into_iter().collect();
        let mut lhs = d(a, &bar_r(a, &x));
        for (k, v) in bar_r(a, &d(a, &x)) {
            tensor_add(&mut lhs, k, v);
        }
        lhs != x
    });
    Ok(fails.into_iter().filter(|f| *f).count())
}

/// Per-order associator of `μ + Σ ℏ^k ν_k`: entry `k-1` is
/// `[ν_k, μ] + ½ Σ_{i+j=k} [ν_i, ν_j]`, the same form as the DGLA residual
/// `dν_k + ½ Σ [ν_i, ν_j]` with `d = [−, μ] = −δ`.
pub fn deformation_obstruction(a: &FinDimAlgebra, nu: &[Cochain]) -> Result<Vec<Cochain>> {
    let m = a.dim();
    guard(m, 4)?;
    for v in nu {
        if v.dim != m || v.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: v.arity });
        }
    }
    let mu = Cochain::multiplication(a);
    let half = Rational::new(1, 2);
    (1..=nu.len())
        .map(|k| {
            let mut r = gerstenhaber(&nu[k - 1], &mu)?;
            for i in 1..k {
                r = r.add(&gerstenhaber(&nu[i - 1], &nu[k - i - 1])?.scale(&half))?;
            }
            Ok(r)
        })
        .collect()
}

/// Given `ν_1..ν_{k-1}` associative through order `k-1`, finds `ν_k` with
/// vanishing order-`k` residual (taking the order-`k` input as zero), or
/// `None` when the obstruction class is nonzero.
pub fn solve_next_order(a: &FinDimAlgebra, nu: &[Cochain]) -> Result<Option<Cochain>> {
    let res = deformation_obstruction(a, nu)?;
    if let Some(k) = res.iter().position(|r| !r.is_zero()) {
        return Err(Error::NotAssociative(k + 1));
    }
    let m = a.dim();
    let mut padded = nu.to_vec();
    padded.push(Cochain::zero(m, 2));
    let ob = deformation_obstruction(a, &padded)?.pop().expect("one order");
    // [ν_k, μ] = −δν_k, so the new term solves δν_k = ob
    let d = bar_differential(a, 2)?;
    Ok(linalg::solve(&d.matrix.to_dense(), d.matrix.cols(), &ob.coeffs)
        .map(|x| Cochain { dim: m, arity: 2, coeffs: x }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate_and_round_trip() {
        for (name, a) in fixture_algebras() {
            let back = FinDimAlgebra::from_json(&a.to_json()).unwrap();
            assert_eq!(back, a, "{name}");
        }
        assert!(FinDimAlgebra::truncated_polynomial(4).is_commutative());
        assert!(!FinDimAlgebra::matrices(2).is_commutative());
        FinDimAlgebra::square_zero_plane();
    }

    #[test]
    fn bad_algebras_are_rejected() {
        let q = |n| Rational::from_int(n);
        // e0 e0 = e1, e1 anything = 0: associative, but no unit
        let z = vec![q(0), q(0)];
        let c = vec![vec![vec![q(0), q(1)], z.clone()], vec![z.clone(), z.clone()]];
        assert!(matches!(FinDimAlgebra::new(c, vec![q(1), q(0)]), Err(Error::BadAlgebra(_))));
        assert!(matches!(FinDimAlgebra::from_json(r#"{"dim":2,"c":[],"unit":[1,0]}"#), Err(Error::Parse(_))));
        assert!(FinDimAlgebra::from_json(r#"{"dim":1,"c":[[[1]]],"unit":[1],"x":0}"#).is_err());
        let ok = FinDimAlgebra::from_json(r#"{"dim":1,"c":[[["1"]]],"unit":["1"]}"#).unwrap();
        assert_eq!(ok.dim(), 1);
    }

    #[test]
    fn delta_of_identity_is_multiplication() {
        for (_, a) in fixture_algebras() {
            let d1 = bar_differential(&a, 1).unwrap();
            assert_eq!(d1.apply(&Cochain::identity(&a)).unwrap(), Cochain::multiplication(&a));
        }
    }

    #[test]
    fn delta_is_bracket_with_minus_mu() {
        let a = FinDimAlgebra::matrices(2);
        let minus_mu = Cochain::multiplication(&a).scale(&Rational::from_int(-1));
        for n in 0..=2 {
            let f = Cochain::from_fn(4, n, |w| {
                (0..4).map(|k| Rational::from_int((w.iter().sum::<usize>() * 3 + k * 5 + 1) as i64 % 7 - 3)).collect()
            });
            let d = bar_differential(&a, n).unwrap();
            assert_eq!(d.apply(&f).unwrap(), gerstenhaber(&f, &minus_mu).unwrap(), "n={n}");
        }
    }

    #[test]
    fn commutative_delta0_vanishes() {
        for a in [FinDimAlgebra::dual_numbers(), FinDimAlgebra::cyclic_group_algebra(3)] {
            assert!(bar_differential(&a, 0).unwrap().matrix.is_zero());
        }
    }

    #[test]
    fn guard_refuses_large_degrees() {
        let a = FinDimAlgebra::matrices(2);
        assert!(matches!(bar_differential(&a, 7), Err(Error::SizeGuard { .. })));
        assert!(matches!(homotopy_check(&a, 6), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn parallel_assembly_matches_sequential() {
        let a = FinDimAlgebra::matrices(2);
        assert_eq!(
            bar_differential_with(&a, 2, Exec::Sequential).unwrap(),
            bar_differential_with(&a, 2, Exec::Parallel).unwrap()
        );
    }
}
