//! Exact linear algebra over ℚ: sparse matrices with fraction-free rank,
//! dense Gauss–Jordan for kernels and solves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

/// Row-major sparse matrix; each row is sorted by column with no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    /// Builds from per-row maps; zero entries are dropped.
    pub fn from_rows(cols: usize, rows: Vec<BTreeMap<usize, Rational>>) -> Self {
        let data: Vec<_> = rows
            .into_iter()
            .map(|r| {
                debug_assert!(r.keys().all(|&c| c < cols));
                r.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows: data.len(), cols, data }
    }

    pub fn from_dense(m: &[Vec<Rational>], cols: usize) -> Self {
        let rows = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect())
            .collect();
        SparseMatrix::from_rows(cols, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.data
            .iter()
            .map(|r| {
                let mut d = vec![Rational::zero(); self.cols];
                for (c, v) in r {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        self.data
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c]))
            .collect()
    }

    /// `self · rhs`, or `None` on a shape mismatch.
    pub fn mul(&self, rhs: &SparseMatrix) -> Option<SparseMatrix> {
        if self.cols != rhs.rows {
            return None;
        }
        let rows = self
            .data
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in r {
                    for (c, b) in &rhs.data[*k] {
                        *acc.entry(*c).or_insert_with(Rational::zero) += &(a * b);
                    }
                }
                acc
            })
            .collect();
        Some(SparseMatrix::from_rows(rhs.cols, rows))
    }

    /// Rank by fraction-free elimination: rows are scaled to primitive
    /// integer vectors and reduced against pivots by cross-multiplication.
    pub fn rank(&self) -> usize {
        let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
        for r in &self.data {
            let mut row = primitive(integer_row(r));
            while let Some(&(lead, _)) = row.first() {
                match pivots.get(&lead) {
                    Some(p) => row = primitive(cross_reduce(&row, p)),
                    None => {
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

fn integer_row(r: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let l = r.iter().fold(BigInt::one(), |l, (_, v)| l.lcm(v.denom()));
    r.iter().map(|(c, v)| (*c, v.numer() * (&l / v.denom()))).collect()
}

fn primitive(mut r: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let g = r.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
    if g > BigInt::one() {
        for (_, v) in r.iter_mut() {
            *v /= &g;
        }
    }
    r
}

/// `p₀·row − row₀·p`, which cancels the shared leading column.
fn cross_reduce(row: &[(usize, BigInt)], p: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
    let (a, b) = (&p[0].1, &row[0].1);
    let mut out = Vec::with_capacity(row.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < p.len() {
        let take = match (row.get(i), p.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        let (c, v) = match take {
            std::cmp::Ordering::Less => {
                i += 1;
                (row[i - 1].0, a * &row[i - 1].1)
            }
            std::cmp::Ordering::Greater => {
                j += 1;
                (p[j - 1].0, -(b * &p[j - 1].1))
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
                (row[i - 1].0, a * &row[i - 1].1 - b * &p[j - 1].1)
            }
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    if let Some((_, lead)) = out.first() {
        if lead.is_negative() {
            out.iter_mut().for_each(|(_, v)| *v = -&*v);
        }
    }
    out
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

pub fn dense_rank(m: &[Vec<Rational>]) -> usize {
    rref(&mut m.to_vec()).len()
}

/// A basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &[Vec<Rational>], cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.len(), b.len());
    let mut a: Vec<Vec<Rational>> =
        m.iter().zip(b).map(|(r, v)| r.iter().cloned().chain(std::iter::once(v.clone())).collect()).collect();
    let pivots = rref(&mut a);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}
