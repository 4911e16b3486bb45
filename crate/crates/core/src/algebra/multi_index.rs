use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of length `d`. Doubles as a monomial key and as a
/// derivative multi-index.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if componentwise non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn with_incremented(&self, axis: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[axis] += 1;
        MultiIndex(v)
    }

    /// All `m` with `m <= self` componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut p = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(MultiIndex).collect()
    }

    /// All exponent vectors in `dim` variables with total degree `<= max_degree`,
    /// in canonical order.
    pub fn all_up_to(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() == dim {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(dim, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(dim, max_degree, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Graded lexicographic: total degree first, then exponents lexicographically.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let a = MultiIndex::from_vec(vec![0, 1]);
        let b = MultiIndex::from_vec(vec![1, 0]);
        let c = MultiIndex::from_vec(vec![0, 2]);
        let mut v = vec![c.clone(), a.clone(), b.clone(), MultiIndex::zero(2)];
        v.sort();
        assert_eq!(v, vec![MultiIndex::zero(2), b, a, c]);
    }

    #[test]
    fn enumerate_counts() {
        // C(d + k, k)
        assert_eq!(MultiIndex::all_up_to(2, 3).len(), 10);
        assert_eq!(MultiIndex::all_up_to(3, 3).len(), 20);
        assert_eq!(MultiIndex::from_vec(vec![2, 1]).sub_indices().len(), 6);
    }
}
