//! Formal power series in ℏ truncated at a fixed order.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Poly, Rational};
use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 4;

/// Coefficient types that form a ring without a global zero.
pub trait SeriesCoeff: Clone {
    fn zero_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl SeriesCoeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl SeriesCoeff for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.dim())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// `c_0 + c_1 ℏ + … + c_N ℏ^N`. Always holds exactly `N + 1` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSeries<T> {
    coeffs: Vec<T>,
}

impl<T> HSeries<T> {
    /// Panics on an empty vector; the truncation order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        HSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut T {
        &mut self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> HSeries<U> {
        HSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check_order<U>(&self, other: &HSeries<U>) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    /// Cauchy product with a caller-supplied bilinear map, truncated at N.
    pub fn convolve<U, V>(
        &self,
        other: &HSeries<U>,
        zero: impl Fn() -> V,
        mut f: impl FnMut(&T, &U) -> V,
        mut acc: impl FnMut(&mut V, V),
    ) -> Result<HSeries<V>> {
        self.check_order(other)?;
        let n = self.order();
        let mut out: Vec<V> = (0..=n).map(|_| zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                acc(&mut out[i + j], f(a, b));
            }
        }
        Ok(HSeries { coeffs: out })
    }
}

impl<T: SeriesCoeff> HSeries<T> {
    /// `c + 0ℏ + …` at order `n`.
    pub fn constant(c: T, n: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; n + 1];
        coeffs[0] = c;
        HSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(HSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add_ref(b)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let z = self.coeffs[0].zero_like();
        self.convolve(other, || z.clone(), |a, b| a.mul_ref(b), |acc, v| *acc = acc.add_ref(&v))
    }
}

impl<T: Serialize> Serialize for HSeries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, T> {
            coeffs: &'a [T],
        }
        Repr { coeffs: &self.coeffs }.serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for HSeries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr<T> {
            coeffs: Vec<T>,
        }
        let r = Repr::<T>::deserialize(d)?;
        if r.coeffs.is_empty() {
            return Err(serde::de::Error::custom("series needs at least one coefficient"));
        }
        Ok(HSeries { coeffs: r.coeffs })
    }
}
