//! Seeded random generators and fixed corpora used by tests, benches and the
//! CLI.

use rand::Rng;

use crate::algebra::{MultiIndex, Poly, Rational};
use crate::dpoly::PolyDiffOp;
use crate::tpoly::{lie_poisson, PolyVector};

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.random_range(-5i64..=5);
    let den = rng.random_range(1i64..=4);
    Rational::new(num, den)
}

fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_exps<R: Rng>(rng: &mut R, dim: usize, max_degree: u32) -> MultiIndex {
    let total = rng.random_range(0..=max_degree);
    let mut v = vec![0u32; dim];
    for _ in 0..total {
        v[rng.random_range(0..dim)] += 1;
    }
    MultiIndex::from_vec(v)
}

/// Up to `max_terms` monomials of total degree at most `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, dim: usize, max_degree: u32, max_terms: usize) -> Poly {
    let n = rng.random_range(1..=max_terms.max(1));
    Poly::from_terms(dim, (0..n).map(|_| (random_exps(rng, dim, max_degree), nonzero_rational(rng))))
}

pub fn random_op<R: Rng>(
    rng: &mut R,
    dim: usize,
    arity: usize,
    max_slot_order: u32,
    coeff_degree: u32,
    max_terms: usize,
) -> PolyDiffOp {
    let n = rng.random_range(1..=max_terms.max(1));
    PolyDiffOp::from_terms(
        dim,
        arity,
        (0..n).map(|_| {
            let derivs = (0..arity).map(|_| random_exps(rng, dim, max_slot_order)).collect();
            (derivs, random_poly(rng, dim, coeff_degree, 2))
        }),
    )
    .expect("well-formed")
}

pub fn random_polyvector<R: Rng>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    coeff_degree: u32,
    max_terms: usize,
) -> PolyVector {
    let mut v = PolyVector::zero(dim, degree);
    if degree > dim {
        return v;
    }
    let n = rng.random_range(1..=max_terms.max(1));
    for _ in 0..n {
        let mut axes: Vec<usize> = (0..dim).collect();
        for i in 0..degree {
            let j = rng.random_range(i..dim);
            axes.swap(i, j);
        }
        axes.truncate(degree);
        v.add_component(&axes, &random_poly(rng, dim, coeff_degree, 2)).expect("in range");
    }
    v
}

/// Constant bivector with random rational components in every slot.
pub fn random_constant_bivector<R: Rng>(rng: &mut R, dim: usize) -> PolyVector {
    let mut v = PolyVector::zero(dim, 2);
    for i in 0..dim {
        for j in i + 1..dim {
            v.add_component(&[i, j], &Poly::constant(dim, nonzero_rational(rng))).expect("in range");
        }
    }
    v
}

/// All monomials with coefficient 1 and total degree at most `max_degree`.
pub fn monomial_basis(dim: usize, max_degree: u32) -> Vec<Poly> {
    MultiIndex::all_up_to(dim, max_degree)
        .into_iter()
        .map(|m| Poly::monomial(m, Rational::one()))
        .collect()
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Lie–Poisson bivector from the nonzero brackets `[e_i,e_j] = Σ c_k e_k`.
pub fn lie_poisson_from(dim: usize, brackets: &[(usize, usize, Vec<(usize, i64)>)]) -> PolyVector {
    let mut c = vec![vec![vec![q(0); dim]; dim]; dim];
    for (i, j, out) in brackets {
        for &(k, v) in out {
            c[*i][*j][k] = q(v);
            c[*j][*i][k] = q(-v);
        }
    }
    lie_poisson(&c).expect("skew by construction")
}

pub fn so3() -> PolyVector {
    lie_poisson_from(3, &[(0, 1, vec![(2, 1)]), (1, 2, vec![(0, 1)]), (2, 0, vec![(1, 1)])])
}

fn field(dim: usize, parts: &[(&[usize], Poly)]) -> PolyVector {
    let mut v = PolyVector::zero(dim, 2);
    for (axes, c) in parts {
        v.add_component(axes, c).expect("in range");
    }
    v
}

fn x(dim: usize, i: usize) -> Poly {
    Poly::var(dim, i)
}

fn c(dim: usize, v: i64) -> Poly {
    Poly::constant(dim, q(v))
}

/// Ten Poisson bivectors: constant, so(3), solvable and nilpotent
/// Lie–Poisson structures, and a nonlinear planar one.
pub fn poisson_corpus() -> Vec<(&'static str, PolyVector)> {
    vec![
        ("const-d2", field(2, &[(&[0, 1], c(2, 1))])),
        ("const-d3", field(3, &[(&[0, 1], c(3, 2)), (&[1, 2], Poly::constant(3, Rational::new(-1, 3)))])),
        ("const-d4", field(4, &[(&[0, 1], c(4, 1)), (&[2, 3], c(4, 1)), (&[0, 3], c(4, 5))])),
        ("so3", so3()),
        ("so3-scaled", so3().scale(&Rational::new(5, 2))),
        ("sl2", lie_poisson_from(3, &[(0, 1, vec![(2, 1)]), (1, 2, vec![(0, -1)]), (2, 0, vec![(1, -1)])])),
        ("aff1", lie_poisson_from(2, &[(0, 1, vec![(1, 1)])])),
        ("heisenberg", lie_poisson_from(3, &[(0, 1, vec![(2, 1)])])),
        ("solvable-r3", lie_poisson_from(3, &[(0, 1, vec![(1, 1)]), (0, 2, vec![(2, 1)])])),
        ("planar-nonlinear", field(2, &[(&[0, 1], &(&x(2, 0) * &x(2, 0)) + &x(2, 1))])),
    ]
}

/// Ten bivectors that fail the Jacobi identity.
pub fn non_poisson_corpus() -> Vec<(&'static str, PolyVector)> {
    vec![
        ("x1x2-plus-const", field(3, &[(&[0, 1], &x(3, 0) * &x(3, 1)), (&[1, 2], c(3, 1))])),
        ("const-plus-linear-d4", field(4, &[(&[0, 1], c(4, 1)), (&[2, 3], x(4, 0))])),
        ("x2-plus-x1", field(3, &[(&[0, 1], x(3, 1)), (&[1, 2], x(3, 0))])),
        ("non-lie-d3", field(3, &[(&[0, 1], x(3, 0)), (&[1, 2], x(3, 1))])),
        ("quadratic-d3", field(3, &[(&[0, 1], &x(3, 2) * &x(3, 2)), (&[1, 2], x(3, 1))])),
        ("x3-and-x3", field(3, &[(&[0, 1], x(3, 2)), (&[1, 2], x(3, 2)), (&[0, 2], c(3, 1))])),
        ("d4-chain", field(4, &[(&[0, 1], x(4, 2)), (&[2, 3], x(4, 0))])),
        ("d4-mixed", field(4, &[(&[0, 1], x(4, 3)), (&[1, 2], x(4, 0)), (&[2, 3], c(4, 2))])),
        ("cubic-d3", field(3, &[(&[0, 1], &(&x(3, 1) * &x(3, 1)) * &x(3, 1)), (&[1, 2], x(3, 0))])),
        ("d4-linear-bad", field(4, &[(&[0, 1], x(4, 1)), (&[0, 2], x(4, 3)), (&[1, 3], x(4, 2))])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpoly::{is_poisson, jacobiator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jacobi_on_coordinates(pi: &PolyVector) -> bool {
        let d = pi.dim();
        let xs: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    if !jacobiator(pi, &xs[i], &xs[j], &xs[k]).unwrap().is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn corpora_are_classified() {
        for (name, pi) in poisson_corpus() {
            assert!(jacobi_on_coordinates(&pi), "{name}");
            assert!(is_poisson(&pi).unwrap(), "{name}");
        }
        for (name, pi) in non_poisson_corpus() {
            assert!(!jacobi_on_coordinates(&pi), "{name}");
        }
    }

    #[test]
    fn generators_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 2, 3, 4);
            assert!(p.degree().unwrap_or(0) <= 3);
            let op = random_op(&mut rng, 2, 3, 2, 1, 3);
            assert_eq!(op.arity(), 3);
            assert!(op.max_slot_order() <= 2);
            let v = random_polyvector(&mut rng, 3, 2, 1, 3);
            assert_eq!(v.degree(), 2);
        }
        assert_eq!(monomial_basis(2, 3).len(), 10);
    }
}
