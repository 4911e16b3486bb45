//! Integral of three full-plane angle forms `d Arg(p_a − p_b)` over the
//! configuration space of three points in `ℂ` modulo `z ↦ az + b`
//! (`a > 0`, `b ∈ ℂ`), on the slice `p₁ = 0, p₂ = e^{iθ}` with
//! coordinates `(θ, x₃, y₃)`.

use std::f64::consts::PI;

use rand::Rng;

use super::sampler::{planar_density, planar_sample};
use super::{determinant, run_chunks, WeightEstimate, COINCIDENCE_FLOOR};
use crate::error::{Error, Result};
use crate::par::Exec;

fn grad(a: usize, b: usize, pts: &[(f64, f64); 3], theta: f64) -> Vec<f64> {
    let w = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
    let r2 = w.0 * w.0 + w.1 * w.1;
    let g = (-w.1 / r2, w.0 / r2);
    let dtheta = g.0 * -theta.sin() + g.1 * theta.cos();
    let mut row = vec![0.0; 3];
    for (v, s) in [(a, 1.0), (b, -1.0)] {
        match v {
            1 => row[0] += s * dtheta,
            2 => {
                row[1] += s * g.0;
                row[2] += s * g.1;
            }
            _ => {}
        }
    }
    row
}

/// Estimate of `(2π)^{−3} ∫ ∧_e d Arg(p_a − p_b)` for the three edges
/// `(a, b)` (0-based points). Repeated edges give exactly zero.
pub fn vanishing_check(edges: [(usize, usize); 3], samples: u64, seed: u64) -> Result<WeightEstimate> {
    vanishing_check_with(edges, samples, seed, Exec::default())
}

pub fn vanishing_check_with(
    edges: [(usize, usize); 3],
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<WeightEstimate> {
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a == b || a > 2 || b > 2) {
        return Err(Error::WeightPrecondition(format!("edge ({}, {}) is not between two of three points", a + 1, b + 1)));
    }
    let unordered = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    if (0..3).any(|i| (0..i).any(|j| unordered(edges[i]) == unordered(edges[j]))) {
        return Ok(WeightEstimate { value: 0.0, stderr: 0.0, samples, seed, rejected: 0 });
    }
    let norm = (2.0 * PI).powi(3);
    run_chunks(samples, seed, exec, |rng| {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        let p2 = (theta.cos(), theta.sin());
        let centres = [(0.0, 0.0), p2];
        let pick = rng.random_range(0..2);
        let z = planar_sample(rng, centres[pick]);
        let density = (planar_density(centres[0], z) + planar_density(centres[1], z)) / 2.0 / (2.0 * PI);
        let pts = [(0.0, 0.0), p2, z];
        if (z.0).hypot(z.1) < COINCIDENCE_FLOOR || (z.0 - p2.0).hypot(z.1 - p2.1) < COINCIDENCE_FLOOR {
            return None;
        }
        let m = edges.iter().map(|&(a, b)| grad(a, b, &pts, theta)).collect();
        Some(determinant(m) / density / norm)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_and_repeated() {
        assert!(vanishing_check([(0, 0), (1, 2), (2, 0)], 10, 1).is_err());
        assert!(vanishing_check([(0, 3), (1, 2), (2, 0)], 10, 1).is_err());
        let e = vanishing_check([(0, 1), (1, 0), (2, 0)], 10, 1).unwrap();
        assert_eq!((e.value, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let arg = |a: usize, b: usize, th: f64, z: (f64, f64)| {
            let pts = [(0.0, 0.0), (th.cos(), th.sin()), z];
            (pts[a].1 - pts[b].1).atan2(pts[a].0 - pts[b].0)
        };
        let (th, z): (f64, (f64, f64)) = (0.7, (0.3, -1.2));
        let pts = [(0.0, 0.0), (th.cos(), th.sin()), z];
        let h = 1e-6;
        for (a, b) in [(0, 1), (1, 2), (2, 0), (2, 1)] {
            let row = grad(a, b, &pts, th);
            let fd = [
                (arg(a, b, th + h, z) - arg(a, b, th - h, z)) / (2.0 * h),
                (arg(a, b, th, (z.0 + h, z.1)) - arg(a, b, th, (z.0 - h, z.1))) / (2.0 * h),
                (arg(a, b, th, (z.0, z.1 + h)) - arg(a, b, th, (z.0, z.1 - h))) / (2.0 * h),
            ];
            for k in 0..3 {
                assert!((row[k] - fd[k]).abs() < 1e-6, "{a}{b}: {row:?} vs {fd:?}");
            }
        }
    }
}
