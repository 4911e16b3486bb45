//! Importance sampler on the gauge slice.
//!
//! `q₃ < q₄ < …` are drawn as successive gaps after `q₂ = 1` from an equal
//! mixture of the radial law below and `s = (u/(1−u))²`, whose density
//! `~s^{−1/2}` near zero covers neighbouring boundary points colliding.
//! Each `p_j` is drawn from an equal mixture of polar proposals centred at
//! every `q` and every earlier `p`, with radius `r = (1−u)^{−2} − 1`
//! (density `½(1+r)^{−3/2}`, so `~1/r` near the centre and `r^{−5/2}` far
//! out) and uniform angle, reflected into the upper half-plane. The returned
//! density is the exact mixture density (balance heuristic).

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigPoint {
    pub p: Vec<(f64, f64)>,
    pub q: Vec<f64>,
}

impl ConfigPoint {
    /// Smallest distance between two of the points.
    pub fn min_distance(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.p.iter().copied().chain(self.q.iter().map(|&q| (q, 0.0))).collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min((pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1));
            }
        }
        best
    }
}

pub(crate) fn radius<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (1.0 - u).powi(-2) - 1.0
}

pub(crate) fn radius_density(r: f64) -> f64 {
    0.5 * (1.0 + r).powf(-1.5)
}

fn gap<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        radius(rng)
    } else {
        let u: f64 = rng.random();
        (u / (1.0 - u)).powi(2)
    }
}

fn gap_density(s: f64) -> f64 {
    let t = s.sqrt();
    0.5 * radius_density(s) + 0.5 / (2.0 * t * (1.0 + t).powi(2))
}

/// Density in the plane of `c + r e^{iθ}` with `θ` uniform.
pub(crate) fn planar_density(c: (f64, f64), z: (f64, f64)) -> f64 {
    let r = (z.0 - c.0).hypot(z.1 - c.1);
    radius_density(r) / (2.0 * PI * r)
}

pub(crate) fn planar_sample<R: Rng>(rng: &mut R, c: (f64, f64)) -> (f64, f64) {
    let r = radius(rng);
    let t: f64 = rng.random_range(0.0..2.0 * PI);
    (c.0 + r * t.cos(), c.1 + r * t.sin())
}

/// Density of the reflected proposal at `z` in the upper half-plane.
fn half_plane_density(c: (f64, f64), z: (f64, f64)) -> f64 {
    planar_density(c, z) + planar_density(c, (z.0, -z.1))
}

/// A point of the slice `q₁ = 0, q₂ = 1` and its sampling density.
pub fn gauge_fix_sample<R: Rng>(n: usize, nbar: usize, rng: &mut R) -> Result<(ConfigPoint, f64)> {
    if nbar < 2 {
        return Err(Error::WeightPrecondition(format!("gauge slice needs nbar >= 2, got {nbar}")));
    }
    let mut density = 1.0;
    let mut q = vec![0.0, 1.0];
    for _ in 2..nbar {
        let s = gap(rng);
        density *= gap_density(s);
        q.push(q.last().expect("nonempty") + s);
    }
    let mut p: Vec<(f64, f64)> = Vec::with_capacity(n);
    for _ in 0..n {
        let centres: Vec<(f64, f64)> = q.iter().map(|&x| (x, 0.0)).chain(p.iter().copied()).collect();
        let c = centres[rng.random_range(0..centres.len())];
        let (x, y) = planar_sample(rng, c);
        let z = (x, y.abs());
        density *= centres.iter().map(|&c| half_plane_density(c, z)).sum::<f64>() / centres.len() as f64;
        p.push(z);
    }
    Ok((ConfigPoint { p, q }, density))
}
