//! Weights of admissible graphs: the angle map, the top form `∧_e dφ_e` on the
//! gauge slice `q₁ = 0, q₂ = 1`, and its Monte-Carlo integral.
//!
//! [`integrate_weight`] returns the star-class weight
//! `Ŵ_Γ = (2π)^{−E} ∫ w_Γ`. Summing `W_Γ U_Γ` over all star orderings of a
//! graph gives `Ŵ_Γ U_Γ`; the per-graph weight with the `1/∏ k_j!` prefactor is
//! [`WeightEstimate::labeled`].

mod cache;
mod sampler;
mod vanishing;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::graphs::{AdmissibleGraph, Target};
use crate::par::Exec;

pub use cache::{CacheRecord, WeightCache, CACHE_ENV};
pub use sampler::{gauge_fix_sample, ConfigPoint};
pub use vanishing::{vanishing_check, vanishing_check_with};

/// Samples closer than this are rejected.
pub const COINCIDENCE_FLOOR: f64 = 1e-9;
/// Samples per RNG stream.
pub const CHUNK: u64 = 1 << 15;
/// Highest tolerated fraction of rejected samples.
pub const MAX_REJECTION_RATE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub rejected: u64,
}

impl WeightEstimate {
    /// `value / ∏_j (#star(p_j))!`.
    pub fn labeled(&self, g: &AdmissibleGraph) -> f64 {
        let f: f64 = g.star_sizes().iter().map(|&k| (1..=k).product::<usize>() as f64).product();
        self.value / f
    }
}

/// `φ(p, z) = Arg((z − p)/(z − p̄))` in `[0, 2π)`, for an edge from `p` to `z`.
pub fn angle(p: (f64, f64), z: (f64, f64)) -> Result<f64> {
    if (z.0 - p.0).hypot(z.1 - p.1) < COINCIDENCE_FLOOR {
        return Err(Error::Coincident { floor: COINCIDENCE_FLOOR });
    }
    let a = (z.1 - p.1).atan2(z.0 - p.0) - (z.1 + p.1).atan2(z.0 - p.0);
    Ok(a.rem_euclid(2.0 * PI))
}

/// Gradient of `Arg(w)` in `(Re w, Im w)`.
fn darg(u: f64, v: f64) -> (f64, f64) {
    let r2 = u * u + v * v;
    (-v / r2, u / r2)
}

fn point(x: &ConfigPoint, t: Target) -> (f64, f64) {
    match t {
        Target::P(i) => x.p[i],
        Target::Q(k) => (x.q[k], 0.0),
    }
}

/// Slice coordinates: `(x_{p₁}, y_{p₁}, …, x_{p_n}, y_{p_n}, q₃, …, q_n̄)`.
fn column(n: usize, t: Target) -> Option<(usize, bool)> {
    match t {
        Target::P(i) => Some((2 * i, true)),
        Target::Q(k) if k >= 2 => Some((2 * n + k - 2, false)),
        Target::Q(_) => None,
    }
}

/// Jacobian of the edge angles (rows ordered by source, then star position)
/// with respect to the slice coordinates.
pub fn angle_jacobian(g: &AdmissibleGraph, x: &ConfigPoint) -> Result<Vec<Vec<f64>>> {
    check_shape(g, x)?;
    check_separated(x)?;
    let n = g.n();
    let cols = g.config_dim();
    let mut rows = Vec::with_capacity(g.edge_count());
    for (src, t) in g.edges() {
        let p = x.p[src];
        let z = point(x, t);
        let mut row = vec![0.0; cols];
        // φ = Arg(z − p) − Arg(z − p̄)
        let (a1, a2) = darg(z.0 - p.0, z.1 - p.1);
        let (b1, b2) = darg(z.0 - p.0, z.1 + p.1);
        let c = 2 * src;
        row[c] += -a1 + b1;
        row[c + 1] += -a2 - b2;
        if let Some((c, planar)) = column(n, t) {
            row[c] += a1 - b1;
            if planar {
                row[c + 1] += a2 - b2;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The edge angles at `x`, in edge order.
pub fn angles(g: &AdmissibleGraph, x: &ConfigPoint) -> Result<Vec<f64>> {
    g.edges().map(|(src, t)| angle(x.p[src], point(x, t))).collect()
}

/// `w_Γ` at `x` as a density on the slice: the Jacobian determinant.
pub fn form_density(g: &AdmissibleGraph, x: &ConfigPoint) -> Result<f64> {
    if g.edge_count() != g.config_dim() {
        return Err(Error::WeightPrecondition(format!(
            "graph has {} edges but the configuration space has dimension {}",
            g.edge_count(),
            g.config_dim()
        )));
    }
    Ok(determinant(angle_jacobian(g, x)?))
}

fn check_shape(g: &AdmissibleGraph, x: &ConfigPoint) -> Result<()> {
    if x.p.len() != g.n() || x.q.len() != g.nbar() {
        return Err(Error::WeightPrecondition(format!(
            "configuration has {}+{} points, graph has {}+{} vertices",
            x.p.len(),
            x.q.len(),
            g.n(),
            g.nbar()
        )));
    }
    Ok(())
}

fn check_separated(x: &ConfigPoint) -> Result<()> {
    if x.min_distance() < COINCIDENCE_FLOOR {
        return Err(Error::Coincident { floor: COINCIDENCE_FLOOR });
    }
    Ok(())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).expect("nonempty");
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    det
}

/// Streaming mean and variance; merged with Chan's formula.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
    pub rejected: u64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return Moments { rejected: self.rejected + o.rejected, ..o };
        }
        if o.n == 0 {
            return Moments { rejected: self.rejected + o.rejected, ..self };
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
            rejected: self.rejected + o.rejected,
        }
    }

    pub fn estimate(self, seed: u64) -> Result<WeightEstimate> {
        if self.rejected as f64 > MAX_REJECTION_RATE * self.n as f64 {
            return Err(Error::RejectionRate { rejected: self.rejected, samples: self.n });
        }
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Ok(WeightEstimate {
            value: self.mean,
            stderr: (var / self.n as f64).sqrt(),
            samples: self.n,
            seed,
            rejected: self.rejected,
        })
    }
}

/// Runs `sample` over `samples` draws in fixed chunks, chunk `c` on stream
/// `c` of the seeded generator, and merges the chunks in order.
pub(crate) fn run_chunks<F>(samples: u64, seed: u64, exec: Exec, sample: F) -> Result<WeightEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync + Send,
{
    if samples == 0 {
        return Err(Error::WeightPrecondition("at least one sample is required".into()));
    }
    let chunks = samples.div_ceil(CHUNK) as usize;
    let parts = exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = CHUNK.min(samples - c as u64 * CHUNK);
        let mut m = Moments::default();
        for _ in 0..len {
            match sample(&mut rng) {
                Some(v) => m.push(v),
                None => {
                    m.rejected += 1;
                    m.push(0.0);
                }
            }
        }
        m
    });
    parts.into_iter().fold(Moments::default(), Moments::merge).estimate(seed)
}

/// Monte-Carlo estimate of `Ŵ_Γ = (2π)^{−E} ∫ w_Γ` over the gauge slice.
pub fn integrate_weight(g: &AdmissibleGraph, samples: u64, seed: u64) -> Result<WeightEstimate> {
    integrate_weight_with(g, samples, seed, Exec::default())
}

pub fn integrate_weight_with(g: &AdmissibleGraph, samples: u64, seed: u64, exec: Exec) -> Result<WeightEstimate> {
    if g.nbar() < 2 {
        return Err(Error::WeightPrecondition(format!("gauge slice needs nbar >= 2, got {}", g.nbar())));
    }
    if g.edge_count() != g.config_dim() {
        return Err(Error::WeightPrecondition(format!(
            "graph has {} edges but the configuration space has dimension {}",
            g.edge_count(),
            g.config_dim()
        )));
    }
    let norm = (2.0 * PI).powi(g.edge_count() as i32);
    run_chunks(samples, seed, exec, |rng| {
        let (x, density) = gauge_fix_sample(g.n(), g.nbar(), rng).ok()?;
        if x.min_distance() < COINCIDENCE_FLOOR {
            return None;
        }
        let w = determinant(angle_jacobian(g, &x).ok()?);
        Some(w / density / norm)
    })
}

/// `1/n̄!`, the weight of the one-vertex graph with all edges to the boundary.
pub fn wedge_weight_closed_form(nbar: usize) -> Rational {
    let f: i64 = (1..=nbar as i64).product();
    Rational::new(1, f)
}
