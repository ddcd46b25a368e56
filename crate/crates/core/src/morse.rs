//! Height functions `h_u(p) = ⟨f(p), u⟩` on catalog immersions, their
//! critical-point counts `μ_i(u)`, and the total curvatures `τ_i(f)`, `τ(f)`.
//!
//! Two independent pipelines are kept: counts from the closed-form critical
//! points of `h_u`, and `|det A_ξ|` sampled over the unit normal bundle. By
//! homogeneity the normal-bundle integral over `M` collapses to one normal
//! sphere times `Vol(M)`.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogImmersion, Family};
use crate::error::{Error, Result};
use crate::sampling;
use crate::sphere::{spectrum, sphere_volume, DEFAULT_INDEX_TAU};

/// Block norm below which `u` counts as non-generic.
pub const DEGENERATE_TOL: f64 = 1e-7;

const NORMAL_STREAMS: u64 = 1 << 48;
const EULER_STREAMS: u64 = 2 << 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub label: String,
    pub index: usize,
    pub position: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub u: Vec<f64>,
    pub points: Vec<CriticalPoint>,
    pub degenerate: bool,
}

impl CriticalSet {
    pub fn euler_sum(&self) -> i64 {
        self.points
            .iter()
            .map(|p| if p.index % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

/// Round factors as `(dim, radius, offset of the factor's R^{dim+1} block)`.
fn factors(m: &CatalogImmersion) -> Vec<(usize, f64, usize)> {
    match m.family {
        Family::UmbilicSphere { n, r, .. } => vec![(n, r, 0)],
        Family::SphereProduct { .. } | Family::CliffordMinimal { .. } => {
            let radii = m.factor_radii();
            let (p, r) = radii[0];
            let (q, s) = radii[1];
            vec![(p, r, 0), (q, s, p + 1)]
        }
    }
}

fn check_direction(m: &CatalogImmersion, u: &DVector<f64>) -> Result<()> {
    let dim = m.ambient_dim();
    if u.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} entries, ambient space has {dim}",
            u.len()
        )));
    }
    if (u.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfRange(format!("direction must be a unit vector, |u| = {}", u.norm())));
    }
    Ok(())
}

fn is_degenerate(m: &CatalogImmersion, u: &DVector<f64>) -> bool {
    factors(m)
        .iter()
        .any(|&(dim, _, off)| u.rows(off, dim + 1).norm() < DEGENERATE_TOL)
}

/// On each factor `S^d(r)` the restriction of `h_u` has a minimum at
/// `−r û` (index 0) and a maximum at `+r û` (index `d`), with `û` the unit
/// projection of `u` onto the factor's block; critical points of the product
/// are all combinations.
pub fn critical_points(m: &CatalogImmersion, u: &DVector<f64>) -> Result<CriticalSet> {
    check_direction(m, u)?;
    let degenerate = is_degenerate(m, u);
    let fs = factors(m);
    let mut points = Vec::new();
    if !degenerate {
        for mask in 0..(1usize << fs.len()) {
            let mut position = vec![0.0; m.ambient_dim()];
            let mut index = 0;
            let mut labels = Vec::new();
            for (f, &(dim, radius, off)) in fs.iter().enumerate() {
                let block = u.rows(off, dim + 1);
                let norm = block.norm();
                let top = mask >> f & 1 == 1;
                let sign = if top { 1.0 } else { -1.0 };
                for (j, x) in block.iter().enumerate() {
                    position[off + j] = sign * radius * x / norm;
                }
                if top {
                    index += dim;
                }
                labels.push(if top { "max" } else { "min" });
            }
            points.push(CriticalPoint {
                label: labels.join("×"),
                index,
                position,
            });
        }
    }
    Ok(CriticalSet {
        u: u.iter().copied().collect(),
        points,
        degenerate,
    })
}

/// `μ_0(u), …, μ_n(u)`; all zero on the exceptional set.
pub fn mu_counts(m: &CatalogImmersion, u: &DVector<f64>) -> Result<Vec<u64>> {
    let set = critical_points(m, u)?;
    let mut mu = vec![0; m.n + 1];
    for p in &set.points {
        mu[p.index] += 1;
    }
    Ok(mu)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

/// Uniform direction drawn from its own counter-based stream, resampled off
/// the non-generic set. Returns the direction and the number of redraws.
fn generic_direction(m: &CatalogImmersion, seed: u64, stream: u64) -> (DVector<f64>, u64) {
    let mut rng = sampling::stream(seed, stream);
    let mut redraws = 0;
    loop {
        let u = sampling::unit_vector(&mut rng, m.ambient_dim());
        if !is_degenerate(m, &u) {
            return (u, redraws);
        }
        redraws += 1;
    }
}

fn mean_and_stderr(sum: f64, sum_sq: f64, count: usize) -> (f64, f64) {
    let nf = count as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Monte Carlo means of `μ_i(u)` over uniform `u ∈ S^{n+k−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuStatistics {
    pub samples: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub resampled: u64,
}

pub fn mu_statistics(m: &CatalogImmersion, samples: usize, seed: u64) -> Result<MuStatistics> {
    check_samples(samples)?;
    let n = m.n;
    let draws: Vec<(Vec<u64>, u64)> = (0..samples)
        .into_par_iter()
        .with_min_len(256)
        .map(|s| {
            let (u, redraws) = generic_direction(m, seed, s as u64);
            (mu_counts(m, &u).expect("generated direction is valid"), redraws)
        })
        .collect();
    let mut sum = vec![0.0; n + 1];
    let mut sum_sq = vec![0.0; n + 1];
    let mut resampled = 0;
    for (mu, r) in &draws {
        for i in 0..=n {
            let v = mu[i] as f64;
            sum[i] += v;
            sum_sq[i] += v * v;
        }
        resampled += r;
    }
    let (mean, stderr) = (0..=n).map(|i| mean_and_stderr(sum[i], sum_sq[i], samples)).unzip();
    Ok(MuStatistics {
        samples,
        mean,
        stderr,
        resampled,
    })
}

/// `τ_i(f) = (1/Vol(S^{n+k−1})) ∫ μ_i(u) dS`, i.e. the mean of `μ_i`.
pub fn tau_index(m: &CatalogImmersion, i: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if i > m.n {
        return Err(Error::OutOfRange(format!("index {i} exceeds n = {}", m.n)));
    }
    let st = mu_statistics(m, samples, seed)?;
    Ok((st.mean[i], st.stderr[i]))
}

/// `Vol(M) |det A_ξ|` sampled at uniform `ξ` in one normal sphere, with the
/// index of `A_ξ`. The normal-bundle measure of `UN_f` is `Vol(M) Vol(S^{k−1})`.
struct NormalSamples {
    scale: f64,
    draws: Vec<(usize, f64)>,
}

fn normal_samples(m: &CatalogImmersion, samples: usize, seed: u64) -> NormalSamples {
    let k = m.k;
    let cutoff = DEFAULT_INDEX_TAU * m.alpha.norm();
    let draws = (0..samples)
        .into_par_iter()
        .with_min_len(256)
        .map(|s| {
            let mut rng = sampling::stream(seed, NORMAL_STREAMS + s as u64);
            let xi = sampling::unit_vector(&mut rng, k);
            let (index, det) = spectrum(&m.alpha, &xi, cutoff);
            (index, det.abs())
        })
        .collect();
    NormalSamples {
        scale: m.volume * sphere_volume(k - 1),
        draws,
    }
}

impl NormalSamples {
    /// `∫ |det A_ξ| dΣ` over `ξ` with `index A_ξ` accepted by `keep`.
    fn integral(&self, keep: impl Fn(usize) -> bool) -> (f64, f64) {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for &(index, v) in &self.draws {
            if keep(index) {
                sum += v;
                sum_sq += v * v;
            }
        }
        let (mean, err) = mean_and_stderr(sum, sum_sq, self.draws.len());
        (self.scale * mean, self.scale * err)
    }
}

/// `τ(f) = (1/Vol(S^{n+k−1})) ∫_{UN_f} |det A_ξ| dΣ`.
pub fn tau_total(m: &CatalogImmersion, samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_samples(samples)?;
    let vol = sphere_volume(m.n + m.k - 1);
    let (v, e) = normal_samples(m, samples, seed).integral(|_| true);
    Ok((v / vol, e / vol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalCurvature {
    pub member: String,
    pub samples: usize,
    pub seed: u64,
    /// `τ_0, …, τ_n` from critical-point counts.
    #[serde(with = "crate::hexfloat::vec")]
    pub per_index: Vec<f64>,
    #[serde(with = "crate::hexfloat::vec")]
    pub per_index_stderr: Vec<f64>,
    /// `τ(f)` from the normal bundle.
    #[serde(with = "crate::hexfloat")]
    pub total: f64,
    #[serde(with = "crate::hexfloat")]
    pub total_stderr: f64,
    pub betti: Vec<u64>,
    /// Directions redrawn off the non-generic set.
    pub resampled: u64,
}

impl TotalCurvature {
    pub fn per_index_sum(&self) -> f64 {
        self.per_index.iter().sum()
    }

    /// `|Σ τ_i − τ(f)| ≤ 3 × combined error`.
    pub fn pipelines_agree(&self) -> bool {
        let err: f64 = self.per_index_stderr.iter().map(|e| e * e).sum::<f64>() + self.total_stderr.powi(2);
        (self.per_index_sum() - self.total).abs() <= 3.0 * err.sqrt() + 1e-12 * self.total.abs()
    }

    /// `τ_i + 3 stderr ≥ β_i` for every `i`.
    pub fn morse_inequalities_hold(&self) -> bool {
        self.per_index
            .iter()
            .zip(&self.per_index_stderr)
            .zip(&self.betti)
            .all(|((t, e), &b)| t + 3.0 * e >= b as f64)
    }

    /// `τ(f) + 3 stderr ≥ Σ β_i`.
    pub fn chern_lashof_holds(&self) -> bool {
        self.total + 3.0 * self.total_stderr >= self.betti.iter().sum::<u64>() as f64
    }
}

pub fn total_curvature(m: &CatalogImmersion, samples: usize, seed: u64) -> Result<TotalCurvature> {
    let st = mu_statistics(m, samples, seed)?;
    let (total, total_stderr) = tau_total(m, samples, seed)?;
    Ok(TotalCurvature {
        member: m.name.clone(),
        samples,
        seed,
        per_index: st.mean,
        per_index_stderr: st.stderr,
        total,
        total_stderr,
        betti: m.betti.clone(),
        resampled: st.resampled,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiohamaXu {
    pub index: usize,
    /// `∫_{U^iN_f} |det A_ξ| dΣ`.
    #[serde(with = "crate::hexfloat")]
    pub lhs: f64,
    #[serde(with = "crate::hexfloat")]
    pub lhs_stderr: f64,
    /// `∫ μ_i(u) dS = Vol(S^{n+k−1}) τ_i`.
    #[serde(with = "crate::hexfloat")]
    pub rhs: f64,
    #[serde(with = "crate::hexfloat")]
    pub rhs_stderr: f64,
    /// `|lhs − rhs| / |rhs|`, or 0 when both sides vanish.
    #[serde(with = "crate::hexfloat")]
    pub relative_error: f64,
}

pub fn shiohama_xu_check(m: &CatalogImmersion, i: usize, samples: usize, seed: u64) -> Result<ShiohamaXu> {
    let (tau, tau_err) = tau_index(m, i, samples, seed)?;
    let vol = sphere_volume(m.n + m.k - 1);
    let (lhs, lhs_stderr) = normal_samples(m, samples, seed).integral(|index| index == i);
    let rhs = vol * tau;
    let relative_error = if rhs == 0.0 && lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        (lhs - rhs).abs() / rhs.abs()
    };
    Ok(ShiohamaXu {
        index: i,
        lhs,
        lhs_stderr,
        rhs,
        rhs_stderr: vol * tau_err,
        relative_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerCheck {
    pub directions: usize,
    pub euler_characteristic: i64,
    /// Directions whose alternating `μ`-sum differs from `χ`.
    pub mismatches: usize,
}

/// Alternating sum of `μ_i(u)` against `χ(M)` on sampled generic directions.
pub fn euler_check(m: &CatalogImmersion, directions: usize, seed: u64) -> Result<EulerCheck> {
    let chi = m.euler_characteristic();
    let mismatches = (0..directions as u64)
        .into_par_iter()
        .filter(|&s| {
            let (u, _) = generic_direction(m, seed, EULER_STREAMS + s);
            let mu = mu_counts(m, &u).expect("generated direction is valid");
            let alt: i64 = mu
                .iter()
                .enumerate()
                .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
            alt != chi
        })
        .count();
    Ok(EulerCheck {
        directions,
        euler_characteristic: chi,
        mismatches,
    })
}
