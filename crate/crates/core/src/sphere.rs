//! Shape operators `β♯(u)`, index bands on the unit sphere of `W`, and the
//! integral `ψ(β) = ∫ |det β♯(u)| dS_u` over a band.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::scal_of;
use crate::error::{Error, Result};
use crate::forms::{ScalarForm, VectorForm};
use crate::sampling;

/// Eigenvalues in `(−τ‖β‖, τ‖β‖)` count as non-negative.
pub const DEFAULT_INDEX_TAU: f64 = 1e-9;

/// Surface measure of the unit sphere `S^m ⊂ R^{m+1}`, by the recurrence
/// `Vol(S^m) = 2π/(m−1) · Vol(S^{m−2})`.
pub fn sphere_volume(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_volume(m - 2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// `k ≤ Index ≤ n−k`.
    PhiBand,
    /// `k < Index < n−k`.
    OmegaBand,
    FullSphere,
    /// `PhiBand` when `scal(β) > 0`, otherwise `FullSphere`.
    LambdaAuto,
}

impl RegionKind {
    /// Replaces `LambdaAuto` by the concrete region for `β`.
    pub fn resolve(self, beta: &VectorForm) -> RegionKind {
        match self {
            RegionKind::LambdaAuto if scal_of(beta) > 0.0 => RegionKind::PhiBand,
            RegionKind::LambdaAuto => RegionKind::FullSphere,
            other => other,
        }
    }

    fn contains_index(self, index: usize, n: usize, k: usize) -> bool {
        match self {
            RegionKind::PhiBand => k <= index && index + k <= n,
            RegionKind::OmegaBand => k < index && index + k < n,
            RegionKind::FullSphere => true,
            RegionKind::LambdaAuto => unreachable!("resolve before testing membership"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    /// Composite midpoint rule on `[0, 2π)`; `k = 2` only.
    CircleComposite,
    /// Uniform Monte Carlo on `S^{k−1}` with normalized Gaussians.
    SphereMonteCarlo,
}

impl fmt::Display for QuadMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadMethod::CircleComposite => "circle-composite",
            QuadMethod::SphereMonteCarlo => "sphere-montecarlo",
        })
    }
}

impl FromStr for QuadMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle-composite" => Ok(QuadMethod::CircleComposite),
            "sphere-montecarlo" => Ok(QuadMethod::SphereMonteCarlo),
            other => Err(Error::InvalidQuadrature(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub nodes: usize,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn circle(nodes: usize) -> Self {
        QuadratureSpec {
            method: QuadMethod::CircleComposite,
            nodes,
            seed: 0,
        }
    }

    pub fn monte_carlo(nodes: usize, seed: u64) -> Self {
        QuadratureSpec {
            method: QuadMethod::SphereMonteCarlo,
            nodes,
            seed,
        }
    }

    /// Circle rule for `k = 2`, Monte Carlo otherwise.
    pub fn default_for(k: usize, nodes: usize, seed: u64) -> Self {
        if k == 2 {
            QuadratureSpec::circle(nodes)
        } else {
            QuadratureSpec::monte_carlo(nodes, seed)
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidQuadrature(format!(
                "need at least 16 nodes, got {}",
                self.nodes
            )));
        }
        if self.method == QuadMethod::CircleComposite && k != 2 {
            return Err(Error::InvalidQuadrature(format!(
                "circle-composite needs k = 2, got k = {k}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidQuadrature("target dimension is zero".into()));
        }
        Ok(())
    }
}

/// Pre-generated quadrature nodes with their weights. The estimate is
/// `Σ w_j f(u_j)`; the error estimate depends on the method.
#[derive(Clone, Debug)]
pub struct NodeSet {
    spec: QuadratureSpec,
    k: usize,
    points: Vec<DVector<f64>>,
    weight: f64,
}

impl NodeSet {
    pub fn new(spec: QuadratureSpec, k: usize) -> Result<Self> {
        spec.validate(k)?;
        let points: Vec<DVector<f64>> = match spec.method {
            QuadMethod::CircleComposite => (0..spec.nodes)
                .map(|j| {
                    let theta = (j as f64 + 0.5) * 2.0 * PI / spec.nodes as f64;
                    DVector::from_vec(vec![theta.cos(), theta.sin()])
                })
                .collect(),
            QuadMethod::SphereMonteCarlo => {
                let mut rng = sampling::stream(spec.seed, 0);
                (0..spec.nodes)
                    .map(|_| sampling::unit_vector(&mut rng, k))
                    .collect()
            }
        };
        let weight = sphere_volume(k - 1) / spec.nodes as f64;
        Ok(NodeSet {
            spec,
            k,
            points,
            weight,
        })
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.spec
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// Reduces per-node integrand values (in node order) to a value and an
    /// error estimate.
    fn reduce(&self, values: &[f64]) -> QuadValue {
        let total: f64 = values.iter().sum();
        let value = total * self.weight;
        let error = match self.spec.method {
            QuadMethod::CircleComposite => {
                // halves of the grid, each a midpoint rule with double spacing
                let even: f64 = values.iter().step_by(2).sum();
                let odd: f64 = values.iter().skip(1).step_by(2).sum();
                (even - odd).abs() * self.weight
            }
            QuadMethod::SphereMonteCarlo => {
                let m = values.len() as f64;
                let mean = total / m;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
                sphere_volume(self.k - 1) * (var / m).sqrt()
            }
        };
        QuadValue { value, error }
    }
}

/// A quadrature result with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    #[serde(with = "crate::hexfloat")]
    pub value: f64,
    #[serde(with = "crate::hexfloat")]
    pub error: f64,
}

/// `β♯(u) = Σ_a u_a B_a`, i.e. `⟨β♯(u) x, y⟩ = ⟨β(x, y), u⟩`.
pub fn shape_operator(beta: &VectorForm, u: &DVector<f64>) -> Result<ScalarForm> {
    if u.len() != beta.k() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} entries, form has k = {}",
            u.len(),
            beta.k()
        )));
    }
    Ok(ScalarForm::symmetrized(&shape_matrix(beta, u)).expect("square"))
}

fn shape_matrix(beta: &VectorForm, u: &DVector<f64>) -> DMatrix<f64> {
    let n = beta.n();
    let mut m = DMatrix::zeros(n, n);
    for (c, &w) in beta.components().iter().zip(u.iter()) {
        if w != 0.0 {
            m += c * w;
        }
    }
    m
}

/// Index and determinant of `β♯(u)` from one eigenvalue pass.
pub(crate) fn spectrum(beta: &VectorForm, u: &DVector<f64>, cutoff: f64) -> (usize, f64) {
    let ev = shape_matrix(beta, u).symmetric_eigenvalues();
    let index = ev.iter().filter(|&&v| v < -cutoff).count();
    let det = ev.iter().product();
    (index, det)
}

/// Number of eigenvalues of `β♯(u)` below `−τ‖β‖`.
pub fn index_of(beta: &VectorForm, u: &DVector<f64>, tau: f64) -> Result<usize> {
    shape_operator(beta, u)?;
    Ok(spectrum(beta, u, tau * beta.norm()).0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexProfile {
    pub u: DVector<f64>,
    pub index: usize,
    pub detvalue: f64,
    /// Regions containing `u`; `LambdaAuto` is listed when its resolution does.
    pub membership: Vec<RegionKind>,
}

impl IndexProfile {
    pub fn is_in(&self, region: RegionKind) -> bool {
        self.membership.contains(&region)
    }
}

pub fn classify(beta: &VectorForm, u: &DVector<f64>, tau: f64) -> Result<IndexProfile> {
    shape_operator(beta, u)?;
    let (n, k) = (beta.n(), beta.k());
    let (index, detvalue) = spectrum(beta, u, tau * beta.norm());
    let mut membership: Vec<RegionKind> = [
        RegionKind::PhiBand,
        RegionKind::OmegaBand,
        RegionKind::FullSphere,
    ]
    .into_iter()
    .filter(|r| r.contains_index(index, n, k))
    .collect();
    if membership.contains(&RegionKind::LambdaAuto.resolve(beta)) {
        membership.push(RegionKind::LambdaAuto);
    }
    Ok(IndexProfile {
        u: u.clone(),
        index,
        detvalue,
        membership,
    })
}

/// `∫_region |det β♯(u)| dS_u` on pre-generated nodes.
pub fn psi_on_nodes(beta: &VectorForm, region: RegionKind, nodes: &NodeSet) -> Result<QuadValue> {
    if nodes.k() != beta.k() {
        return Err(Error::DimensionMismatch(format!(
            "nodes are for k = {}, form has k = {}",
            nodes.k(),
            beta.k()
        )));
    }
    let region = region.resolve(beta);
    let (n, k) = (beta.n(), beta.k());
    let cutoff = DEFAULT_INDEX_TAU * beta.norm();
    let values: Vec<f64> = nodes
        .points
        .par_iter()
        .with_min_len(64)
        .map(|u| {
            let (index, det) = spectrum(beta, u, cutoff);
            if region.contains_index(index, n, k) {
                det.abs()
            } else {
                0.0
            }
        })
        .collect();
    Ok(nodes.reduce(&values))
}

/// `ψ(β)` over `region`, deterministic for a fixed spec.
pub fn psi_integral(beta: &VectorForm, region: RegionKind, q: &QuadratureSpec) -> Result<QuadValue> {
    let nodes = NodeSet::new(*q, beta.k())?;
    psi_on_nodes(beta, region, &nodes)
}

/// `|ψ(cβ) − cⁿψ(β)| / max(ψ(β), ε)` on the same nodes.
pub fn psi_homogeneity_check(
    beta: &VectorForm,
    c: f64,
    region: RegionKind,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::OutOfRange(format!("scale must be positive, got {c}")));
    }
    let nodes = NodeSet::new(*q, beta.k())?;
    let base = psi_on_nodes(beta, region, &nodes)?.value;
    let scaled = psi_on_nodes(&beta.scale(c), region, &nodes)?.value;
    let expected = c.powi(beta.n() as i32) * base;
    Ok((scaled - expected).abs() / base.max(f64::EPSILON))
}
