//! Homogeneous immersions with closed-form second fundamental forms.
//!
//! Every member is extrinsically homogeneous, so each curvature integrand is
//! constant and an integral is its pointwise value times the volume.
//!
//! Frames: `e_1, …, e_n` is an orthonormal tangent frame adapted to the
//! factors (first factor first). Normal frames are stated per member; `ξ_1`
//! is always the first normal of the construction.

use serde::{Deserialize, Serialize};

use crate::curvature::{r_of, scal_of, w_of};
use crate::error::{Error, Result};
use crate::estimate::{derive_constants, refine_with_candidates, EstimateRecord, TheoremConstants, Variant};
use crate::forms::{QuadTensor, ScalarForm, VectorForm};
use crate::sphere::sphere_volume;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Round `S^n(r)` in an affine `R^{n+1} ⊂ R^{n+k}`; `ξ_1` is the inward
    /// radial normal, `ξ_2, …, ξ_k` span the complement.
    UmbilicSphere { n: usize, k: usize, r: f64 },
    /// `S^p(r) × S^q(s) ⊂ R^{p+1} × R^{q+1}`; `ξ_1`, `ξ_2` are the inward
    /// radial normals of the two factors.
    SphereProduct { p: usize, q: usize, r: f64, s: f64 },
    /// `S^p(√(p/n)) × S^q(√(q/n)) ⊂ S^{n+1} ⊂ R^{n+2}`; `ξ_1` is the inward
    /// normal of the unit sphere, `ξ_2` the unit normal inside it.
    CliffordMinimal { p: usize, q: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogImmersion {
    pub name: String,
    pub family: Family,
    pub n: usize,
    /// Codimension in Euclidean space.
    pub k: usize,
    /// Betti numbers `β_0, …, β_n` over the two-element field.
    pub betti: Vec<u64>,
    pub volume: f64,
    pub alpha: VectorForm,
}

fn check_radius(name: &str, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::OutOfRange(format!("radius {name} must be positive, got {r}")));
    }
    Ok(())
}

fn sphere_betti(n: usize) -> Vec<u64> {
    let mut b = vec![0; n + 1];
    b[0] += 1;
    b[n] += 1;
    b
}

/// Künneth product over a field.
fn product_betti(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn block_diagonal(p: usize, q: usize, a: f64, b: f64) -> ScalarForm {
    let d: Vec<f64> = (0..p + q).map(|i| if i < p { a } else { b }).collect();
    ScalarForm::diagonal(&d)
}

pub fn make_umbilic_sphere(n: usize, k: usize, r: f64) -> Result<CatalogImmersion> {
    check_radius("r", r)?;
    if k < 1 || n < 2 {
        return Err(Error::OutOfRange(format!("need n >= 2 and k >= 1, got n={n}, k={k}")));
    }
    let alpha = VectorForm::single(&ScalarForm::identity(n).scale(1.0 / r), k, 0)?;
    Ok(CatalogImmersion {
        name: format!("umbilic-sphere(n={n},k={k},r={r})"),
        family: Family::UmbilicSphere { n, k, r },
        n,
        k,
        betti: sphere_betti(n),
        volume: sphere_volume(n) * r.powi(n as i32),
        alpha,
    })
}

pub fn make_sphere_product(p: usize, q: usize, r: f64, s: f64) -> Result<CatalogImmersion> {
    if p < 2 || q < 2 {
        return Err(Error::OutOfRange(format!("factors need dimension >= 2, got p={p}, q={q}")));
    }
    check_radius("r", r)?;
    check_radius("s", s)?;
    let alpha = VectorForm::new(vec![
        block_diagonal(p, q, 1.0 / r, 0.0),
        block_diagonal(p, q, 0.0, 1.0 / s),
    ])?;
    Ok(CatalogImmersion {
        name: format!("sphere-product(p={p},q={q},r={r},s={s})"),
        family: Family::SphereProduct { p, q, r, s },
        n: p + q,
        k: 2,
        betti: product_betti(&sphere_betti(p), &sphere_betti(q)),
        volume: sphere_volume(p) * r.powi(p as i32) * sphere_volume(q) * s.powi(q as i32),
        alpha,
    })
}

/// The minimal product in the unit sphere, viewed in `R^{n+2}`. With
/// `ν_1, ν_2` the inward radial normals of the factors and radii `r, s`
/// (`r² + s² = 1`), the frame is `ξ_1 = r ν_1 + s ν_2`, `ξ_2 = s ν_1 − r ν_2`.
pub fn make_clifford_minimal(p: usize, q: usize) -> Result<CatalogImmersion> {
    if p < 2 || q < 2 {
        return Err(Error::OutOfRange(format!("factors need dimension >= 2, got p={p}, q={q}")));
    }
    let n = p + q;
    let (pf, qf, nf) = (p as f64, q as f64, n as f64);
    let (r, s) = ((pf / nf).sqrt(), (qf / nf).sqrt());
    let alpha = VectorForm::new(vec![
        ScalarForm::identity(n),
        block_diagonal(p, q, s / r, -r / s),
    ])?;
    Ok(CatalogImmersion {
        name: format!("clifford-minimal(p={p},q={q})"),
        family: Family::CliffordMinimal { p, q },
        n,
        k: 2,
        betti: product_betti(&sphere_betti(p), &sphere_betti(q)),
        volume: sphere_volume(p) * r.powi(p as i32) * sphere_volume(q) * s.powi(q as i32),
        alpha,
    })
}

/// `K (δ_ik δ_jl − δ_il δ_jk)` on the index block `lo..hi`.
fn space_form_block(t: &mut [f64], n: usize, lo: usize, hi: usize, curvature: f64) {
    let at = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    for i in lo..hi {
        for j in lo..hi {
            if i != j {
                t[at(i, j, i, j)] += curvature;
                t[at(i, j, j, i)] -= curvature;
            }
        }
    }
}

impl CatalogImmersion {
    pub fn ambient_dim(&self) -> usize {
        self.n + self.k
    }

    /// Radii of the round factors.
    pub fn factor_radii(&self) -> Vec<(usize, f64)> {
        match self.family {
            Family::UmbilicSphere { n, r, .. } => vec![(n, r)],
            Family::SphereProduct { p, q, r, s } => vec![(p, r), (q, s)],
            Family::CliffordMinimal { p, q } => {
                let n = (p + q) as f64;
                vec![(p, (p as f64 / n).sqrt()), (q, (q as f64 / n).sqrt())]
            }
        }
    }

    /// Intrinsic curvature tensor of the round metric (or product of round
    /// metrics), coded independently of the second fundamental form.
    pub fn known_curvature(&self) -> QuadTensor {
        let n = self.n;
        let mut entries = vec![0.0; n * n * n * n];
        let mut lo = 0;
        for (dim, radius) in self.factor_radii() {
            space_form_block(&mut entries, n, lo, lo + dim, 1.0 / (radius * radius));
            lo += dim;
        }
        QuadTensor::from_fn(n, |i, j, k, l| entries[((i * n + j) * n + k) * n + l])
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    /// `S = ‖α‖²`.
    pub fn squared_norm(&self) -> f64 {
        self.alpha.norm_sq()
    }

    /// `H = |tr α| / n`.
    pub fn mean_curvature(&self) -> f64 {
        self.alpha.trace().norm() / self.n as f64
    }

    pub fn scal(&self) -> f64 {
        scal_of(&self.alpha)
    }

    /// `‖R − scal/(n(n−1)) R_1‖` with `R_1 = ½ ⟨,⟩∧⟨,⟩`.
    pub fn curvature_deviation(&self) -> f64 {
        let n = self.n;
        let c = self.scal() / (n as f64 * (n as f64 - 1.0));
        let r = r_of(&self.alpha);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = r.get(i, j, k, l);
                        if i == k && j == l {
                            v -= c;
                        }
                        if i == l && j == k {
                            v += c;
                        }
                        total += v * v;
                    }
                }
            }
        }
        total.sqrt()
    }

    pub fn weyl_norm(&self) -> Result<f64> {
        Ok(w_of(&self.alpha)?.norm())
    }

    /// `S − δ n² H²`.
    pub fn pinching_excess(&self, delta: f64) -> f64 {
        self.squared_norm() - delta * self.alpha.trace().norm_squared()
    }

    /// The part of `α` along the sphere normal `ξ_2` for the minimal member.
    pub fn sphere_part(&self) -> Option<ScalarForm> {
        match self.family {
            Family::CliffordMinimal { .. } => Some(self.alpha.component_form(1)),
            _ => None,
        }
    }

    /// `S` of the immersion into the unit sphere (minimal member only).
    pub fn sphere_squared_norm(&self) -> Option<f64> {
        self.sphere_part().map(|f| f.norm_sq())
    }

    /// Smallest `δ` with `S_sphere ≤ n(δn − 1)`.
    pub fn minimal_delta_threshold(&self) -> Option<f64> {
        let nf = self.n as f64;
        self.sphere_squared_norm().map(|s| (s / nf + 1.0) / nf)
    }

    fn band_betti(&self, lo: usize, hi: usize) -> u64 {
        if lo > hi {
            return 0;
        }
        self.betti[lo..=hi.min(self.n)].iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Theorem1,
    Theorem5,
    CorollaryMinimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    Holds,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub member: String,
    pub check: Check,
    pub n: usize,
    pub k: usize,
    #[serde(with = "crate::hexfloat")]
    pub delta: f64,
    /// `∫ ‖R − scal/(n(n−1)) R_1‖^{n/2}` or `∫ ‖W‖^{n/2}`.
    #[serde(with = "crate::hexfloat")]
    pub curvature_norm_integral: f64,
    /// `∫ (S − δn²H²)₊^{n/2}`; zero for the single-term corollary.
    #[serde(with = "crate::hexfloat")]
    pub pinch_integral: f64,
    #[serde(with = "crate::hexfloat")]
    pub lhs_total: f64,
    #[serde(with = "crate::hexfloat")]
    pub constant: f64,
    pub betti_sum: u64,
    #[serde(with = "crate::hexfloat")]
    pub rhs_total: f64,
    pub satisfied: bool,
    /// `lhs_total − rhs_total`.
    #[serde(with = "crate::hexfloat")]
    pub margin: f64,
    /// Whether the non-positive scalar curvature branch applies; it applies
    /// to no catalog member.
    pub nonpositive_scal_branch: bool,
    pub hypothesis: Hypothesis,
    /// `α`, offered to the estimator when the check fails.
    pub candidate: Option<VectorForm>,
}

/// Relative slack for comparisons that involve quadrature.
pub const REPORT_TOLERANCE: f64 = 1e-6;

fn check_constants(m: &CatalogImmersion, delta: f64, constants: &TheoremConstants) -> Result<()> {
    let nf = m.n as f64;
    if !(delta > 1.0 / nf && delta < 1.0) {
        return Err(Error::OutOfRange(format!("delta must lie in (1/n, 1), got {delta}")));
    }
    if constants.n != m.n || constants.delta != delta {
        return Err(Error::Inadmissible(format!(
            "constants are for (n, delta) = ({}, {}), need ({}, {delta})",
            constants.n, constants.delta, m.n
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    m: &CatalogImmersion,
    check: Check,
    delta: f64,
    curvature_norm_integral: f64,
    pinch_integral: f64,
    constant: f64,
    betti_sum: u64,
    nonpositive_scal_branch: bool,
    hypothesis: Hypothesis,
) -> InequalityReport {
    let lhs_total = curvature_norm_integral + pinch_integral;
    let rhs_total = constant * betti_sum as f64;
    let slack = REPORT_TOLERANCE * lhs_total.max(rhs_total);
    let satisfied = lhs_total >= rhs_total - slack;
    InequalityReport {
        member: m.name.clone(),
        check,
        n: m.n,
        k: m.k,
        delta,
        curvature_norm_integral,
        pinch_integral,
        lhs_total,
        constant,
        betti_sum,
        rhs_total,
        satisfied,
        margin: lhs_total - rhs_total,
        nonpositive_scal_branch,
        hypothesis,
        candidate: (!satisfied).then(|| m.alpha.clone()),
    }
}

/// `∫ ‖R − scal/(n(n−1)) R_1‖^{n/2} + ∫ (S − δn²H²)₊^{n/2} ≥ c Σ_{i=k}^{n−k} β_i`,
/// or the full Betti sum when `scal ≤ 0`; there `S ≥ n²H²`, so the positive
/// part changes nothing.
pub fn evaluate_theorem1(m: &CatalogImmersion, delta: f64, constants: &TheoremConstants) -> Result<InequalityReport> {
    m.alpha.dims().check_closed_band()?;
    check_constants(m, delta, constants)?;
    let c = constants
        .c_hat
        .ok_or_else(|| Error::Coverage(format!("no pinch constant for n = {}", m.n)))?;
    let half = m.n as f64 / 2.0;
    let curv = m.curvature_deviation().powf(half) * m.volume;
    let nonpositive = m.scal() <= 0.0;
    let excess = m.pinching_excess(delta);
    let pinch = excess.max(0.0).powf(half) * m.volume;
    let betti = if nonpositive {
        m.band_betti(0, m.n)
    } else {
        m.band_betti(m.k, m.n - m.k)
    };
    Ok(finish(m, Check::Theorem1, delta, curv, pinch, c, betti, nonpositive, Hypothesis::Holds))
}

/// `∫ ‖W‖^{n/2} + ∫ (S − δn²H²)₊^{n/2} ≥ c₁ Σ_{i=k+1}^{n−k−1} β_i`.
pub fn evaluate_theorem5(m: &CatalogImmersion, delta: f64, constants: &TheoremConstants) -> Result<InequalityReport> {
    m.alpha.dims().check_open_band()?;
    check_constants(m, delta, constants)?;
    let c = constants
        .c1_hat
        .ok_or_else(|| Error::Coverage(format!("no Weyl constant for n = {}", m.n)))?;
    let half = m.n as f64 / 2.0;
    let curv = m.weyl_norm()?.powf(half) * m.volume;
    let pinch = m.pinching_excess(delta).max(0.0).powf(half) * m.volume;
    let betti = m.band_betti(m.k + 1, m.n - m.k - 1);
    Ok(finish(m, Check::Theorem5, delta, curv, pinch, c, betti, false, Hypothesis::Holds))
}

/// Single-term inequality for minimal immersions in the sphere with
/// `S_sphere ≤ n(δn − 1)`. A failed hypothesis is reported, not raised.
pub fn evaluate_corollary_minimal(
    m: &CatalogImmersion,
    delta: f64,
    constants: &TheoremConstants,
) -> Result<InequalityReport> {
    let Some(s_sphere) = m.sphere_squared_norm() else {
        return Err(Error::Unsupported(format!("{} is not a minimal member", m.name)));
    };
    m.alpha.dims().check_closed_band()?;
    check_constants(m, delta, constants)?;
    let c = constants
        .c_hat
        .ok_or_else(|| Error::Coverage(format!("no pinch constant for n = {}", m.n)))?;
    let nf = m.n as f64;
    let hypothesis = if s_sphere <= nf * (delta * nf - 1.0) * (1.0 + 1e-12) {
        Hypothesis::Holds
    } else {
        Hypothesis::Violated
    };
    let curv = m.curvature_deviation().powf(nf / 2.0) * m.volume;
    let betti = m.band_betti(m.k, m.n - m.k);
    Ok(finish(m, Check::CorollaryMinimal, delta, curv, 0.0, c, betti, false, hypothesis))
}

/// Every check that applies to `m` with the constants available.
pub fn evaluate_all(m: &CatalogImmersion, delta: f64, constants: &TheoremConstants) -> Result<Vec<InequalityReport>> {
    let dims = m.alpha.dims();
    let mut out = Vec::new();
    if dims.check_closed_band().is_ok() && constants.c_hat.is_some() {
        out.push(evaluate_theorem1(m, delta, constants)?);
    }
    if dims.check_open_band().is_ok() && constants.c1_hat.is_some() {
        out.push(evaluate_theorem5(m, delta, constants)?);
    }
    if matches!(m.family, Family::CliffordMinimal { .. }) && constants.c_hat.is_some() {
        out.push(evaluate_corollary_minimal(m, delta, constants)?);
    }
    Ok(out)
}

/// Outcome of [`check_with_refinement`].
#[derive(Clone, Debug)]
pub struct RefinedChecks {
    pub reports: Vec<InequalityReport>,
    pub constants: TheoremConstants,
    /// Indices into the record slice whose estimate was lowered.
    pub refined: Vec<usize>,
    pub rounds: usize,
}

/// Derives constants from `records`, evaluates every applicable check, and
/// while a check fails feeds `α` to the matching `(n, k, δ)` records and
/// rederives. Stops when all checks hold, nothing improves, or after
/// `max_rounds` refinements.
pub fn check_with_refinement(
    m: &CatalogImmersion,
    delta: f64,
    records: &mut [EstimateRecord],
    max_rounds: usize,
) -> Result<RefinedChecks> {
    let mut constants = derive_constants(m.n, delta, records)?;
    let mut reports = evaluate_all(m, delta, &constants)?;
    let mut refined = Vec::new();
    let mut rounds = 0;
    while rounds < max_rounds {
        let failed: Vec<&InequalityReport> = reports.iter().filter(|r| !r.satisfied).collect();
        if failed.is_empty() {
            break;
        }
        let mut improved = false;
        for (i, rec) in records.iter_mut().enumerate() {
            if rec.n != m.n || rec.k != m.k || rec.lambda != delta {
                continue;
            }
            let candidates: Vec<VectorForm> = failed
                .iter()
                .filter(|f| match f.check {
                    Check::Theorem1 | Check::CorollaryMinimal => rec.variant == Variant::Pinch,
                    Check::Theorem5 => rec.variant == Variant::Weyl,
                })
                .filter_map(|f| f.candidate.clone())
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let better = refine_with_candidates(rec, &candidates)?;
            if better.epsilon_hat < rec.epsilon_hat {
                *rec = better;
                improved = true;
                if !refined.contains(&i) {
                    refined.push(i);
                }
            }
        }
        if !improved {
            break;
        }
        rounds += 1;
        constants = derive_constants(m.n, delta, records)?;
        reports = evaluate_all(m, delta, &constants)?;
    }
    Ok(RefinedChecks {
        reports,
        constants,
        refined,
        rounds,
    })
}

/// Homothety `M ↦ cM`: radii scale by `c`.
pub fn scaled(m: &CatalogImmersion, c: f64) -> Result<CatalogImmersion> {
    match m.family {
        Family::UmbilicSphere { n, k, r } => make_umbilic_sphere(n, k, c * r),
        Family::SphereProduct { p, q, r, s } => make_sphere_product(p, q, c * r, c * s),
        Family::CliffordMinimal { .. } => Err(Error::Unsupported(
            "the minimal member is pinned to the unit sphere".into(),
        )),
    }
}

/// Every supported member with small parameters, for listing.
pub fn standard_members() -> Vec<CatalogImmersion> {
    let mut out = Vec::new();
    for n in 4..=8 {
        out.push(make_umbilic_sphere(n, 2, 1.0).expect("valid"));
    }
    for (p, q) in [(2, 2), (2, 3), (3, 3), (2, 4)] {
        out.push(make_sphere_product(p, q, 1.0, 1.0).expect("valid"));
        out.push(make_clifford_minimal(p, q).expect("valid"));
    }
    out
}
