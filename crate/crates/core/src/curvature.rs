//! Curvature-type maps on `Sym(V×V, W)`.
//!
//! For a form `β` these are the algebraic curvature tensor `R(β) = ½ β∧β`,
//! its Ricci and scalar contractions, the Schouten form `L(β)`, the Weyl part
//! `W(β) = R(β) − L(β)∧⟨,⟩`, and the two pinching functionals built from them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::{kn_scalar, singular_subspace_below, stacked, KnSquare, QuadTensor, ScalarForm, Subspace, VectorForm};
use crate::sampling;

/// `R(β) = ½ β∧β`.
pub fn r_of(beta: &VectorForm) -> QuadTensor {
    beta.kn_square().scale(0.5)
}

/// `Ric(β)(x, y) = Σ_i R(β)(e_i, x, e_i, y)`, which works out to
/// `Σ_a (tr B_a) B_a − B_a²` on the component matrices.
pub fn ric_of(beta: &VectorForm) -> ScalarForm {
    let n = beta.n();
    let mut ric = DMatrix::zeros(n, n);
    for c in beta.components() {
        ric += c * c.trace() - c * c;
    }
    ScalarForm::symmetrized(&ric).expect("square by construction")
}

/// `scal(β) = tr Ric(β) = |tr β|² − ‖β‖²`.
pub fn scal_of(beta: &VectorForm) -> f64 {
    beta.components()
        .iter()
        .map(|c| {
            let t = c.trace();
            t * t - c.norm_squared()
        })
        .sum()
}

/// Schouten form `L(β) = (Ric − scal/(2(n−1)) ⟨,⟩) / (n−2)`.
pub fn l_of(beta: &VectorForm) -> Result<ScalarForm> {
    let n = beta.n();
    if n < 3 {
        return Err(Error::Inadmissible(format!("Schouten form needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let ric = ric_of(beta);
    let shift = scal_of(beta) / (2.0 * (nf - 1.0));
    let mut m = ric.into_matrix();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    Ok(ScalarForm::symmetrized(&(m / (nf - 2.0))).expect("square by construction"))
}

/// Weyl part `W(β) = R(β) − L(β)∧⟨,⟩`.
pub fn w_of(beta: &VectorForm) -> Result<QuadTensor> {
    let n = beta.n();
    if n < 4 {
        return Err(Error::Inadmissible(format!("Weyl tensor needs n >= 4, got {n}")));
    }
    let l = l_of(beta)?;
    let lg = kn_scalar(&l, &ScalarForm::identity(n))?;
    r_of(beta).sub(&lg)
}

fn check_lambda_open(lambda: f64, lo: f64) -> Result<()> {
    if !(lambda > lo && lambda < 1.0) {
        return Err(Error::OutOfRange(format!(
            "lambda must lie in ({lo}, 1), got {lambda}"
        )));
    }
    Ok(())
}

/// `(‖β‖² − λ |tr β|²)₊`.
pub fn pinch_deficit(beta: &VectorForm, lambda: f64) -> Result<f64> {
    check_lambda_open(lambda, 0.0)?;
    Ok(deficit_unchecked(beta, lambda))
}

fn deficit_unchecked(beta: &VectorForm, lambda: f64) -> f64 {
    let t = beta.trace();
    (beta.norm_sq() - lambda * t.norm_squared()).max(0.0)
}

/// `¼ ‖β∧β − scal(β)/(n(n−1)) ⟨,⟩∧⟨,⟩‖² + (‖β‖² − λ|tr β|²)₊²`.
pub fn phi_pinch(beta: &VectorForm, lambda: f64) -> Result<f64> {
    let n = beta.n() as f64;
    check_lambda_open(lambda, 1.0 / n)?;
    Ok(phi_pinch_unchecked(beta, lambda))
}

pub(crate) fn phi_pinch_unchecked(beta: &VectorForm, lambda: f64) -> f64 {
    let n = beta.n();
    let nf = n as f64;
    let c = scal_of(beta) / (nf * (nf - 1.0));
    // β∧β − c g∧g, with (g∧g)(i,j,k,l) = 2(δ_ik δ_jl − δ_il δ_jk)
    let sq = beta.kn_square();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = sq.get(i, j, k, l);
                    if i == k && j == l {
                        v -= 2.0 * c;
                    }
                    if i == l && j == k {
                        v += 2.0 * c;
                    }
                    total += v * v;
                }
            }
        }
    }
    let d = deficit_unchecked(beta, lambda);
    0.25 * total + d * d
}

/// `‖W(β)‖² + (‖β‖² − λ|tr β|²)₊²`.
pub fn phi_weyl(beta: &VectorForm, lambda: f64) -> Result<f64> {
    let n = beta.n() as f64;
    check_lambda_open(lambda, 1.0 / n)?;
    let w = w_of(beta)?;
    let d = deficit_unchecked(beta, lambda);
    Ok(w.norm_sq() + d * d)
}

/// Outcome of a decomposition search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionStatus {
    Recovered,
    /// `scal(β)/(n(n−1))` is not positive beyond tolerance.
    NonPositiveMu,
    /// No candidate produced a subspace of the required dimension.
    DimensionTooSmall,
    /// A subspace was found but the form is not umbilic on it within tolerance.
    ResidualTooLarge,
}

/// `β(x, y) = √μ ⟨x, y⟩ ξ` for all `x ∈ V₁`, `y ∈ V`.
#[derive(Clone, Debug)]
pub struct UmbilicDecomposition {
    pub xi: DVector<f64>,
    pub mu: f64,
    pub v1: Subspace,
    pub residual: f64,
    pub status: DecompositionStatus,
}

/// `β(x, y) = ⟨x, y⟩ ξ` for all `x ∈ V₁`, `y ∈ V`.
#[derive(Clone, Debug)]
pub struct ConformalDecomposition {
    pub xi: DVector<f64>,
    pub v1: Subspace,
    pub residual: f64,
    pub status: DecompositionStatus,
}

const RESIDUAL_PROBES: usize = 50;
const REFINE_STEPS: usize = 8;
const SEARCH_SEED: u64 = 0x5eed_dec0;

/// `Σ_a (B_a − η_a I)²`; on a subspace where `β = ⟨,⟩η` this has the
/// eigenvalue 0.
fn gap_operator(beta: &VectorForm, eta: &DVector<f64>) -> DMatrix<f64> {
    let n = beta.n();
    let mut g = DMatrix::zeros(n, n);
    for (c, &e) in beta.components().iter().zip(eta.iter()) {
        let mut s = c.clone();
        for i in 0..n {
            s[(i, i)] -= e;
        }
        g += &s * &s;
    }
    g
}

/// Ascending eigen-pairs of a symmetric matrix.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (vals, vecs)
}

fn score(beta: &VectorForm, eta: &DVector<f64>, target_dim: usize) -> f64 {
    let vals = gap_operator(beta, eta).symmetric_eigenvalues();
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.iter().take(target_dim).map(|x| x.max(0.0)).sum()
}

/// Given `η`, take `V₁` as the bottom eigenspace of the gap operator and
/// return the average of `β(x, x)` over an orthonormal basis of `V₁`.
fn refine(beta: &VectorForm, eta: &DVector<f64>, target_dim: usize) -> DVector<f64> {
    let (_, vecs) = sorted_eigen(gap_operator(beta, eta));
    let mut avg = DVector::zeros(beta.k());
    for c in 0..target_dim {
        let x = vecs.column(c).into_owned();
        avg += beta.eval(&x, &x);
    }
    avg / target_dim as f64
}

fn residual(beta: &VectorForm, eta: &DVector<f64>, v1: &Subspace) -> f64 {
    let mut rng = sampling::stream(SEARCH_SEED, 1);
    let probes: Vec<DVector<f64>> = (0..RESIDUAL_PROBES)
        .map(|_| sampling::unit_vector(&mut rng, beta.n()))
        .collect();
    let shifted = beta.shifted(eta);
    let mut worst = 0.0f64;
    for x in v1.basis() {
        for y in &probes {
            worst = worst.max(shifted.eval(x, y).norm());
        }
    }
    worst
}

struct Search {
    eta: DVector<f64>,
    v1: Subspace,
    residual: f64,
}

/// Shared search: score candidate `η`s, polish the best few by alternating
/// subspace / value updates, and read off `V₁` as the nullity of `β − ⟨,⟩η`.
fn search(
    beta: &VectorForm,
    candidates: Vec<DVector<f64>>,
    target_dim: usize,
    tol: f64,
    normalize: &dyn Fn(DVector<f64>) -> DVector<f64>,
) -> Search {
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (score(beta, c, target_dim), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let scale = beta.norm().max(f64::MIN_POSITIVE);
    let mut best: Option<Search> = None;
    for &(_, idx) in scored.iter().take(4) {
        let mut eta = candidates[idx].clone();
        for _ in 0..REFINE_STEPS {
            eta = normalize(refine(beta, &eta, target_dim));
        }
        // measured against ‖β‖: the shifted form may be pure rounding noise
        let v1 = singular_subspace_below(&stacked(&beta.shifted(&eta)), tol * scale, tol);
        let res = residual(beta, &eta, &v1);
        let better = match &best {
            None => true,
            Some(b) => v1.dim() > b.v1.dim() || (v1.dim() == b.v1.dim() && res < b.residual),
        };
        if better {
            best = Some(Search {
                eta,
                v1,
                residual: res,
            });
        }
    }
    best.expect("at least one candidate")
}

fn base_candidates(beta: &VectorForm) -> Vec<DVector<f64>> {
    let n = beta.n();
    let mut out: Vec<DVector<f64>> = (0..n).map(|i| beta.value(i, i)).collect();
    out.push(beta.trace() / n as f64);
    out
}

/// Recovers `(ξ, μ, V₁)` for a form with `β∧β = μ ⟨,⟩∧⟨,⟩`, `μ > 0`.
///
/// `μ` is read off as `scal(β)/(n(n−1))`. Failure is reported through
/// `status`, never raised.
pub fn decompose_umbilic(beta: &VectorForm, tol: f64) -> UmbilicDecomposition {
    let n = beta.n();
    let k = beta.k();
    let nf = n as f64;
    let mu = scal_of(beta) / (nf * (nf - 1.0));
    let scale = beta.norm_sq().max(f64::MIN_POSITIVE);
    if !(mu > tol * scale) {
        return UmbilicDecomposition {
            xi: DVector::zeros(k),
            mu,
            v1: Subspace::new(n, Vec::new(), tol),
            residual: f64::INFINITY,
            status: DecompositionStatus::NonPositiveMu,
        };
    }
    let root = mu.sqrt();
    let onto_sphere = move |v: DVector<f64>| {
        let norm = v.norm();
        if norm > 0.0 {
            v * (root / norm)
        } else {
            let mut e = DVector::zeros(v.len());
            e[0] = root;
            e
        }
    };

    let mut rng = sampling::stream(SEARCH_SEED, 0);
    let mut candidates: Vec<DVector<f64>> = (0..2000 * k)
        .map(|_| sampling::unit_vector(&mut rng, k) * root)
        .collect();
    candidates.extend(base_candidates(beta).into_iter().map(onto_sphere));

    let target = n + 1 - k.min(n);
    let found = search(beta, candidates, target.max(1), tol, &onto_sphere);
    let xi = &found.eta / root;
    let status = classify_status(found.v1.dim(), target, found.residual, tol, beta.norm());
    UmbilicDecomposition {
        xi,
        mu,
        v1: found.v1,
        residual: found.residual,
        status,
    }
}

/// Recovers `(ξ, V₁)` for a form whose Weyl part vanishes and `k < n − 2`.
pub fn decompose_conformally_flat(beta: &VectorForm, tol: f64) -> ConformalDecomposition {
    let n = beta.n();
    let k = beta.k();
    if beta.is_zero() {
        return ConformalDecomposition {
            xi: DVector::zeros(k),
            v1: Subspace::whole(n, tol),
            residual: 0.0,
            status: DecompositionStatus::Recovered,
        };
    }
    let mut rng = sampling::stream(SEARCH_SEED, 2);
    let radius = beta.norm() / (n as f64).sqrt();
    let mut candidates: Vec<DVector<f64>> = (0..2000 * k)
        .map(|_| sampling::unit_vector(&mut rng, k) * radius)
        .collect();
    candidates.push(DVector::zeros(k));
    candidates.extend(base_candidates(beta));
    for _ in 0..4 * n {
        let x = sampling::unit_vector(&mut rng, n);
        candidates.push(beta.eval(&x, &x));
    }

    let target = n.saturating_sub(k).max(1);
    let found = search(beta, candidates, target, tol, &|v| v);
    let status = classify_status(found.v1.dim(), target, found.residual, tol, beta.norm());
    ConformalDecomposition {
        xi: found.eta,
        v1: found.v1,
        residual: found.residual,
        status,
    }
}

fn classify_status(dim: usize, target: usize, residual: f64, tol: f64, norm: f64) -> DecompositionStatus {
    if dim < target {
        DecompositionStatus::DimensionTooSmall
    } else if residual > 10.0 * tol * norm.max(1.0) {
        DecompositionStatus::ResidualTooLarge
    } else {
        DecompositionStatus::Recovered
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{kn_vector, Dims, DEFAULT_TOL};
    use crate::sampling::{gaussian_form, stream};

    /// `R(e_i, x, e_i, y)` summed directly from the tensor.
    fn ric_by_contraction(beta: &VectorForm) -> DMatrix<f64> {
        r_of(beta).contract_13()
    }

    fn umbilic(n: usize, k: usize) -> VectorForm {
        let mut eta = vec![0.0; k];
        eta[0] = 1.0;
        VectorForm::umbilic(n, &eta)
    }

    /// `A = diag(1, 1, −1, …, −1)` in the first component.
    fn reference_form(n: usize, a: f64) -> VectorForm {
        let mut d = vec![-a; n];
        d[0] = a;
        d[1] = a;
        VectorForm::single(&ScalarForm::diagonal(&d), 2, 0).unwrap()
    }

    #[test]
    fn umbilic_values() {
        let n = 6;
        let b = umbilic(n, 2);
        let g = ScalarForm::identity(n);
        let r1 = kn_scalar(&g, &g).unwrap().scale(0.5);
        assert!(r_of(&b).sub(&r1).unwrap().max_abs() <= 1e-12);
        assert!((ric_of(&b).matrix() - DMatrix::identity(n, n) * 5.0).amax() <= 1e-12);
        assert!((scal_of(&b) - 30.0).abs() <= 1e-12);
        assert!((l_of(&b).unwrap().matrix() - DMatrix::identity(n, n) * 0.5).amax() <= 1e-12);
        assert!(w_of(&b).unwrap().max_abs() <= 1e-12);
        assert_eq!(phi_pinch(&b, 0.5).unwrap(), 0.0);
        assert!(phi_weyl(&b, 0.5).unwrap() <= 1e-24);
    }

    #[test]
    fn zero_form_values() {
        let b = VectorForm::zeros(5, 2);
        assert_eq!(r_of(&b).max_abs(), 0.0);
        assert_eq!(scal_of(&b), 0.0);
        assert_eq!(ric_of(&b).norm_sq(), 0.0);
        assert_eq!(l_of(&b).unwrap().norm_sq(), 0.0);
        assert_eq!(w_of(&b).unwrap().max_abs(), 0.0);
        assert_eq!(phi_pinch(&b, 0.5).unwrap(), 0.0);
        assert_eq!(phi_weyl(&b, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn ric_matches_tensor_contraction() {
        let mut rng = stream(11, 0);
        for _ in 0..20 {
            let b = gaussian_form(&mut rng, Dims::new(6, 3));
            let diff = (ric_of(&b).matrix() - ric_by_contraction(&b)).amax();
            assert!(diff <= 1e-12, "{diff}");
        }
    }

    #[test]
    fn reference_form_scalar_curvature() {
        let b = reference_form(7, 1.0);
        // direct trace of the contracted tensor
        assert!((ric_by_contraction(&b).trace() - 2.0).abs() <= 1e-12);
        assert_eq!(scal_of(&b), 2.0);
        let b3 = reference_form(7, 3.0);
        assert!((scal_of(&b3) - 18.0).abs() <= 1e-12);
    }

    #[test]
    fn reference_form_deficit_is_exactly_zero() {
        let lambda = 7.0 / 9.0;
        let b = reference_form(7, 1.0);
        assert_eq!(b.norm_sq() - lambda * b.trace().norm_squared(), 0.0);
        assert_eq!(pinch_deficit(&b, lambda).unwrap(), 0.0);
    }

    #[test]
    fn deficit_examples() {
        assert_eq!(pinch_deficit(&umbilic(6, 2), 0.5).unwrap(), 0.0);
        let b = VectorForm::single(&ScalarForm::diagonal(&[1.0, -1.0, 0.0, 0.0]), 2, 0).unwrap();
        assert_eq!(pinch_deficit(&b, 0.5).unwrap(), 2.0);
        assert!(pinch_deficit(&b, 0.0).is_err());
        assert!(pinch_deficit(&b, 1.0).is_err());
        assert!(phi_pinch(&b, 0.2).is_err());
    }

    #[test]
    fn reference_phi_matches_loop_oracle() {
        let n = 7;
        let b = reference_form(n, 1.0);
        let a = b.component(0);
        let scal = 2.0;
        let c = scal / 42.0;
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let sq = 2.0 * (a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)]);
                        let gg = 2.0 * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
                        let v = sq - c * gg;
                        total += v * v;
                    }
                }
            }
        }
        let oracle = 0.25 * total;
        // frozen: 36960/441
        assert!((oracle - 36960.0 / 441.0).abs() <= 1e-10);
        let got = phi_pinch(&b, 7.0 / 9.0).unwrap();
        assert!((got - oracle).abs() <= 1e-10 * oracle);
    }

    #[test]
    fn phi_weyl_is_compositional() {
        let mut rng = stream(5, 0);
        let b = gaussian_form(&mut rng, Dims::new(8, 3));
        let w = w_of(&b).unwrap().norm_sq();
        let d = pinch_deficit(&b, 0.5).unwrap();
        let got = phi_weyl(&b, 0.5).unwrap();
        assert!((got - (w + d * d)).abs() <= 1e-12 * got.max(1.0));
    }

    #[test]
    fn schouten_trace_identity() {
        let mut rng = stream(6, 0);
        let b = gaussian_form(&mut rng, Dims::new(6, 2));
        let lhs = l_of(&b).unwrap().trace();
        let rhs = scal_of(&b) / 10.0;
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn weyl_is_trace_free() {
        let mut rng = stream(8, 0);
        let b = gaussian_form(&mut rng, Dims::new(7, 3));
        assert!(w_of(&b).unwrap().contract_13().amax() <= 1e-11);
    }

    #[test]
    fn small_dimensions_are_rejected() {
        let b = VectorForm::zeros(3, 2);
        assert!(w_of(&b).is_err());
        assert!(l_of(&b).is_ok());
        assert!(l_of(&VectorForm::zeros(2, 2)).is_err());
    }

    #[test]
    fn phi_zero_requires_both_terms() {
        // first term vanishes, deficit does not
        let b = umbilic(6, 2).scale(1.0);
        let t = b.trace().norm_squared();
        assert!(b.norm_sq() < 0.5 * t);
        // trace-free form: deficit positive, so φ > 0
        let tf = VectorForm::single(&ScalarForm::diagonal(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]), 2, 0).unwrap();
        assert!(phi_pinch(&tf, 0.5).unwrap() > 0.0);
        // deficit vanishes but curvature is not constant
        let r = reference_form(7, 1.0);
        assert_eq!(pinch_deficit(&r, 7.0 / 9.0).unwrap(), 0.0);
        assert!(phi_pinch(&r, 7.0 / 9.0).unwrap() > 0.0);
    }

    #[test]
    fn exact_umbilic_is_recovered() {
        let b = umbilic(5, 2);
        let d = decompose_umbilic(&b, DEFAULT_TOL);
        assert_eq!(d.status, DecompositionStatus::Recovered);
        assert!((d.xi[0] - 1.0).abs() <= 1e-12 && d.xi[1].abs() <= 1e-12);
        assert!((d.mu - 1.0).abs() <= 1e-12);
        assert_eq!(d.v1.dim(), 5);
        assert!(d.residual <= 1e-10);
    }

    #[test]
    fn zero_form_decompositions() {
        let b = VectorForm::zeros(6, 2);
        let u = decompose_umbilic(&b, DEFAULT_TOL);
        assert_eq!(u.status, DecompositionStatus::NonPositiveMu);
        let c = decompose_conformally_flat(&b, DEFAULT_TOL);
        assert_eq!(c.status, DecompositionStatus::Recovered);
        assert_eq!(c.v1.dim(), 6);
        assert_eq!(c.xi.norm(), 0.0);
    }

    #[test]
    fn conformal_recovers_umbilic() {
        let b = umbilic(7, 2).scale(2.0);
        let d = decompose_conformally_flat(&b, DEFAULT_TOL);
        assert_eq!(d.status, DecompositionStatus::Recovered);
        assert!((d.xi[0] - 2.0).abs() <= 1e-10);
        assert_eq!(d.v1.dim(), 7);
    }

    #[test]
    fn conformal_rejects_generic_form() {
        let mut rng = stream(9, 0);
        let b = gaussian_form(&mut rng, Dims::new(7, 2));
        assert!(w_of(&b).unwrap().norm() > 1e-3);
        let d = decompose_conformally_flat(&b, DEFAULT_TOL);
        assert_ne!(d.status, DecompositionStatus::Recovered);
    }

    #[test]
    fn kn_vector_of_umbilic_matches_r() {
        let b = umbilic(4, 3);
        let lhs = kn_vector(&b, &b).unwrap().scale(0.5);
        assert!(lhs.sub(&r_of(&b)).unwrap().max_abs() == 0.0);
    }
}
