//! Symmetric bilinear forms on a finite-dimensional inner-product space `V`,
//! their Kulkarni–Nomizu products, flatness and nullity.
//!
//! `V = R^n` carries the standard inner product. A vector-valued form takes
//! values in `W = R^k`, always written in a fixed orthonormal basis
//! `ξ_1, …, ξ_k`, so a form is just `k` symmetric `n × n` matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dimensions of the pair `(V, W)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    pub n: usize,
    pub k: usize,
}

impl Dims {
    pub fn new(n: usize, k: usize) -> Self {
        Dims { n, k }
    }

    /// `n ≥ 4` and `2 ≤ k ≤ n/2`: the range where the closed index band
    /// `k ≤ Index ≤ n−k` is defined.
    pub fn check_closed_band(&self) -> Result<()> {
        if self.n < 4 || self.k < 2 || 2 * self.k > self.n {
            return Err(Error::Inadmissible(format!(
                "need n >= 4 and 2 <= k <= n/2, got n={}, k={}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// `2 ≤ k ≤ ⌊(n−2)/2⌋`: the range where the open band `k < Index < n−k`
    /// is defined. Forces `n ≥ 6`.
    pub fn check_open_band(&self) -> Result<()> {
        if self.k < 2 || self.n < 6 || self.k > (self.n - 2) / 2 {
            return Err(Error::Inadmissible(format!(
                "need 2 <= k <= floor((n-2)/2), got n={}, k={}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// Number of free real parameters of a form in `Sym(V×V, W)`.
    pub fn free_entries(&self) -> usize {
        self.k * self.n * (self.n + 1) / 2
    }
}

fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// A real symmetric bilinear form on `V`, stored as its Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarForm {
    entries: DMatrix<f64>,
}

impl ScalarForm {
    /// Wraps a matrix that is already exactly symmetric.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "form matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let defect = symmetry_defect(&entries);
        if defect != 0.0 {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(ScalarForm { entries })
    }

    /// Symmetric part `(M + Mᵀ)/2` of a square matrix.
    pub fn symmetrized(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "form matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        });
        Ok(ScalarForm { entries })
    }

    pub fn zeros(n: usize) -> Self {
        ScalarForm {
            entries: DMatrix::zeros(n, n),
        }
    }

    /// The inner product `⟨·,·⟩` of `V`.
    pub fn identity(n: usize) -> Self {
        ScalarForm {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        ScalarForm {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub(crate) fn from_matrix_unchecked(entries: DMatrix<f64>) -> Self {
        debug_assert_eq!(symmetry_defect(&entries), 0.0);
        ScalarForm { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// `φ(x, y) = xᵀ M y`.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.entries * y))
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.norm_squared()
    }

    pub fn scale(&self, c: f64) -> Self {
        ScalarForm {
            entries: &self.entries * c,
        }
    }

    pub fn add(&self, other: &ScalarForm) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(ScalarForm {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &ScalarForm) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(ScalarForm {
            entries: &self.entries - &other.entries,
        })
    }

    /// Eigenvalues of the associated self-adjoint endomorphism, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("n = {a} vs n = {b}")));
    }
    Ok(())
}

/// A symmetric bilinear form `β: V × V → W`, stored as its components
/// `⟨β(·,·), ξ_a⟩` in the orthonormal basis of `W`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(into = "FormWire", try_from = "FormWire")]
pub struct VectorForm {
    n: usize,
    components: Vec<DMatrix<f64>>,
}

/// Row-major component matrices with hex-float entries.
#[derive(serde::Serialize, serde::Deserialize)]
struct FormWire {
    n: usize,
    k: usize,
    components: Vec<Vec<Vec<crate::hexfloat::Hex>>>,
}

impl From<VectorForm> for FormWire {
    fn from(f: VectorForm) -> Self {
        let n = f.n;
        FormWire {
            n,
            k: f.components.len(),
            components: f
                .components
                .iter()
                .map(|c| (0..n).map(|i| (0..n).map(|j| crate::hexfloat::Hex(c[(i, j)])).collect()).collect())
                .collect(),
        }
    }
}

impl TryFrom<FormWire> for VectorForm {
    type Error = Error;

    fn try_from(w: FormWire) -> Result<Self> {
        if w.components.len() != w.k {
            return Err(Error::Malformed(format!("expected {} components, got {}", w.k, w.components.len())));
        }
        let mut mats = Vec::with_capacity(w.k);
        for rows in w.components {
            if rows.len() != w.n || rows.iter().any(|r| r.len() != w.n) {
                return Err(Error::Malformed(format!("component is not {0} x {0}", w.n)));
            }
            mats.push(ScalarForm::new(DMatrix::from_fn(w.n, w.n, |i, j| rows[i][j].0))?);
        }
        VectorForm::new(mats)
    }
}

impl VectorForm {
    pub fn new(components: Vec<ScalarForm>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::DimensionMismatch(
                "a vector-valued form needs at least one component".into(),
            ));
        };
        let n = first.dim();
        for c in &components {
            check_same_dim(n, c.dim())?;
        }
        Ok(VectorForm {
            n,
            components: components.into_iter().map(|c| c.entries).collect(),
        })
    }

    /// Builds a form from raw matrices, checking exact symmetry.
    pub fn from_matrices(components: Vec<DMatrix<f64>>) -> Result<Self> {
        let forms = components
            .into_iter()
            .map(ScalarForm::new)
            .collect::<Result<Vec<_>>>()?;
        VectorForm::new(forms)
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        VectorForm {
            n,
            components: vec![DMatrix::zeros(n, n); k],
        }
    }

    /// `β(x, y) = ⟨x, y⟩ η`.
    pub fn umbilic(n: usize, eta: &[f64]) -> Self {
        VectorForm {
            n,
            components: eta
                .iter()
                .map(|&e| DMatrix::identity(n, n) * e)
                .collect(),
        }
    }

    /// `β(x, y) = φ(x, y) ξ_a` in a `k`-dimensional target.
    pub fn single(phi: &ScalarForm, k: usize, a: usize) -> Result<Self> {
        if a >= k {
            return Err(Error::DimensionMismatch(format!(
                "component {a} out of range for k = {k}"
            )));
        }
        let mut out = VectorForm::zeros(phi.dim(), k);
        out.components[a] = phi.entries.clone();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.n, self.k())
    }

    pub fn component(&self, a: usize) -> &DMatrix<f64> {
        &self.components[a]
    }

    pub fn components(&self) -> &[DMatrix<f64>] {
        &self.components
    }

    pub fn component_form(&self, a: usize) -> ScalarForm {
        ScalarForm::from_matrix_unchecked(self.components[a].clone())
    }

    /// `β(e_i, e_j)` as a `W`-vector.
    pub fn value(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.k(), self.components.iter().map(|c| c[(i, j)]))
    }

    /// `β(x, y)` as a `W`-vector.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.k(),
            self.components.iter().map(|c| x.dot(&(c * y))),
        )
    }

    /// Squared norm: sum of squared entries over all components.
    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.norm_squared()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `trace β = Σ_i β(e_i, e_i)`, a `W`-vector.
    pub fn trace(&self) -> DVector<f64> {
        DVector::from_iterator(self.k(), self.components.iter().map(|c| c.trace()))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorForm {
            n: self.n,
            components: self.components.iter().map(|m| m * c).collect(),
        }
    }

    pub fn add(&self, other: &VectorForm) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(VectorForm {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &VectorForm) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(VectorForm {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn check_same_shape(&self, other: &VectorForm) -> Result<()> {
        if self.n != other.n || self.k() != other.k() {
            return Err(Error::DimensionMismatch(format!(
                "(n, k) = ({}, {}) vs ({}, {})",
                self.n,
                self.k(),
                other.n,
                other.k()
            )));
        }
        Ok(())
    }

    /// `β − ⟨·,·⟩ η`.
    pub fn shifted(&self, eta: &DVector<f64>) -> Self {
        VectorForm {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(eta.iter())
                .map(|(c, &e)| {
                    let mut m = c.clone();
                    for i in 0..self.n {
                        m[(i, i)] -= e;
                    }
                    m
                })
                .collect(),
        }
    }

    /// Pull-back `β(P·, P·)`, i.e. components `Pᵀ B_a P`.
    pub fn pull_back(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "change of basis has {} rows, form has n = {}",
                p.nrows(),
                self.n
            )));
        }
        let comps = self
            .components
            .iter()
            .map(|c| {
                let m = p.transpose() * c * p;
                // exact symmetry after floating-point products
                ScalarForm::symmetrized(&m).map(|f| f.entries)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorForm {
            n: p.ncols(),
            components: comps,
        })
    }

    /// Components recombined by a `k' × k` matrix acting on `W`.
    pub fn push_forward(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.ncols() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "target map has {} columns, form has k = {}",
                q.ncols(),
                self.k()
            )));
        }
        let comps = (0..q.nrows())
            .map(|b| {
                let mut m = DMatrix::zeros(self.n, self.n);
                for (a, c) in self.components.iter().enumerate() {
                    m += c * q[(b, a)];
                }
                m
            })
            .collect();
        Ok(VectorForm {
            n: self.n,
            components: comps,
        })
    }

    /// Free entries: the upper triangle (row-major, diagonal included) of
    /// each component in turn.
    pub fn to_free(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dims().free_entries());
        for c in &self.components {
            for i in 0..self.n {
                for j in i..self.n {
                    out.push(c[(i, j)]);
                }
            }
        }
        out
    }

    /// Inverse of [`VectorForm::to_free`].
    pub fn from_free(dims: Dims, free: &[f64]) -> Result<Self> {
        if free.len() != dims.free_entries() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} free entries, got {}",
                dims.free_entries(),
                free.len()
            )));
        }
        let mut it = free.iter().copied();
        let comps = (0..dims.k)
            .map(|_| {
                let mut m = DMatrix::zeros(dims.n, dims.n);
                for i in 0..dims.n {
                    for j in i..dims.n {
                        let v = it.next().unwrap_or(0.0);
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
                m
            })
            .collect();
        Ok(VectorForm {
            n: dims.n,
            components: comps,
        })
    }
}

/// A `(0,4)`-tensor on `V`, stored densely in row-major `(i, j, k, l)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadTensor {
    n: usize,
    entries: Vec<f64>,
}

impl QuadTensor {
    pub fn zeros(n: usize) -> Self {
        QuadTensor {
            n,
            entries: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = QuadTensor::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let idx = t.offset(i, j, k, l);
                        t.entries[idx] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.entries[self.offset(i, j, k, l)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Plain Frobenius norm squared over all `n⁴` entries.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        QuadTensor {
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &QuadTensor) -> Result<Self> {
        check_same_dim(self.n, other.n)?;
        Ok(QuadTensor {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &QuadTensor) -> Result<Self> {
        check_same_dim(self.n, other.n)?;
        Ok(QuadTensor {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: f64, other: &QuadTensor) -> Result<Self> {
        check_same_dim(self.n, other.n)?;
        Ok(QuadTensor {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    /// Contraction over slots 1 and 3: `(x, y) ↦ Σ_i T(e_i, x, e_i, y)`.
    pub fn contract_13(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |x, y| (0..n).map(|i| self.get(i, x, i, y)).sum())
    }

    /// Largest violation of the algebraic curvature symmetries:
    /// antisymmetry in (1,2) and in (3,4), and the pair swap (12) ↔ (34).
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        worst = worst
                            .max((v + self.get(j, i, k, l)).abs())
                            .max((v + self.get(i, j, l, k)).abs())
                            .max((v - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Adds `w · (φ ∧ ψ)` into `out`.
fn kn_accumulate(out: &mut QuadTensor, phi: &DMatrix<f64>, psi: &DMatrix<f64>, w: f64) {
    let n = out.n;
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p_ik = phi[(i, k)];
                let s_ik = psi[(i, k)];
                let p_jk = phi[(j, k)];
                let s_jk = psi[(j, k)];
                for l in 0..n {
                    // Paired so that swapping φ and ψ is bitwise symmetric.
                    let v = (p_ik * psi[(j, l)] + phi[(j, l)] * s_ik)
                        - (phi[(i, l)] * s_jk + p_jk * psi[(i, l)]);
                    out.entries[idx] += w * v;
                    idx += 1;
                }
            }
        }
    }
}

/// Kulkarni–Nomizu product of two scalar forms.
pub fn kn_scalar(phi: &ScalarForm, psi: &ScalarForm) -> Result<QuadTensor> {
    check_same_dim(phi.dim(), psi.dim())?;
    let mut out = QuadTensor::zeros(phi.dim());
    kn_accumulate(&mut out, &phi.entries, &psi.entries, 1.0);
    Ok(out)
}

/// Kulkarni–Nomizu product of two `W`-valued forms, paired through the
/// Euclidean inner product of `W`.
pub fn kn_vector(beta: &VectorForm, gamma: &VectorForm) -> Result<QuadTensor> {
    beta.check_same_shape(gamma)?;
    let mut out = QuadTensor::zeros(beta.n);
    for (b, g) in beta.components.iter().zip(&gamma.components) {
        kn_accumulate(&mut out, b, g, 1.0);
    }
    Ok(out)
}

/// `W ⊕ R²` with an indefinite inner product of signature `(k+1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzSpace {
    metric: DMatrix<f64>,
}

impl LorentzSpace {
    /// Checks that `metric` is symmetric, non-degenerate and has exactly one
    /// negative eigenvalue.
    pub fn new(metric: DMatrix<f64>) -> Result<Self> {
        let form = ScalarForm::new(metric)?;
        let ev = form.eigenvalues();
        let scale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if ev.iter().any(|v| v.abs() <= 1e-12 * scale) {
            return Err(Error::OutOfRange("Lorentzian metric is degenerate".into()));
        }
        let negatives = ev.iter().filter(|&&v| v < 0.0).count();
        if negatives != 1 {
            return Err(Error::OutOfRange(format!(
                "Lorentzian metric needs exactly one negative eigenvalue, found {negatives}"
            )));
        }
        Ok(LorentzSpace {
            metric: form.entries,
        })
    }

    /// `⟨⟨(ξ,(s₁,s₂)), (η,(t₁,t₂))⟩⟩ = ⟨ξ,η⟩ + s₁t₂ + s₂t₁`.
    pub fn standard(k: usize) -> Self {
        let mut metric = DMatrix::zeros(k + 2, k + 2);
        for a in 0..k {
            metric[(a, a)] = 1.0;
        }
        metric[(k, k + 1)] = 1.0;
        metric[(k + 1, k)] = 1.0;
        LorentzSpace { metric }
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.metric * b))
    }
}

/// A symmetric form with values in a Lorentzian space.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzForm {
    n: usize,
    components: Vec<DMatrix<f64>>,
    space: LorentzSpace,
}

impl LorentzForm {
    pub fn new(components: Vec<ScalarForm>, space: LorentzSpace) -> Result<Self> {
        if components.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for a {}-dimensional target",
                components.len(),
                space.dim()
            )));
        }
        let inner = VectorForm::new(components)?;
        Ok(LorentzForm {
            n: inner.n,
            components: inner.components,
            space,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &LorentzSpace {
        &self.space
    }

    pub fn component(&self, a: usize) -> &DMatrix<f64> {
        &self.components[a]
    }

    pub fn components(&self) -> &[DMatrix<f64>] {
        &self.components
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| x.dot(&(c * y))),
        )
    }
}

/// Forms whose Kulkarni–Nomizu square is defined through their own target
/// inner product.
pub trait KnSquare {
    fn kn_square(&self) -> QuadTensor;
}

impl KnSquare for VectorForm {
    fn kn_square(&self) -> QuadTensor {
        let mut out = QuadTensor::zeros(self.n);
        for c in &self.components {
            kn_accumulate(&mut out, c, c, 1.0);
        }
        out
    }
}

impl KnSquare for LorentzForm {
    fn kn_square(&self) -> QuadTensor {
        let mut out = QuadTensor::zeros(self.n);
        let g = &self.space.metric;
        let m = self.components.len();
        for a in 0..m {
            for b in 0..m {
                let w = g[(a, b)];
                if w != 0.0 {
                    kn_accumulate(&mut out, &self.components[a], &self.components[b], w);
                }
            }
        }
        out
    }
}

/// Flatness test: `residual = max |β ∧ β|`, flat when `residual ≤ tol`.
pub fn is_flat<F: KnSquare + ?Sized>(form: &F, tol: f64) -> (bool, f64) {
    let residual = form.kn_square().max_abs();
    (residual <= tol, residual)
}

/// A subspace of `V` given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<DVector<f64>>,
    tol: f64,
}

impl Subspace {
    pub fn new(ambient: usize, basis: Vec<DVector<f64>>, tol: f64) -> Self {
        Subspace {
            ambient,
            basis,
            tol,
        }
    }

    pub fn whole(n: usize, tol: f64) -> Self {
        let basis = (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Subspace::new(n, basis, tol)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.ambient, self.ambient);
        for b in &self.basis {
            p += b * b.transpose();
        }
        p
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// Distance between the projectors of two subspaces (spectral-free,
    /// max-abs entry).
    pub fn projector_distance(&self, other: &Subspace) -> f64 {
        (self.projector() - other.projector()).amax()
    }
}

/// Default relative threshold for nullity and membership decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Right-singular directions of a stacked `(rows × n)` matrix whose singular
/// values fall below `tol · σ_max` (or `tol` when the matrix vanishes).
pub(crate) fn small_singular_subspace(stacked: &DMatrix<f64>, tol: f64) -> Subspace {
    let n = stacked.ncols();
    if stacked.iter().all(|&v| v == 0.0) {
        return Subspace::whole(n, tol);
    }
    let sigma_max = stacked.clone().singular_values().iter().fold(0.0f64, |m, &s| m.max(s));
    let cutoff = tol * if sigma_max > 0.0 { sigma_max } else { 1.0 };
    singular_subspace_below(stacked, cutoff, tol)
}

/// Right-singular directions of `stacked` with singular value below `cutoff`.
pub(crate) fn singular_subspace_below(stacked: &DMatrix<f64>, cutoff: f64, tol: f64) -> Subspace {
    let n = stacked.ncols();
    if stacked.iter().all(|&v| v == 0.0) {
        return Subspace::whole(n, tol);
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut basis = Vec::new();
    for (row, &s) in svd.singular_values.iter().enumerate() {
        if s < cutoff {
            basis.push(v_t.row(row).transpose());
        }
    }
    // with fewer rows than columns the SVD drops part of the kernel
    if v_t.nrows() < n {
        let mut q = DMatrix::zeros(n, v_t.nrows());
        for r in 0..v_t.nrows() {
            q.set_column(r, &v_t.row(r).transpose());
        }
        let proj = &q * q.transpose();
        let comp = DMatrix::identity(n, n) - proj;
        let eig = comp.symmetric_eigen();
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev > 0.5 {
                basis.push(eig.eigenvectors.column(i).into_owned());
            }
        }
    }
    Subspace::new(n, basis, tol)
}

/// Stacks the components of `β` into a `(k·n) × n` matrix.
pub(crate) fn stacked(beta: &VectorForm) -> DMatrix<f64> {
    let n = beta.n;
    let k = beta.k();
    let mut m = DMatrix::zeros(k * n, n);
    for (a, c) in beta.components.iter().enumerate() {
        m.view_mut((a * n, 0), (n, n)).copy_from(c);
    }
    m
}

/// Nullity space `{x : β(x, y) = 0 ∀y}`, numerically.
pub fn nullity_space(beta: &VectorForm, tol: f64) -> Subspace {
    small_singular_subspace(&stacked(beta), tol)
}

/// The lift `β̃(x, y) = (β(x, y), ⟨x, y⟩, −l(x, y))` into `W ⊕ R²` with the
/// standard Lorentzian pairing. With `l = L(β)` the lift is flat exactly when
/// the Weyl part of `β` vanishes.
pub fn lift_lorentz(beta: &VectorForm, l: &ScalarForm) -> Result<LorentzForm> {
    check_same_dim(beta.n, l.dim())?;
    let mut comps = beta.components.clone();
    comps.push(DMatrix::identity(beta.n, beta.n));
    comps.push(-l.entries.clone());
    Ok(LorentzForm {
        n: beta.n,
        components: comps,
        space: LorentzSpace::standard(beta.k()),
    })
}
