//! Numerical upper bounds for the pinching constants.
//!
//! The scale-free ratio `φ(β) / ψ(β)^{4/n}` is minimized over unit-norm forms
//! by multi-start random sampling followed by a compass search. Whatever the
//! optimizer returns is an upper bound for the true infimum, never a
//! certified value.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{phi_pinch_unchecked, phi_weyl, scal_of};
use crate::error::{Error, Result};
use crate::forms::{Dims, ScalarForm, VectorForm};
use crate::sampling::{self, Stream};
use crate::sphere::{psi_on_nodes, sphere_volume, NodeSet, QuadValue, QuadratureSpec, RegionKind};

pub const DEFAULT_BUDGET: u64 = 50_000;
pub const DEFAULT_RESTARTS: usize = 20;
pub const MIN_BUDGET: u64 = 100;

const INITIAL_STEP: f64 = 0.05;
const MIN_STEP: f64 = 1e-4;
const KICK: f64 = 0.1;
const MAX_REJECTIONS: usize = 10_000;
/// Restarts carried into the second phase.
const SURVIVORS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Distance to constant curvature, integrated over `Λ(β)`.
    Pinch,
    /// Weyl part, integrated over `Ω(β)`.
    Weyl,
}

impl Variant {
    pub fn region(self) -> RegionKind {
        match self {
            Variant::Pinch => RegionKind::LambdaAuto,
            Variant::Weyl => RegionKind::OmegaBand,
        }
    }

    pub fn check_dims(self, dims: Dims) -> Result<()> {
        match self {
            Variant::Pinch => dims.check_closed_band(),
            Variant::Weyl => dims.check_open_band(),
        }
    }

    /// Admissible `k` for a given `n`.
    pub fn k_range(self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            Variant::Pinch => 2..=n / 2,
            Variant::Weyl => 2..=n.saturating_sub(2) / 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Pinch => "pinch",
            Variant::Weyl => "weyl",
        }
    }

    fn phi(self, beta: &VectorForm, lambda: f64) -> f64 {
        match self {
            Variant::Pinch => phi_pinch_unchecked(beta, lambda),
            Variant::Weyl => phi_weyl(beta, lambda).expect("validated by Objective::new"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pinch" => Ok(Variant::Pinch),
            "weyl" => Ok(Variant::Weyl),
            other => Err(Error::Malformed(format!("unknown variant {other:?}"))),
        }
    }
}

fn check_lambda(n: usize, lambda: f64) -> Result<()> {
    let lo = 1.0 / n as f64;
    if !(lambda > lo && lambda < 1.0) {
        return Err(Error::OutOfRange(format!(
            "lambda must lie in (1/n, 1) = ({lo}, 1), got {lambda}"
        )));
    }
    Ok(())
}

/// One evaluation of the objective with its ingredients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    #[serde(with = "crate::hexfloat")]
    pub phi: f64,
    pub psi: QuadValue,
    /// `φ/ψ^{4/n}`, or `+∞` when `ψ` does not exceed its own error.
    #[serde(with = "crate::hexfloat")]
    pub value: f64,
}

/// The objective for fixed `(n, k, λ, variant, quadrature)`, with its nodes
/// generated once.
#[derive(Clone, Debug)]
pub struct Objective {
    dims: Dims,
    lambda: f64,
    variant: Variant,
    nodes: NodeSet,
}

impl Objective {
    pub fn new(dims: Dims, lambda: f64, variant: Variant, quad: QuadratureSpec) -> Result<Self> {
        variant.check_dims(dims)?;
        check_lambda(dims.n, lambda)?;
        let nodes = NodeSet::new(quad, dims.k)?;
        Ok(Objective {
            dims,
            lambda,
            variant,
            nodes,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn quad(&self) -> QuadratureSpec {
        self.nodes.spec()
    }

    pub fn evaluate(&self, beta: &VectorForm) -> Result<Evaluation> {
        if beta.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "objective is for (n, k) = ({}, {}), form has ({}, {})",
                self.dims.n,
                self.dims.k,
                beta.n(),
                beta.k()
            )));
        }
        Ok(self.evaluate_unchecked(beta))
    }

    fn evaluate_unchecked(&self, beta: &VectorForm) -> Evaluation {
        let psi = psi_on_nodes(beta, self.variant.region(), &self.nodes)
            .expect("node set matches k");
        if !(psi.value > psi.error) || psi.value <= 0.0 {
            return Evaluation {
                phi: f64::NAN,
                psi,
                value: f64::INFINITY,
            };
        }
        let phi = self.variant.phi(beta, self.lambda);
        let value = phi / psi.value.powf(4.0 / self.dims.n as f64);
        Evaluation { phi, psi, value }
    }

    pub fn value(&self, beta: &VectorForm) -> f64 {
        self.evaluate_unchecked(beta).value
    }
}

/// `φ(β)/ψ(β)^{4/n}` for a single form.
pub fn objective(beta: &VectorForm, lambda: f64, variant: Variant, quad: &QuadratureSpec) -> Result<f64> {
    Ok(Objective::new(beta.dims(), lambda, variant, *quad)?.evaluate(beta)?.value)
}

/// `A ξ₁` with `A = diag(1, 1, −1, …, −1)`: curvature is not constant, yet
/// the trace condition holds with equality at `λ = n/(n−4)²`.
pub fn reference_form(dims: Dims) -> VectorForm {
    let mut d = vec![-1.0; dims.n];
    d[0] = 1.0;
    d[1] = 1.0;
    VectorForm::single(&ScalarForm::diagonal(&d), dims.k, 0).expect("k >= 1")
}

/// `(evaluation index, best value so far)`.
pub type HistoryPoint = (u64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: usize,
    pub k: usize,
    #[serde(with = "crate::hexfloat")]
    pub lambda: f64,
    pub variant: Variant,
    /// Upper bound for the constant; smallest objective value found.
    #[serde(with = "crate::hexfloat")]
    pub epsilon_hat: f64,
    /// Minimizer, normalized to unit norm.
    pub witness: VectorForm,
    pub witness_eval: Evaluation,
    pub budget: u64,
    pub evaluations: u64,
    pub seed: u64,
    pub restarts: usize,
    pub quad: QuadratureSpec,
    /// Running minimum, non-increasing.
    #[serde(with = "crate::hexfloat::history")]
    pub history: Vec<HistoryPoint>,
}

impl EstimateRecord {
    pub fn dims(&self) -> Dims {
        Dims::new(self.n, self.k)
    }

    /// The optimizer only ever finds feasible points, so its value bounds the
    /// infimum from above.
    pub fn is_upper_bound(&self) -> bool {
        true
    }

    pub fn objective(&self) -> Result<Objective> {
        Objective::new(self.dims(), self.lambda, self.variant, self.quad)
    }
}

/// Settings for [`estimate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateJob {
    pub dims: Dims,
    pub lambda: f64,
    pub variant: Variant,
    pub budget: u64,
    pub seed: u64,
    pub quad: QuadratureSpec,
    pub restarts: usize,
}

impl EstimateJob {
    pub fn new(n: usize, k: usize, lambda: f64, variant: Variant, quad: QuadratureSpec) -> Self {
        EstimateJob {
            dims: Dims::new(n, k),
            lambda,
            variant,
            budget: DEFAULT_BUDGET,
            seed: 0,
            quad,
            restarts: DEFAULT_RESTARTS,
        }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

struct RestartResult {
    best: VectorForm,
    best_value: f64,
    used: u64,
    history: Vec<HistoryPoint>,
}

struct Walker<'a> {
    objective: &'a Objective,
    used: u64,
    budget: u64,
    best: Option<(VectorForm, f64)>,
    history: Vec<HistoryPoint>,
}

impl Walker<'_> {
    fn has_budget(&self) -> bool {
        self.used < self.budget
    }

    fn eval(&mut self, beta: &VectorForm) -> f64 {
        self.used += 1;
        let v = self.objective.value(beta);
        let improved = match &self.best {
            None => v.is_finite(),
            Some((_, b)) => v < *b,
        };
        if improved {
            self.best = Some((beta.clone(), v));
            self.history.push((self.used, v));
        }
        v
    }
}

fn normalized(dims: Dims, free: &[f64]) -> Option<VectorForm> {
    let b = VectorForm::from_free(dims, free).ok()?;
    let norm = b.norm();
    if norm > 1e-12 && norm.is_finite() {
        Some(b.scale(1.0 / norm))
    } else {
        None
    }
}

/// One compass sweep from `x`: each coordinate is moved by `±step`, keeping
/// the first improvement.
fn explore(w: &mut Walker<'_>, dims: Dims, x: &[f64], fx: f64, step: f64) -> (Vec<f64>, f64) {
    let mut x = x.to_vec();
    let mut fx = fx;
    for i in 0..x.len() {
        for dir in [1.0, -1.0] {
            if !w.has_budget() {
                return (x, fx);
            }
            let mut y = x.clone();
            y[i] += dir * step;
            let Some(b) = normalized(dims, &y) else { continue };
            let fy = w.eval(&b);
            if fy < fx {
                x = b.to_free();
                fx = fy;
                break;
            }
        }
    }
    (x, fx)
}

/// Hooke–Jeeves pattern search from `start` until the walker's budget is
/// spent. When the step collapses, the search restarts from a random
/// perturbation of the best point seen.
fn local_search(w: &mut Walker<'_>, rng: &mut Stream, start: &VectorForm, start_value: f64) {
    let dims = start.dims();
    let mut base = start.to_free();
    let mut f_base = start_value;
    let mut step = INITIAL_STEP;
    while w.has_budget() {
        let (x, fx) = explore(w, dims, &base, f_base, step);
        if fx < f_base {
            // pattern moves along the last successful displacement
            let (mut x, mut fx) = (x, fx);
            while w.has_budget() {
                let probe: Vec<f64> = x.iter().zip(&base).map(|(a, b)| 2.0 * a - b).collect();
                base = x.clone();
                f_base = fx;
                let Some(p) = normalized(dims, &probe) else { break };
                let f_p = w.eval(&p);
                let (y, fy) = explore(w, dims, &p.to_free(), f_p, step);
                if fy < f_base {
                    x = y;
                    fx = fy;
                } else {
                    break;
                }
            }
            base = x;
            f_base = fx;
        } else {
            step *= 0.5;
            if step < MIN_STEP {
                // restart the local search from a perturbed best point
                let (best, best_value) = w.best.clone().expect("set above");
                base = best.to_free();
                f_base = best_value;
                let kick = sampling::gaussian_vector(rng, base.len()) * KICK;
                let y: Vec<f64> = base.iter().zip(kick.iter()).map(|(a, b)| a + b).collect();
                if let Some(b) = normalized(dims, &y) {
                    if w.has_budget() {
                        let fy = w.eval(&b);
                        if fy.is_finite() {
                            base = b.to_free();
                            f_base = fy;
                        }
                    }
                }
                step = INITIAL_STEP;
            }
        }
    }
}

fn continue_restart(
    objective: &Objective,
    job: &EstimateJob,
    stream: u64,
    start: &VectorForm,
    value: f64,
    budget: u64,
) -> RestartResult {
    let mut rng = sampling::stream(job.seed, stream);
    let mut w = Walker {
        objective,
        used: 0,
        budget,
        best: Some((start.clone(), value)),
        history: Vec::new(),
    };
    local_search(&mut w, &mut rng, start, value);
    let (best, best_value) = w.best.expect("seeded");
    RestartResult {
        best,
        best_value,
        used: w.used,
        history: w.history,
    }
}

/// Runs the local search alone from a given form, with its own stream.
/// Returns the best form found (unit norm) and its objective value.
pub fn polish(objective: &Objective, start: &VectorForm, budget: u64, seed: u64) -> Result<(VectorForm, f64)> {
    let start = start.scale(1.0 / start.norm());
    let value = objective.evaluate(&start)?.value;
    let mut w = Walker {
        objective,
        used: 1,
        budget,
        best: Some((start.clone(), value)),
        history: Vec::new(),
    };
    let mut rng = sampling::stream(seed, u64::MAX);
    if value.is_finite() {
        local_search(&mut w, &mut rng, &start, value);
    }
    Ok(w.best.expect("seeded"))
}

fn run_restart(objective: &Objective, job: &EstimateJob, restart: usize, budget: u64) -> RestartResult {
    let dims = job.dims;
    let mut rng: Stream = sampling::stream(job.seed, restart as u64);
    let mut w = Walker {
        objective,
        used: 0,
        budget,
        best: None,
        history: Vec::new(),
    };

    let sweep = 2 * dims.free_entries() as u64;
    let random_phase = if budget < sweep + 1 {
        budget
    } else {
        (budget / 10).clamp(1, 200)
    };

    if restart == 0 && dims.n >= 5 {
        w.eval(&reference_form(dims).scale(1.0 / (dims.n as f64).sqrt()));
    }
    let mut rejections = 0;
    while (w.used < random_phase || w.best.is_none()) && rejections < MAX_REJECTIONS {
        let b = sampling::unit_form(&mut rng, dims);
        if !w.eval(&b).is_finite() {
            rejections += 1;
        }
    }

    if let Some((start, start_value)) = w.best.clone() {
        local_search(&mut w, &mut rng, &start, start_value);
    }

    let (best, best_value) = w
        .best
        .unwrap_or_else(|| (VectorForm::zeros(dims.n, dims.k), f64::INFINITY));
    RestartResult {
        best,
        best_value,
        used: w.used,
        history: w.history,
    }
}

/// Runs the multi-start search.
pub fn estimate(job: &EstimateJob) -> Result<EstimateRecord> {
    let objective = Objective::new(job.dims, job.lambda, job.variant, job.quad)?;
    if job.budget < MIN_BUDGET {
        return Err(Error::OutOfRange(format!(
            "budget must be at least {MIN_BUDGET}, got {}",
            job.budget
        )));
    }
    if job.restarts == 0 {
        return Err(Error::OutOfRange("need at least one restart".into()));
    }
    // first phase: every restart gets an equal share of half the budget;
    // second phase: the leading restarts split what is left
    let sweep = 2 * job.dims.free_entries() as u64;
    let survivors = SURVIVORS.min(job.restarts);
    let split = job.budget / 2 / survivors as u64 > sweep;
    let first = if split { job.budget / 2 } else { job.budget };
    let per_restart = (first / job.restarts as u64).max(1);
    let mut results: Vec<RestartResult> = (0..job.restarts)
        .into_par_iter()
        .map(|r| run_restart(&objective, job, r, per_restart))
        .collect();
    if split {
        let used: u64 = results.iter().map(|r| r.used).sum();
        let share = job.budget.saturating_sub(used) / survivors as u64;
        let mut order: Vec<usize> = (0..results.len()).collect();
        order.sort_by(|&a, &b| results[a].best_value.total_cmp(&results[b].best_value).then(a.cmp(&b)));
        let leaders: Vec<(usize, VectorForm, f64)> = order
            .into_iter()
            .take(survivors)
            .filter(|&i| results[i].best_value.is_finite())
            .map(|i| (i, results[i].best.clone(), results[i].best_value))
            .collect();
        let continued: Vec<RestartResult> = leaders
            .par_iter()
            .enumerate()
            .map(|(rank, (_, start, value))| {
                continue_restart(&objective, job, (job.restarts + rank) as u64, start, *value, share)
            })
            .collect();
        results.extend(continued);
    }

    // merge in restart order; strict comparison keeps the lowest index on ties
    let mut history = Vec::new();
    let mut offset = 0;
    let mut running = f64::INFINITY;
    let mut winner = 0;
    for (r, res) in results.iter().enumerate() {
        for &(i, v) in &res.history {
            if v < running {
                running = v;
                history.push((offset + i, v));
            }
        }
        if res.best_value < results[winner].best_value {
            winner = r;
        }
        offset += res.used;
    }
    let best = &results[winner];
    if !best.best_value.is_finite() {
        return Err(Error::Inadmissible(format!(
            "no form with a non-empty {:?} region was found for (n, k) = ({}, {})",
            job.variant.region(),
            job.dims.n,
            job.dims.k
        )));
    }
    let witness = best.best.clone();
    let witness_eval = objective.evaluate_unchecked(&witness);
    Ok(EstimateRecord {
        n: job.dims.n,
        k: job.dims.k,
        lambda: job.lambda,
        variant: job.variant,
        epsilon_hat: best.best_value,
        witness,
        witness_eval,
        budget: job.budget,
        evaluations: offset,
        seed: job.seed,
        restarts: job.restarts,
        quad: job.quad,
        history,
    })
}

/// [`estimate`] with the default number of restarts.
pub fn estimate_epsilon(
    n: usize,
    k: usize,
    lambda: f64,
    variant: Variant,
    budget: u64,
    seed: u64,
    quad: QuadratureSpec,
) -> Result<EstimateRecord> {
    estimate(&EstimateJob::new(n, k, lambda, variant, quad).budget(budget).seed(seed))
}

/// Lowers the estimate to any candidate's objective value that beats it.
pub fn refine_with_candidates(record: &EstimateRecord, candidates: &[VectorForm]) -> Result<EstimateRecord> {
    let objective = record.objective()?;
    let mut out = record.clone();
    for c in candidates {
        let eval = objective.evaluate(c)?;
        out.evaluations += 1;
        if eval.value < out.epsilon_hat {
            let norm = c.norm();
            out.witness = c.scale(1.0 / norm);
            out.witness_eval = objective.evaluate_unchecked(&out.witness);
            out.epsilon_hat = out.witness_eval.value.min(eval.value);
            out.history.push((out.evaluations, out.epsilon_hat));
        }
    }
    Ok(out)
}

/// Result of checking `φ(β) ≥ ε̂ ψ(β)^{4/n} − 3·err` on fresh random forms.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub samples: usize,
    /// Samples with an empty region, where the inequality holds trivially.
    pub empty_region: usize,
    pub violators: Vec<VectorForm>,
    /// Smallest `φ − (ε̂ψ^{4/n} − 3·err)` seen; negative for a violation.
    pub worst_margin: f64,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violators.is_empty()
    }
}

/// Draws `samples` unit forms from stream `(seed, 0)` and tests the bound.
pub fn audit(record: &EstimateRecord, samples: usize, seed: u64) -> Result<AuditReport> {
    let objective = record.objective()?;
    let dims = record.dims();
    let mut rng = sampling::stream(seed, 0);
    let forms: Vec<VectorForm> = (0..samples).map(|_| sampling::unit_form(&mut rng, dims)).collect();
    let exponent = 4.0 / dims.n as f64;
    let w_psi = record.witness_eval.psi;
    let w_rel = if w_psi.value > 0.0 { w_psi.error / w_psi.value } else { 0.0 };
    let checks: Vec<Option<f64>> = forms
        .par_iter()
        .map(|b| {
            let e = objective.evaluate_unchecked(b);
            if !e.value.is_finite() {
                return None;
            }
            let bound = record.epsilon_hat * e.psi.value.powf(exponent);
            let err = bound * exponent * (e.psi.error / e.psi.value + w_rel);
            Some(e.phi - (bound - 3.0 * err))
        })
        .collect();
    let mut report = AuditReport {
        samples,
        empty_region: 0,
        violators: Vec::new(),
        worst_margin: f64::INFINITY,
    };
    for (b, c) in forms.into_iter().zip(checks) {
        match c {
            None => report.empty_region += 1,
            Some(m) => {
                report.worst_margin = report.worst_margin.min(m);
                if m < 0.0 {
                    report.violators.push(b);
                }
            }
        }
    }
    Ok(report)
}

/// Audits, feeds violators back as candidates, and repeats until clean.
/// Returns the final record, the final clean report and the number of rounds.
pub fn audit_until_clean(
    record: &EstimateRecord,
    samples: usize,
    seed: u64,
) -> Result<(EstimateRecord, AuditReport, usize)> {
    let mut current = record.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let report = audit(&current, samples, seed)?;
        if report.is_clean() {
            return Ok((current, report, rounds));
        }
        current = refine_with_candidates(&current, &report.violators)?;
    }
}

/// One `k`-term of the min formula for the theorem constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantTerm {
    pub k: usize,
    pub variant: Variant,
    #[serde(with = "crate::hexfloat")]
    pub epsilon_hat: f64,
    /// `2 (ε̂/2)^{n/4} Vol(S^{n+k−1})`.
    #[serde(with = "crate::hexfloat")]
    pub term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub n: usize,
    #[serde(with = "crate::hexfloat")]
    pub delta: f64,
    /// Minimum over `2 ≤ k ≤ n/2` of the pinch terms.
    #[serde(with = "crate::hexfloat::option")]
    pub c_hat: Option<f64>,
    /// Minimum over `2 ≤ k ≤ ⌊(n−2)/2⌋` of the Weyl terms.
    #[serde(with = "crate::hexfloat::option")]
    pub c1_hat: Option<f64>,
    pub per_k: Vec<ConstantTerm>,
}

/// `2 (ε/2)^{n/4} Vol(S^{n+k−1})`.
pub fn constant_term(n: usize, k: usize, epsilon: f64) -> f64 {
    2.0 * (epsilon / 2.0).powf(n as f64 / 4.0) * sphere_volume(n + k - 1)
}

/// Applies the min formula to the records matching `(n, δ)`. Each variant
/// yields a constant only when every admissible `k` is covered; duplicate
/// records for one `k` contribute their smallest estimate.
pub fn derive_constants(n: usize, delta: f64, records: &[EstimateRecord]) -> Result<TheoremConstants> {
    let mut best: BTreeMap<(Variant, usize), f64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.n == n && r.lambda == delta) {
        let e = best.entry((r.variant, r.k)).or_insert(f64::INFINITY);
        *e = e.min(r.epsilon_hat);
    }
    let mut per_k = Vec::new();
    let mut constant = |variant: Variant| -> Result<Option<f64>> {
        let range = variant.k_range(n);
        let present: Vec<usize> = range.clone().filter(|k| best.contains_key(&(variant, *k))).collect();
        if present.is_empty() {
            return Ok(None);
        }
        let missing: Vec<usize> = range.clone().filter(|k| !present.contains(k)).collect();
        if !missing.is_empty() {
            return Err(Error::Coverage(format!(
                "{} records for n = {n}, delta = {delta} miss k in {missing:?}",
                variant.name()
            )));
        }
        let mut c = f64::INFINITY;
        for k in range {
            let eps = best[&(variant, k)];
            let term = constant_term(n, k, eps);
            per_k.push(ConstantTerm {
                k,
                variant,
                epsilon_hat: eps,
                term,
            });
            c = c.min(term);
        }
        Ok(Some(c))
    };
    let c_hat = constant(Variant::Pinch)?;
    let c1_hat = constant(Variant::Weyl)?;
    if c_hat.is_none() && c1_hat.is_none() {
        return Err(Error::Coverage(format!(
            "no records for n = {n}, delta = {delta}"
        )));
    }
    Ok(TheoremConstants {
        n,
        delta,
        c_hat,
        c1_hat,
        per_k,
    })
}

/// The objective value of the form scaled so that `ψ = 1`, i.e. the
/// normalization the constants are stated in.
pub fn psi_normalized(beta: &VectorForm, eval: &Evaluation) -> Option<VectorForm> {
    if eval.psi.value > 0.0 {
        Some(beta.scale(eval.psi.value.powf(-1.0 / beta.n() as f64)))
    } else {
        None
    }
}

/// True when `scal(β) > 0`, the case where the pinch region is the band.
pub fn has_positive_scal(beta: &VectorForm) -> bool {
    scal_of(beta) > 0.0
}
