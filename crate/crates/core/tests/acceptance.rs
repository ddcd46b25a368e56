//! Acceptance criteria 1 to 9, run in order with one PASS/FAIL line each.
//! Lines go straight to stderr so they show up under captured output.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use curvpinch::catalog::{
    check_with_refinement, evaluate_theorem1, evaluate_theorem5, make_sphere_product, make_umbilic_sphere, scaled,
};
use curvpinch::curvature::{decompose_conformally_flat, decompose_umbilic, w_of, DecompositionStatus};
use curvpinch::estimate::{
    audit, audit_until_clean, derive_constants, estimate, estimate_epsilon, objective, reference_form, EstimateJob,
    EstimateRecord, Variant,
};
use curvpinch::forms::{kn_scalar, Dims, ScalarForm, Subspace, VectorForm};
use curvpinch::morse::{euler_check, shiohama_xu_check, total_curvature};
use curvpinch::props;
use curvpinch::report::{payload_bytes, Payload};
use curvpinch::sampling::{gaussian_symmetric, orthogonal, stream, unit_vector};
use curvpinch::sphere::{classify, psi_integral, NodeSet, QuadratureSpec, RegionKind, DEFAULT_INDEX_TAU};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Objective value of the reference form at `n = 7, k = 2, λ = 7/9` on the
/// 256-node circle rule.
const REFERENCE_OBJECTIVE: f64 = 59.36290254;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn criterion(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let passed = o.passed && in_time;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} {}: {name}: {} [{:.1}s / {}s]",
        if passed { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    passed
}

fn kn_oracles() -> Outcome {
    let vector = props::kn_oracle(100, 1);
    let mut rng = stream(1, 20);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 7;
        let p = ScalarForm::symmetrized(&gaussian_symmetric(&mut rng, n)).unwrap();
        let q = ScalarForm::symmetrized(&gaussian_symmetric(&mut rng, n)).unwrap();
        let as_vec = |f: &ScalarForm| VectorForm::new(vec![f.clone()]).unwrap();
        let naive = props::naive_kn(&as_vec(&p), &as_vec(&q));
        worst = worst.max(kn_scalar(&p, &q).unwrap().sub(&naive).unwrap().max_abs());
    }
    outcome(
        vector.passed && worst <= 1e-12,
        format!("kn_vector {}; kn_scalar worst {worst:.2e}", vector.detail),
    )
}

fn identities() -> Outcome {
    let o = props::curvature_identities(1000, 2);
    outcome(o.passed, o.detail)
}

fn homogeneity() -> Outcome {
    let o = props::homogeneity(20, 3);
    outcome(
        o.iter().all(|x| x.passed),
        o.iter().map(|x| format!("{} {}", x.name, x.detail)).collect::<Vec<_>>().join("; "),
    )
}

fn reference_fixture() -> Outcome {
    let b = reference_form(Dims::new(7, 2));
    let deficit = curvpinch::curvature::pinch_deficit(&b, 7.0 / 9.0).unwrap();
    let cutoff = DEFAULT_INDEX_TAU * b.norm();
    let half = PI / 2.0;
    let mut directions: Vec<DVector<f64>> = NodeSet::new(QuadratureSpec::circle(4096), 2)
        .unwrap()
        .points()
        .to_vec();
    for t in [half, -half, half + 0.5 * cutoff, half + 2.0 * cutoff, half - 4.0 * cutoff, 0.0, PI] {
        directions.push(DVector::from_vec(vec![t.cos(), t.sin()]));
    }
    let misclassified = directions
        .iter()
        .filter(|u| {
            let inside = classify(&b, u, DEFAULT_INDEX_TAU).unwrap().is_in(RegionKind::PhiBand);
            inside != (u[0].abs() > cutoff)
        })
        .count();
    let psi = psi_integral(&b, RegionKind::PhiBand, &QuadratureSpec::circle(4096)).unwrap();
    let err = (psi.value - 64.0 / 35.0).abs();
    outcome(
        deficit == 0.0 && misclassified == 0 && err <= 1e-6,
        format!("deficit {deficit}, misclassified {misclassified}, psi error {err:.2e}"),
    )
}

fn estimator_sanity() -> Outcome {
    let quad = QuadratureSpec::circle(256);
    let reference = objective(&reference_form(Dims::new(7, 2)), 7.0 / 9.0, Variant::Pinch, &quad).unwrap();
    let frozen = (reference - REFERENCE_OBJECTIVE).abs() <= 1e-8;
    let run = |seed| estimate_epsilon(7, 2, 7.0 / 9.0, Variant::Pinch, 50_000, seed, quad).unwrap();
    let (a, b, again) = (run(1), run(2), run(1));
    let bytes = |r: &EstimateRecord| payload_bytes(&Payload::Estimate(r.clone())).unwrap();
    let below = a.epsilon_hat <= REFERENCE_OBJECTIVE && b.epsilon_hat <= REFERENCE_OBJECTIVE;
    let spread = (a.epsilon_hat - b.epsilon_hat).abs() / a.epsilon_hat.max(b.epsilon_hat);
    let monotone = [&a, &b].iter().all(|r| r.history.windows(2).all(|w| w[1].1 <= w[0].1));
    let identical = bytes(&a) == bytes(&again);
    outcome(
        frozen && below && spread <= 0.25 && monotone && identical,
        format!(
            "reference {reference:.8}, eps_hat {:.4} / {:.4}, spread {:.1}%, monotone {monotone}, identical {identical}",
            a.epsilon_hat,
            b.epsilon_hat,
            100.0 * spread
        ),
    )
}

/// Budget for each entry of the audited table.
const TABLE_BUDGET: u64 = 5000;

fn posthoc_audit() -> Outcome {
    let mut entries = 0;
    let mut refined = 0;
    let mut fed_back = 0;
    let mut all_clean = true;
    for n in 4..=8usize {
        for lambda in [0.3, 0.5, 0.8].into_iter().filter(|&l| l > 1.0 / n as f64) {
            for variant in [Variant::Pinch, Variant::Weyl] {
                for k in variant.k_range(n) {
                    let quad = QuadratureSpec::default_for(k, 256, 1);
                    let rec = estimate(&EstimateJob::new(n, k, lambda, variant, quad).budget(TABLE_BUDGET).seed(1))
                        .unwrap();
                    let seed = 1000 + entries as u64;
                    let first = audit(&rec, 10_000, seed).unwrap();
                    if !first.is_clean() {
                        fed_back += first.violators.len();
                        let (fin, report, _) = audit_until_clean(&rec, 10_000, seed).unwrap();
                        all_clean &= report.is_clean() && fin.epsilon_hat < rec.epsilon_hat;
                        refined += 1;
                    }
                    entries += 1;
                }
            }
        }
    }
    outcome(
        all_clean,
        format!("{entries} table entries, {fed_back} violators fed back, {refined} entries refined, all clean {all_clean}"),
    )
}

fn catalog_checks() -> Outcome {
    let delta = 0.6;
    let records = |n: usize| -> Vec<EstimateRecord> {
        [Variant::Pinch, Variant::Weyl]
            .into_iter()
            .flat_map(|v| v.k_range(n).map(move |k| (v, k)))
            .map(|(v, k)| {
                let job = EstimateJob::new(n, k, delta, v, QuadratureSpec::default_for(k, 256, 1)).budget(2000);
                estimate(&job).unwrap()
            })
            .collect()
    };
    let mut r4 = records(4);
    let mut r6 = records(6);

    let sphere = make_umbilic_sphere(6, 2, 1.0).unwrap();
    let c6 = derive_constants(6, delta, &r6).unwrap();
    let umb = evaluate_theorem1(&sphere, delta, &c6).unwrap();
    let umbilic_ok = umb.lhs_total == 0.0 && umb.betti_sum == 0 && umb.margin == 0.0;

    let s2 = check_with_refinement(&make_sphere_product(2, 2, 1.0, 1.0).unwrap(), delta, &mut r4, 3).unwrap();
    let s3 = check_with_refinement(&make_sphere_product(3, 3, 1.0, 1.0).unwrap(), delta, &mut r6, 3).unwrap();
    let products_ok = [&s2, &s3].iter().all(|c| !c.reports.is_empty() && c.reports.iter().all(|r| r.satisfied));

    let s33 = make_sphere_product(3, 3, 1.0, 1.0).unwrap();
    let c6 = derive_constants(6, delta, &r6).unwrap();
    let base = evaluate_theorem5(&s33, delta, &c6).unwrap().curvature_norm_integral;
    let drift = [0.5, 3.0]
        .iter()
        .map(|&c| {
            let v = evaluate_theorem5(&scaled(&s33, c).unwrap(), delta, &c6).unwrap().curvature_norm_integral;
            (v - base).abs() / base
        })
        .fold(0.0, f64::max);
    outcome(
        umbilic_ok && products_ok && drift <= 1e-9,
        format!(
            "umbilic margin {}, S2xS2 {} report(s) after {} round(s), S3xS3 {} report(s) after {} round(s), satisfied {products_ok}, Weyl homothety drift {drift:.2e}",
            umb.margin,
            s2.reports.len(),
            s2.rounds,
            s3.reports.len(),
            s3.rounds
        ),
    )
}

fn morse_numerics() -> Outcome {
    let samples = 1_000_000;
    let sphere = make_umbilic_sphere(4, 2, 1.0).unwrap();
    let prod = make_sphere_product(2, 2, 1.0, 1.0).unwrap();
    let ts = total_curvature(&sphere, samples, 1).unwrap();
    let tp = total_curvature(&prod, samples, 1).unwrap();
    let tau_ok = (ts.total - 2.0).abs() <= 0.02 && (tp.total - 4.0).abs() <= 0.04;
    let betti_ok = [&ts, &tp].iter().all(|t| {
        t.per_index
            .iter()
            .zip(&t.per_index_stderr)
            .zip(&t.betti)
            .all(|((&tau, &se), &b)| tau >= b as f64 - 3.0 * se)
    });
    let worst_sx = [0, 2, 4]
        .iter()
        .map(|&i| shiohama_xu_check(&prod, i, samples, 1).unwrap().relative_error)
        .fold(0.0, f64::max);
    let mismatches = euler_check(&sphere, 1000, 1).unwrap().mismatches + euler_check(&prod, 1000, 1).unwrap().mismatches;
    outcome(
        tau_ok && betti_ok && worst_sx < 0.01 && mismatches == 0,
        format!(
            "sphere tau {:.5}, S2xS2 tau {:.5}, tau_i >= b_i {betti_ok}, Shiohama-Xu worst {:.2e}, euler mismatches {mismatches}",
            ts.total, tp.total, worst_sx
        ),
    )
}

/// Orthonormal basis split into the first `m` columns and the rest.
fn split_basis(q: &DMatrix<f64>, m: usize) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let cols: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    let rest = cols[m..].to_vec();
    (cols[..m].to_vec(), rest)
}

/// `β = s⟨,⟩ξ + Σ c_a v_a v_aᵀ η_a` with `v_a` spanning `V₁⊥` and `η_a` orthonormal.
fn planted(n: usize, s: f64, xi: &DVector<f64>, off: &[DVector<f64>], etas: &[DVector<f64>], c: &[f64]) -> VectorForm {
    let k = xi.len();
    let mats = (0..k)
        .map(|a| {
            let mut m = DMatrix::identity(n, n) * (s * xi[a]);
            for ((v, eta), &ci) in off.iter().zip(etas).zip(c) {
                m += v * v.transpose() * (ci * eta[a]);
            }
            m
        })
        .collect();
    VectorForm::from_matrices(mats).unwrap()
}

fn decompositions() -> Outcome {
    let tol = 1e-9;
    let mut rng = stream(9, 0);
    let mut umbilic_ok = 0;
    let mut conformal_ok = 0;
    let mut worst = 0.0f64;
    for i in 0..50 {
        let k = 1 + i % 3;
        let n = rng.random_range(4..=10usize);
        let root: f64 = rng.random_range(0.5..2.0);
        let rot = orthogonal(&mut rng, k);
        let xi = rot.column(0).into_owned();
        let etas: Vec<DVector<f64>> = (1..k).map(|a| rot.column(a).into_owned()).collect();
        let c: Vec<f64> = (1..k).map(|_| rng.random_range(0.5..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let (v1, off) = split_basis(&orthogonal(&mut rng, n), n - k + 1);
        let b = planted(n, root, &xi, &off, &etas, &c);
        let d = decompose_umbilic(&b, tol);
        let dist = d.v1.projector_distance(&Subspace::new(n, v1, tol));
        let err = (&d.xi - &xi).norm().max(dist).max(d.residual).max((d.mu - root * root).abs());
        worst = worst.max(err);
        if d.status == DecompositionStatus::Recovered && err <= 1e-8 {
            umbilic_ok += 1;
        }
    }
    for i in 0..50 {
        let k = 1 + i % 3;
        let n = rng.random_range((k + 3).max(4)..=10usize);
        let xi = unit_vector(&mut rng, k) * rng.random_range(0.5..2.0);
        let rot = orthogonal(&mut rng, k);
        let etas: Vec<DVector<f64>> = (0..k).map(|a| rot.column(a).into_owned()).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..2.0)).collect();
        let (v1, off) = split_basis(&orthogonal(&mut rng, n), n - k);
        let b = planted(n, 1.0, &xi, &off, &etas, &c);
        let weyl = w_of(&b).unwrap().max_abs();
        let d = decompose_conformally_flat(&b, tol);
        let dist = d.v1.projector_distance(&Subspace::new(n, v1, tol));
        let err = (&d.xi - &xi).norm().max(dist).max(d.residual);
        worst = worst.max(err);
        if weyl <= 1e-12 && d.status == DecompositionStatus::Recovered && err <= 1e-8 {
            conformal_ok += 1;
        }
    }
    outcome(
        umbilic_ok == 50 && conformal_ok == 50,
        format!("umbilic {umbilic_ok}/50, conformal {conformal_ok}/50, worst error {worst:.2e}"),
    )
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "algebraic oracle equivalence", secs(10), kn_oracles),
        criterion(2, "identity suite", secs(30), identities),
        criterion(3, "homogeneity", secs(60), homogeneity),
        criterion(4, "reference form fixture", secs(5), reference_fixture),
        criterion(5, "estimator sanity", secs(300), estimator_sanity),
        criterion(6, "post-hoc inequality audit", secs(1800), posthoc_audit),
        criterion(7, "catalog checks", secs(60), catalog_checks),
        criterion(8, "Morse and total curvature numerics", secs(300), morse_numerics),
        criterion(9, "decomposition round trips", secs(120), decompositions),
    ];
    let failed: Vec<usize> = (1..=9).filter(|i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
