//! Property fixtures behind `curvpinch verify-props`: cheap randomized checks
//! of the algebraic identities and the fixed reference values.

use crate::catalog::standard_members;
use crate::curvature::{l_of, phi_pinch, phi_weyl, pinch_deficit, r_of, scal_of, w_of};
use crate::estimate::{reference_form, Objective, Variant};
use crate::forms::{kn_scalar, kn_vector, Dims, QuadTensor, ScalarForm, VectorForm};
use crate::hexfloat::{from_hex, to_hex};
use crate::report::PropertyOutcome;
use crate::sampling::{gaussian_form, stream};
use crate::sphere::{psi_integral, QuadratureSpec, RegionKind};

/// `(β∧γ)(i,j,k,l)` straight from the definition, summed over components.
pub fn naive_kn(beta: &VectorForm, gamma: &VectorForm) -> QuadTensor {
    let n = beta.n();
    QuadTensor::from_fn(n, |i, j, k, l| {
        let mut v = 0.0;
        for a in 0..beta.k() {
            let (p, q) = (beta.component(a), gamma.component(a));
            v += p[(i, k)] * q[(j, l)] + p[(j, l)] * q[(i, k)] - p[(i, l)] * q[(j, k)] - p[(j, k)] * q[(i, l)];
        }
        v
    })
}

fn outcome(name: &str, worst: f64, tol: f64) -> PropertyOutcome {
    PropertyOutcome {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("worst {worst:.3e}, tolerance {tol:.0e}"),
    }
}

fn random_dims(i: usize) -> Dims {
    let n = 4 + i % 5;
    let k = 1 + i % 3;
    Dims::new(n, k)
}

pub fn kn_oracle(samples: usize, seed: u64) -> PropertyOutcome {
    let mut rng = stream(seed, 10);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let d = random_dims(i);
        let (b, g) = (gaussian_form(&mut rng, d), gaussian_form(&mut rng, d));
        let diff = kn_vector(&b, &g).unwrap().sub(&naive_kn(&b, &g)).unwrap().max_abs();
        worst = worst.max(diff);
    }
    outcome("kn-oracle", worst, 1e-12)
}

pub fn curvature_identities(samples: usize, seed: u64) -> PropertyOutcome {
    let mut rng = stream(seed, 11);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let b = gaussian_form(&mut rng, random_dims(i));
        let n = b.n();
        let scal = scal_of(&b) - (b.trace().norm_squared() - b.norm_sq());
        let lg = kn_scalar(&l_of(&b).unwrap(), &ScalarForm::identity(n)).unwrap();
        let w = w_of(&b).unwrap();
        let split = r_of(&b).sub(&w.add(&lg).unwrap()).unwrap().max_abs();
        let trace = w.contract_13().amax();
        worst = worst.max(scal.abs()).max(split).max(trace);
    }
    outcome("curvature-identities", worst, 1e-10)
}

/// Degree-4 scaling of `φ`, degree-`n` scaling of `ψ`, and invariance of
/// the objective.
pub fn homogeneity(samples: usize, seed: u64) -> Vec<PropertyOutcome> {
    let mut rng = stream(seed, 12);
    let mut worst = 0.0f64;
    let mut worst_objective = 0.0f64;
    let quad = QuadratureSpec::circle(256);
    for i in 0..samples.min(20) {
        let b = gaussian_form(&mut rng, Dims::new(4 + i % 3, 2));
        let n = b.n() as f64;
        let lambda = 0.5 + 0.1 * (i % 3) as f64;
        let objective = Objective::new(b.dims(), lambda, Variant::Pinch, quad).unwrap();
        let base = objective.evaluate(&b).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let cb = b.scale(c);
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
            let phi = rel(phi_pinch(&cb, lambda).unwrap(), c.powi(4) * phi_pinch(&b, lambda).unwrap());
            let phw = rel(phi_weyl(&cb, lambda).unwrap(), c.powi(4) * phi_weyl(&b, lambda).unwrap());
            let scaled = objective.evaluate(&cb).unwrap();
            let psi = rel(scaled.psi.value, c.powf(n) * base.psi.value);
            worst = worst.max(phi).max(phw).max(psi);
            if base.value.is_finite() {
                worst_objective = worst_objective.max(rel(scaled.value, base.value));
            }
        }
    }
    vec![
        outcome("homogeneity", worst, 1e-8),
        outcome("objective-scale-invariance", worst_objective, 1e-6),
    ]
}

pub fn reference_fixture() -> PropertyOutcome {
    let b = reference_form(Dims::new(7, 2));
    let deficit = pinch_deficit(&b, 7.0 / 9.0).unwrap();
    let psi = psi_integral(&b, RegionKind::PhiBand, &QuadratureSpec::circle(4096)).unwrap();
    let err = (psi.value - 64.0 / 35.0).abs();
    PropertyOutcome {
        name: "reference-form".into(),
        passed: deficit == 0.0 && err <= 1e-6,
        detail: format!("deficit {deficit}, psi error {err:.3e}"),
    }
}

pub fn gauss_equation() -> PropertyOutcome {
    let worst = standard_members()
        .iter()
        .map(|m| r_of(&m.alpha).sub(&m.known_curvature()).unwrap().max_abs())
        .fold(0.0, f64::max);
    outcome("gauss-equation", worst, 1e-10)
}

pub fn hex_round_trip(samples: usize, seed: u64) -> PropertyOutcome {
    use rand::Rng;
    let mut rng = stream(seed, 13);
    let bad = (0..samples * 100)
        .map(|_| f64::from_bits(rng.random::<u64>()))
        .filter(|x| !x.is_nan())
        .filter(|&x| from_hex(&to_hex(x)).map(f64::to_bits).ok() != Some(x.to_bits()))
        .count();
    PropertyOutcome {
        name: "hex-round-trip".into(),
        passed: bad == 0,
        detail: format!("{bad} mismatches"),
    }
}

pub fn run_all(samples: usize, seed: u64) -> Vec<PropertyOutcome> {
    let mut out = vec![kn_oracle(samples, seed), curvature_identities(samples, seed)];
    out.extend(homogeneity(samples, seed));
    out.extend([reference_fixture(), gauss_equation(), hex_round_trip(samples, seed)]);
    out
}
