use curvpinch::catalog::{make_clifford_minimal, make_sphere_product, make_umbilic_sphere, standard_members};
use curvpinch::curvature::{l_of, phi_pinch, phi_weyl, pinch_deficit, r_of, scal_of, w_of};
use curvpinch::estimate::{
    constant_term, derive_constants, estimate, EstimateJob, EstimateRecord, Variant,
};
use curvpinch::forms::{is_flat, kn_scalar, kn_vector, nullity_space, Dims, ScalarForm, VectorForm};
use curvpinch::morse::{euler_check, total_curvature};
use curvpinch::sampling::{gaussian_form, gaussian_symmetric, gaussian_vector, stream, unit_vector};
use curvpinch::sphere::{classify, psi_integral, QuadratureSpec, RegionKind, DEFAULT_INDEX_TAU};
use nalgebra::DVector;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = Dims> {
    (4usize..=8).prop_flat_map(|n| (Just(n), 1usize..=3)).prop_map(|(n, k)| Dims::new(n, k))
}

fn form(seed: u64, d: Dims) -> VectorForm {
    gaussian_form(&mut stream(seed, 0), d)
}

/// Form with a planted nullity: the last `m` basis vectors are annihilated.
fn form_with_nullity(seed: u64, d: Dims, m: usize) -> VectorForm {
    let b = form(seed, d);
    let keep = d.n - m;
    let mats = b
        .components()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            for i in keep..d.n {
                c.row_mut(i).fill(0.0);
                c.column_mut(i).fill(0.0);
            }
            c
        })
        .collect();
    VectorForm::from_matrices(mats).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kn_is_bilinear_and_symmetric(seed in any::<u64>(), d in dims(), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let mut rng = stream(seed, 1);
        let (x, y, z) = (gaussian_form(&mut rng, d), gaussian_form(&mut rng, d), gaussian_form(&mut rng, d));
        let combo = x.scale(a).add(&y.scale(c)).unwrap();
        let lhs = kn_vector(&combo, &z).unwrap();
        let rhs = kn_vector(&x, &z).unwrap().scale(a).add(&kn_vector(&y, &z).unwrap().scale(c)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * (1.0 + lhs.max_abs()));
        prop_assert_eq!(kn_vector(&x, &z).unwrap(), kn_vector(&z, &x).unwrap());

        let p = ScalarForm::symmetrized(&gaussian_symmetric(&mut rng, d.n)).unwrap();
        let q = ScalarForm::symmetrized(&gaussian_symmetric(&mut rng, d.n)).unwrap();
        prop_assert_eq!(kn_scalar(&p, &q).unwrap(), kn_scalar(&q, &p).unwrap());
        prop_assert!(kn_scalar(&p, &q).unwrap().symmetry_defect() <= 1e-12);
    }

    #[test]
    fn curvature_tensors_have_curvature_symmetries(seed in any::<u64>(), d in dims()) {
        let b = form(seed, d);
        let r = r_of(&b);
        prop_assert!(r.symmetry_defect() <= 1e-12 * (1.0 + r.max_abs()));
        let w = w_of(&b).unwrap();
        prop_assert!(w.symmetry_defect() <= 1e-11 * (1.0 + w.max_abs()));
    }

    #[test]
    fn flatness_residual_is_self_consistent(seed in any::<u64>(), d in dims()) {
        let b = form(seed, d);
        let (_, residual) = is_flat(&b, 1e-9);
        prop_assert_eq!(residual, kn_vector(&b, &b).unwrap().max_abs());
    }

    #[test]
    fn nullity_vectors_annihilate(seed in any::<u64>(), d in dims(), m in 1usize..3) {
        let b = form_with_nullity(seed, d, m);
        let tol = 1e-9;
        let space = nullity_space(&b, tol);
        prop_assert!(space.dim() >= m);
        let mut rng = stream(seed, 2);
        for x in space.basis() {
            for _ in 0..100 {
                let y = gaussian_vector(&mut rng, d.n);
                prop_assert!(b.eval(x, &y).norm() <= tol * b.norm() * y.norm());
            }
        }
    }

    #[test]
    fn curvature_identities(seed in any::<u64>(), d in dims()) {
        let b = form(seed, d);
        let scal = b.trace().norm_squared() - b.norm_sq();
        prop_assert!((scal_of(&b) - scal).abs() <= 1e-10 * (1.0 + scal.abs()));
        let lg = kn_scalar(&l_of(&b).unwrap(), &ScalarForm::identity(d.n)).unwrap();
        let split = r_of(&b).sub(&w_of(&b).unwrap().add(&lg).unwrap()).unwrap().max_abs();
        prop_assert!(split <= 1e-12 * (1.0 + r_of(&b).max_abs()));
    }

    #[test]
    fn functionals_are_homogeneous_of_degree_four(seed in any::<u64>(), d in dims(), c in 0.1f64..10.0, lambda in 0.3f64..0.95) {
        prop_assume!(lambda > 1.0 / d.n as f64);
        let b = form(seed, d);
        let cb = b.scale(c);
        let scale = c.powi(4);
        let p = phi_pinch(&b, lambda).unwrap();
        prop_assert!((phi_pinch(&cb, lambda).unwrap() - scale * p).abs() <= 1e-10 * scale * p);
        let w = phi_weyl(&b, lambda).unwrap();
        prop_assert!((phi_weyl(&cb, lambda).unwrap() - scale * w).abs() <= 1e-10 * scale * w);
    }

    #[test]
    fn umbilic_forms_are_weyl_flat_and_pinched(n in 4usize..=9, k in 1usize..=3, seed in any::<u64>()) {
        let eta = unit_vector(&mut stream(seed, 3), k);
        let b = VectorForm::umbilic(n, eta.as_slice());
        prop_assert!(w_of(&b).unwrap().max_abs() <= 1e-12);
        prop_assert!(phi_pinch(&b, 0.5).unwrap() <= 1e-24);
        prop_assert_eq!(pinch_deficit(&b, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn index_sets_are_scale_invariant(seed in any::<u64>(), n in 4usize..=8, c in 0.01f64..100.0) {
        let b = form(seed, Dims::new(n, 2));
        let mut rng = stream(seed, 4);
        for _ in 0..32 {
            let u = unit_vector(&mut rng, 2);
            let p = classify(&b, &u, DEFAULT_INDEX_TAU).unwrap();
            let q = classify(&b.scale(c), &u, DEFAULT_INDEX_TAU).unwrap();
            prop_assert_eq!(p.index, q.index);
            prop_assert_eq!(p.membership, q.membership);
        }
    }

    #[test]
    fn regions_are_nested(seed in any::<u64>(), n in 6usize..=8, k in 2usize..=3) {
        let b = form(seed, Dims::new(n, k));
        let q = QuadratureSpec::default_for(k, 256, seed);
        let omega = psi_integral(&b, RegionKind::OmegaBand, &q).unwrap().value;
        let phi = psi_integral(&b, RegionKind::PhiBand, &q).unwrap().value;
        let full = psi_integral(&b, RegionKind::FullSphere, &q).unwrap().value;
        prop_assert!(omega <= phi && phi <= full);
    }

    #[test]
    fn constants_are_monotone_in_each_estimate(e2 in 0.5f64..50.0, e3 in 0.5f64..50.0, bump in 0.0f64..10.0) {
        let base = fake_records(6, 0.5, &[(2, e2), (3, e3)]);
        let raised = fake_records(6, 0.5, &[(2, e2 + bump), (3, e3)]);
        let c0 = derive_constants(6, 0.5, &base).unwrap().c_hat.unwrap();
        let c1 = derive_constants(6, 0.5, &raised).unwrap().c_hat.unwrap();
        prop_assert!(c1 >= c0);
        prop_assert_eq!(c0, constant_term(6, 2, e2).min(constant_term(6, 3, e3)));
    }
}

fn fake_records(n: usize, lambda: f64, eps: &[(usize, f64)]) -> Vec<EstimateRecord> {
    let template = estimate(
        &EstimateJob::new(n, 2, lambda, Variant::Pinch, QuadratureSpec::circle(32))
            .budget(100)
            .restarts(1),
    )
    .unwrap();
    eps.iter()
        .map(|&(k, e)| EstimateRecord {
            k,
            epsilon_hat: e,
            ..template.clone()
        })
        .collect()
}

#[test]
fn circle_rule_converges_on_reference_form() {
    let mut d = vec![-1.0; 7];
    d[0] = 1.0;
    d[1] = 1.0;
    let b = VectorForm::single(&ScalarForm::diagonal(&d), 2, 0).unwrap();
    let a = psi_integral(&b, RegionKind::PhiBand, &QuadratureSpec::circle(1 << 14)).unwrap();
    let c = psi_integral(&b, RegionKind::PhiBand, &QuadratureSpec::circle(1 << 15)).unwrap();
    assert!((a.value - c.value).abs() < 1e-6);
}

#[test]
fn monte_carlo_error_matches_seed_spread() {
    let b = form(77, Dims::new(6, 3));
    let values: Vec<(f64, f64)> = (0..10)
        .map(|s| {
            let v = psi_integral(&b, RegionKind::FullSphere, &QuadratureSpec::monte_carlo(2000, s)).unwrap();
            (v.value, v.error)
        })
        .collect();
    let mean = values.iter().map(|v| v.0).sum::<f64>() / 10.0;
    let sd = (values.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
    let reported = values.iter().map(|v| v.1).sum::<f64>() / 10.0;
    assert!(sd <= 2.0 * reported && reported <= 2.0 * sd, "sd {sd} vs reported {reported}");
}

#[test]
fn catalog_identities() {
    for m in standard_members() {
        let n2h2 = (m.n as f64 * m.mean_curvature()).powi(2);
        assert!((m.scal() - (n2h2 - m.squared_norm())).abs() <= 1e-10);
        let lg = kn_scalar(&l_of(&m.alpha).unwrap(), &ScalarForm::identity(m.n)).unwrap();
        let rebuilt = w_of(&m.alpha).unwrap().add(&lg).unwrap();
        assert!(r_of(&m.alpha).sub(&rebuilt).unwrap().max_abs() <= 1e-12);
    }
}

#[test]
fn morse_invariants_on_catalog() {
    let members = [
        make_umbilic_sphere(5, 2, 1.3).unwrap(),
        make_umbilic_sphere(4, 3, 0.4).unwrap(),
        make_sphere_product(2, 2, 1.0, 1.0).unwrap(),
        make_sphere_product(2, 3, 0.5, 2.0).unwrap(),
        make_sphere_product(3, 3, 1.0, 1.0).unwrap(),
        make_clifford_minimal(2, 4).unwrap(),
    ];
    for m in &members {
        let tc = total_curvature(m, 40_000, 5).unwrap();
        assert!(tc.morse_inequalities_hold(), "{}", m.name);
        assert!(tc.chern_lashof_holds(), "{}", m.name);
        assert!(tc.pipelines_agree(), "{}: {} vs {}", m.name, tc.per_index_sum(), tc.total);
        assert_eq!(euler_check(m, 500, 5).unwrap().mismatches, 0);
    }
}

#[test]
fn planted_nullity_direction_is_found() {
    let b = form_with_nullity(3, Dims::new(6, 2), 2);
    let space = nullity_space(&b, 1e-9);
    let mut e = DVector::zeros(6);
    e[5] = 1.0;
    let proj = space.projector() * &e;
    assert!((proj - e).norm() <= 1e-9);
}

#[test]
fn sphere_volumes_match_gamma_formula() {
    use curvpinch::sphere::sphere_volume;
    use statrs::function::gamma::gamma;
    for m in 0..=20usize {
        let h = (m + 1) as f64 / 2.0;
        let expected = 2.0 * std::f64::consts::PI.powf(h) / gamma(h);
        assert!((sphere_volume(m) - expected).abs() <= 1e-12 * expected, "S^{m}");
    }
}
