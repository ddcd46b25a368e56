//! Integral inequalities evaluated on catalog immersions, with candidate
//! refinement when a check fails.

use curvpinch::catalog::{check_with_refinement, standard_members};
use curvpinch::estimate::{estimate, EstimateJob, Variant};
use curvpinch::sphere::QuadratureSpec;

fn main() -> curvpinch::Result<()> {
    let delta = 0.75;
    for m in standard_members() {
        if delta <= 1.0 / m.n as f64 {
            continue;
        }
        let mut records = Vec::new();
        for variant in [Variant::Pinch, Variant::Weyl] {
            for k in variant.k_range(m.n) {
                let quad = QuadratureSpec::default_for(k, 128, 1);
                records.push(estimate(&EstimateJob::new(m.n, k, delta, variant, quad).budget(500))?);
            }
        }
        let out = check_with_refinement(&m, delta, &mut records, 3)?;
        println!("{} (n={}, k={}, betti {:?})", m.name, m.n, m.k, m.betti);
        for r in &out.reports {
            println!(
                "  {:?}: lhs {:.4} rhs {:.4} margin {:.4} satisfied {}",
                r.check, r.lhs_total, r.rhs_total, r.margin, r.satisfied
            );
        }
        if out.rounds > 0 {
            println!("  refined {} record(s) in {} round(s)", out.refined.len(), out.rounds);
        }
    }
    Ok(())
}
