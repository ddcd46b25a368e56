//! Upper-bound estimate of ε(n, k, λ) by restarted pattern search, followed
//! by a post-hoc audit on fresh random forms.
//!
//! `cargo run --release --example estimate_epsilon -- 6 2 0.5 5000`

use curvpinch::estimate::{audit_until_clean, estimate, EstimateJob, Variant};
use curvpinch::sphere::QuadratureSpec;

fn main() -> curvpinch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "6").parse().expect("n");
    let k: usize = arg(1, "2").parse().expect("k");
    let lambda: f64 = arg(2, "0.5").parse().expect("lambda");
    let budget: u64 = arg(3, "3000").parse().expect("budget");

    let quad = QuadratureSpec::default_for(k, 256, 1);
    for variant in [Variant::Pinch, Variant::Weyl] {
        if variant.check_dims(curvpinch::forms::Dims::new(n, k)).is_err() {
            continue;
        }
        let rec = estimate(&EstimateJob::new(n, k, lambda, variant, quad).budget(budget).seed(1))?;
        println!(
            "{} ε̂({n},{k},{lambda}) = {:.6} after {} evaluations ({} history points)",
            variant.name(),
            rec.epsilon_hat,
            rec.evaluations,
            rec.history.len()
        );
        let (fin, report, rounds) = audit_until_clean(&rec, 2000, 99)?;
        println!(
            "  audit: {} forms, worst margin {:.3e}, {rounds} round(s), final ε̂ = {:.6}",
            report.samples, report.worst_margin, fin.epsilon_hat
        );
    }
    Ok(())
}
