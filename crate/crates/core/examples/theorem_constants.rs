//! Theorem constants from a table of estimates: each admissible k gives a
//! term 2(ε̂/2)^{n/4}Vol(S^{n+k−1}) and the constant is the smallest term.

use curvpinch::estimate::{derive_constants, estimate, EstimateJob, Variant};
use curvpinch::sphere::QuadratureSpec;

fn main() -> curvpinch::Result<()> {
    let (n, delta) = (8, 0.5);
    let mut records = Vec::new();
    for variant in [Variant::Pinch, Variant::Weyl] {
        for k in variant.k_range(n) {
            let quad = QuadratureSpec::default_for(k, 128, 1);
            records.push(estimate(&EstimateJob::new(n, k, delta, variant, quad).budget(1000))?);
        }
    }
    let c = derive_constants(n, delta, &records)?;
    for t in &c.per_k {
        println!("{:>5} k={} ε̂ = {:9.4}  term = {:.6e}", t.variant.name(), t.k, t.epsilon_hat, t.term);
    }
    println!("ĉ = {:?}", c.c_hat);
    println!("ĉ₁ = {:?}", c.c1_hat);
    Ok(())
}
