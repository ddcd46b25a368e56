//! Index classification of normal directions and the banded determinant
//! integral ψ, on the circle rule and by Monte Carlo.

use curvpinch::estimate::reference_form;
use curvpinch::forms::Dims;
use curvpinch::sampling::{gaussian_form, stream};
use curvpinch::sphere::{classify, psi_integral, QuadratureSpec, RegionKind, DEFAULT_INDEX_TAU};
use nalgebra::DVector;

fn main() -> curvpinch::Result<()> {
    let beta = reference_form(Dims::new(7, 2));
    for theta in [0.0, 1.0, std::f64::consts::FRAC_PI_2, 3.0] {
        let u = DVector::from_vec(vec![f64::cos(theta), f64::sin(theta)]);
        let p = classify(&beta, &u, DEFAULT_INDEX_TAU)?;
        println!("θ = {theta:.3}: index {}, regions {:?}", p.index, p.membership);
    }
    for nodes in [64, 256, 4096] {
        let v = psi_integral(&beta, RegionKind::PhiBand, &QuadratureSpec::circle(nodes))?;
        println!("ψ over Φ with {nodes:>4} nodes = {:.12} (exact 64/35 = {:.12})", v.value, 64.0 / 35.0);
    }

    let generic = gaussian_form(&mut stream(5, 0), Dims::new(8, 3));
    for region in [RegionKind::OmegaBand, RegionKind::PhiBand, RegionKind::FullSphere] {
        let v = psi_integral(&generic, region, &QuadratureSpec::monte_carlo(20_000, 1))?;
        println!("{region:?}: {:.5} ± {:.5}", v.value, v.error);
    }
    Ok(())
}
