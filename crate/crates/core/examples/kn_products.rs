//! Kulkarni–Nomizu products, the curvature tensor of a form and flatness.

use curvpinch::curvature::r_of;
use curvpinch::forms::{is_flat, kn_scalar, kn_vector, nullity_space, Dims, ScalarForm, VectorForm, DEFAULT_TOL};
use curvpinch::sampling::{gaussian_form, stream};

fn main() -> curvpinch::Result<()> {
    let g = ScalarForm::identity(4);
    let gg = kn_scalar(&g, &g)?;
    println!("(g∧g)(e0,e1,e0,e1) = {}", gg.get(0, 1, 0, 1));

    let beta = gaussian_form(&mut stream(7, 0), Dims::new(5, 2));
    let bb = kn_vector(&beta, &beta)?;
    let r = r_of(&beta);
    println!("max |½β∧β − R(β)| = {:.2e}", bb.scale(0.5).sub(&r)?.max_abs());
    println!("symmetry defect of R(β) = {:.2e}", r.symmetry_defect());

    let (flat, residual) = is_flat(&beta, DEFAULT_TOL);
    println!("random form flat: {flat} (residual {residual:.3})");

    // a rank-one form x ↦ ⟨v,x⟩²η is flat and has a large nullity space
    let v = ScalarForm::diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0]);
    let rank_one = VectorForm::single(&v, 2, 1)?;
    let (flat, residual) = is_flat(&rank_one, DEFAULT_TOL);
    println!("rank-one form flat: {flat} (residual {residual:e})");
    println!("nullity dimension: {}", nullity_space(&rank_one, DEFAULT_TOL).dim());
    Ok(())
}
