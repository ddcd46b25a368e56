//! Ricci, scalar, Schouten and Weyl parts of the curvature of a form, and
//! the two pinching functionals.

use curvpinch::curvature::{l_of, phi_pinch, phi_weyl, pinch_deficit, r_of, ric_of, scal_of, w_of};
use curvpinch::forms::{kn_scalar, Dims, ScalarForm, VectorForm};
use curvpinch::sampling::{gaussian_form, stream};

fn main() -> curvpinch::Result<()> {
    let beta = gaussian_form(&mut stream(3, 0), Dims::new(6, 2));
    let n = beta.n();

    let scal = scal_of(&beta);
    println!("scal = {scal:.6}, |tr β|² − ‖β‖² = {:.6}", beta.trace().norm_squared() - beta.norm_sq());
    println!("tr Ric = {:.6}", ric_of(&beta).trace());

    let w = w_of(&beta)?;
    let lg = kn_scalar(&l_of(&beta)?, &ScalarForm::identity(n))?;
    println!("max |R − (W + L∧g)| = {:.2e}", r_of(&beta).sub(&w.add(&lg)?)?.max_abs());
    println!("max |tr W| = {:.2e}", w.contract_13().amax());

    for lambda in [0.3, 0.5, 0.8] {
        println!(
            "λ = {lambda}: deficit {:.4}, φ_pinch {:.4}, φ_weyl {:.4}",
            pinch_deficit(&beta, lambda)?,
            phi_pinch(&beta, lambda)?,
            phi_weyl(&beta, lambda)?
        );
    }

    let umbilic = VectorForm::umbilic(n, &[1.0, 0.0]);
    println!("umbilic: ‖W‖ = {:.1e}, φ_pinch = {:.1e}", w_of(&umbilic)?.norm(), phi_pinch(&umbilic, 0.5)?);
    Ok(())
}
