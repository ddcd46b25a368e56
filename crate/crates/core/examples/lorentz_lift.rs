//! The Lorentzian lift (β, ⟨,⟩, −L) is flat exactly when the Weyl part of β
//! vanishes.

use curvpinch::curvature::{l_of, w_of};
use curvpinch::forms::{is_flat, lift_lorentz, Dims, VectorForm, DEFAULT_TOL};
use curvpinch::sampling::{gaussian_form, stream};

fn main() -> curvpinch::Result<()> {
    let forms = [
        ("umbilic", VectorForm::umbilic(5, &[0.6, 0.8])),
        ("random", gaussian_form(&mut stream(11, 0), Dims::new(5, 2))),
    ];
    for (name, beta) in &forms {
        let lift = lift_lorentz(beta, &l_of(beta)?)?;
        let (flat, residual) = is_flat(&lift, DEFAULT_TOL);
        println!("{name}: ‖W‖ = {:.3e}, lift flat {flat} (residual {residual:.3e})", w_of(beta)?.norm());
    }
    Ok(())
}
