//! Recovering the umbilic direction and subspace of forms with constant
//! curvature or vanishing Weyl part.

use curvpinch::curvature::{decompose_conformally_flat, decompose_umbilic, scal_of, w_of};
use curvpinch::forms::{VectorForm, DEFAULT_TOL};
use nalgebra::DMatrix;

fn main() -> curvpinch::Result<()> {
    // β = 2⟨,⟩ξ₁ on V₁ = span(e0..e3), plus a flat block on e4 along ξ₂
    let n = 5;
    let mut a = DMatrix::identity(n, n) * 2.0;
    let mut b = DMatrix::zeros(n, n);
    a[(4, 4)] = 2.0;
    b[(4, 4)] = 1.5;
    let beta = VectorForm::from_matrices(vec![a, b])?;
    println!("scal/(n(n−1)) = {}", scal_of(&beta) / 20.0);

    let d = decompose_umbilic(&beta, DEFAULT_TOL);
    println!("umbilic: status {:?}, ξ = {:?}, μ = {:.6}, dim V₁ = {}, residual {:.1e}", d.status, d.xi.as_slice(), d.mu, d.v1.dim(), d.residual);

    let mut c = DMatrix::identity(6, 6);
    c[(5, 5)] = 3.0;
    let conformal = VectorForm::from_matrices(vec![c, DMatrix::zeros(6, 6)])?;
    println!("‖W‖ = {:.1e}", w_of(&conformal)?.norm());
    let d = decompose_conformally_flat(&conformal, DEFAULT_TOL);
    println!("conformally flat: status {:?}, ξ = {:?}, dim V₁ = {}, residual {:.1e}", d.status, d.xi.as_slice(), d.v1.dim(), d.residual);
    Ok(())
}
