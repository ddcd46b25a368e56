//! Height-function critical points, total curvature per index and the
//! Chern–Lashof and Morse inequalities on catalog members.

use curvpinch::catalog::{make_clifford_minimal, make_sphere_product, make_umbilic_sphere};
use curvpinch::morse::{critical_points, euler_check, shiohama_xu_check, total_curvature};
use curvpinch::sampling::{stream, unit_vector};

fn main() -> curvpinch::Result<()> {
    let members = [
        make_umbilic_sphere(4, 2, 1.0)?,
        make_sphere_product(2, 2, 1.0, 1.0)?,
        make_clifford_minimal(2, 3)?,
    ];
    for m in &members {
        let u = unit_vector(&mut stream(1, 0), m.ambient_dim());
        let cp = critical_points(m, &u)?;
        println!("{}: {} critical points, alternating count {}", m.name, cp.points.len(), cp.euler_sum());

        let tc = total_curvature(m, 200_000, 1)?;
        println!("  τ = {:.4} ± {:.4}, betti {:?}", tc.total, tc.total_stderr, tc.betti);
        println!("  τ_i = {:?}", tc.per_index.iter().map(|t| format!("{t:.3}")).collect::<Vec<_>>());
        println!(
            "  Chern–Lashof {}, Morse inequalities {}, pipelines agree {}",
            tc.chern_lashof_holds(),
            tc.morse_inequalities_hold(),
            tc.pipelines_agree()
        );
        let sx = shiohama_xu_check(m, 0, 200_000, 1)?;
        println!("  index-0 normal-bundle integral {:.4} vs {:.4} (rel. error {:.2e})", sx.lhs, sx.rhs, sx.relative_error);
        println!("  euler mismatches over 500 directions: {}", euler_check(m, 500, 1)?.mismatches);
    }
    Ok(())
}
