//! Writing a result envelope with hex-float payload fields and reading it
//! back bit for bit.

use curvpinch::estimate::{estimate, EstimateJob, Variant};
use curvpinch::hexfloat::{from_hex, to_hex};
use curvpinch::report::{estimate_file_name, read_envelope, write_envelope, Envelope, JobConfig, Payload};
use curvpinch::sphere::QuadratureSpec;

fn main() -> curvpinch::Result<()> {
    for x in [1.0, 0.1, -2.5e-310, f64::INFINITY] {
        let h = to_hex(x);
        println!("{x:e} -> {h} -> {:e}", from_hex(&h)?);
    }

    let rec = estimate(&EstimateJob::new(5, 2, 0.5, Variant::Pinch, QuadratureSpec::circle(64)).budget(300))?;
    let dir = std::env::temp_dir().join("curvpinch-envelope-example");
    let path = dir.join(estimate_file_name(&rec));
    write_envelope(&path, &Envelope::new(JobConfig::default(), Payload::Estimate(rec.clone())))?;
    let back = read_envelope(&path)?;
    println!("wrote {}", path.display());
    println!("summary: {}", back.summary);
    if let Payload::Estimate(r) = back.payload {
        println!("ε̂ round trip exact: {}", r.epsilon_hat.to_bits() == rec.epsilon_hat.to_bits());
    }
    Ok(())
}
