//! Command-line front end. `run` never panics on bad input; it maps errors to
//! exit codes: 0 success, 1 a property check failed, 2 configuration or
//! admissibility error, 3 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::catalog::{
    check_with_refinement, make_clifford_minimal, make_sphere_product, make_umbilic_sphere, CatalogImmersion,
};
use crate::error::{Error, Result};
use crate::estimate::{
    derive_constants, estimate, EstimateJob, EstimateRecord, Objective, TheoremConstants, Variant,
    DEFAULT_BUDGET,
};
use crate::forms::Dims;
use crate::morse::{euler_check, shiohama_xu_check, total_curvature};
use crate::report::{
    append_csv, constants_file_name, estimate_file_name, load_records, write_envelope,
    Command, ConstantsRow, Envelope, EstimateRow, InequalityRow, JobConfig, MorseReport, MorseRow,
    Payload,
};
use crate::sphere::{QuadMethod, QuadratureSpec};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CURVPINCH_OUT";
pub const DEFAULT_OUT: &str = "curvpinch-out";
pub const DEFAULT_QUAD_NODES: usize = 256;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const EULER_DIRECTIONS: usize = 1000;
const REFINE_ROUNDS: usize = 3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "curvpinch", version, about = "Pinching constants, catalog checks and total curvature")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Estimate ε̂ for every (n, k, λ) combination.
    Estimate(EstimateArgs),
    /// Merge stored estimates into theorem constants.
    Constants(ConstantsArgs),
    /// Evaluate the integral inequalities on a catalog member.
    Catalog(MemberArgs),
    /// Total curvature and Morse counts of a catalog member.
    Morse(MemberArgs),
    /// Run the built-in property fixtures.
    VerifyProps(VerifyArgs),
}

#[derive(Clone, Debug)]
struct IntList(Vec<usize>);

#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

/// Comma-separated integers; `a..b` is an inclusive range.
fn parse_ints(s: &str) -> std::result::Result<IntList, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.parse().map_err(|_| format!("bad range start in {item:?}"))?;
            let b: usize = b.parse().map_err(|_| format!("bad range end in {item:?}"))?;
            if a > b {
                return Err(format!("empty range {item:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| format!("not an integer: {item:?}"))?);
        }
    }
    Ok(IntList(out))
}

fn parse_floats(s: &str) -> std::result::Result<FloatList, String> {
    s.split(',')
        .map(str::trim)
        .map(|x| x.parse::<f64>().map_err(|_| format!("not a number: {x:?}")))
        .collect::<std::result::Result<_, _>>()
        .map(FloatList)
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory; defaults to $CURVPINCH_OUT, then ./curvpinch-out.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[derive(Args, Debug)]
struct QuadArgs {
    #[arg(long)]
    quad_method: Option<QuadMethod>,
    #[arg(long)]
    quad_nodes: Option<usize>,
}

impl QuadArgs {
    fn spec(&self, k: usize, seed: u64) -> QuadratureSpec {
        let nodes = self.quad_nodes.unwrap_or(DEFAULT_QUAD_NODES);
        match self.quad_method {
            Some(QuadMethod::CircleComposite) => QuadratureSpec::circle(nodes),
            Some(QuadMethod::SphereMonteCarlo) => QuadratureSpec::monte_carlo(nodes, seed),
            None => QuadratureSpec::default_for(k, nodes, seed),
        }
    }
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_parser = parse_ints)]
    n: IntList,
    /// Defaults to every admissible k for the variant.
    #[arg(long, value_parser = parse_ints)]
    k: Option<IntList>,
    #[arg(long, value_parser = parse_floats)]
    lambda: FloatList,
    #[arg(long, default_value = "pinch")]
    variant: Variant,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Restrict to these n; defaults to every n found.
    #[arg(long, value_parser = parse_ints)]
    n: Option<IntList>,
    #[arg(long, value_parser = parse_floats)]
    delta: Option<FloatList>,
    /// Directory holding estimate envelopes; defaults to the output directory.
    #[arg(long)]
    from: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MemberArgs {
    /// umbilic-sphere, sphere-product or clifford-minimal.
    #[arg(long)]
    member: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    delta: Option<FloatList>,
    /// Budget for constants that have to be estimated first.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Random forms per property.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

/// Parses `argv` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Cmd::Estimate(a) => run_estimate(&a),
        Cmd::Constants(a) => run_constants(&a),
        Cmd::Catalog(a) => run_catalog(&a),
        Cmd::Morse(a) => run_morse(&a),
        Cmd::VerifyProps(a) => run_verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_IO
            }
        }
    }
}

fn base_config(command: Command, output: &Output) -> JobConfig {
    JobConfig {
        command: Some(command),
        seed: output.seed,
        out: output.dir(),
        ..JobConfig::default()
    }
}

fn estimate_jobs(a: &EstimateArgs) -> Result<Vec<EstimateJob>> {
    let mut jobs = Vec::new();
    for &n in &a.n.0 {
        let ks: Vec<usize> = match &a.k {
            Some(ks) => ks.0.clone(),
            None => a.variant.k_range(n).collect(),
        };
        if ks.is_empty() {
            return Err(Error::Inadmissible(format!(
                "no admissible k for n = {n} and variant {}",
                a.variant.name()
            )));
        }
        for &k in &ks {
            for &lambda in &a.lambda.0 {
                let quad = a.quad.spec(k, a.output.seed);
                Objective::new(Dims::new(n, k), lambda, a.variant, quad)?;
                jobs.push(
                    EstimateJob::new(n, k, lambda, a.variant, quad)
                        .budget(a.budget)
                        .seed(a.output.seed),
                );
            }
        }
    }
    Ok(jobs)
}

fn store_record(dir: &Path, config: &JobConfig, rec: &EstimateRecord) -> Result<()> {
    let env = Envelope::new(config.clone(), Payload::Estimate(rec.clone()));
    write_envelope(&dir.join(estimate_file_name(rec)), &env)?;
    append_csv(&dir.join("estimates.csv"), &[EstimateRow::from(rec)])
}

fn store_constants(dir: &Path, config: &JobConfig, c: &TheoremConstants) -> Result<()> {
    let env = Envelope::new(config.clone(), Payload::Constants(c.clone()));
    write_envelope(&dir.join(constants_file_name(c)), &env)?;
    append_csv(&dir.join("constants.csv"), &[ConstantsRow::from(c)])
}

fn run_estimate(a: &EstimateArgs) -> Result<i32> {
    // validate everything before spending any budget
    let jobs = estimate_jobs(a)?;
    let dir = a.output.dir();
    for job in jobs {
        let rec = estimate(&job)?;
        let config = JobConfig {
            n: vec![job.dims.n],
            k: vec![job.dims.k],
            lambda: vec![job.lambda],
            variant: Some(job.variant),
            budget: Some(job.budget),
            quad_method: Some(job.quad.method),
            quad_nodes: Some(job.quad.nodes),
            ..base_config(Command::Estimate, &a.output)
        };
        store_record(&dir, &config, &rec)?;
        println!(
            "estimate {} n={} k={} lambda={} eps_hat={:.6} evaluations={}",
            rec.variant.name(),
            rec.n,
            rec.k,
            rec.lambda,
            rec.epsilon_hat,
            rec.evaluations
        );
    }
    Ok(EXIT_OK)
}

/// Derives and stores constants for every requested `(n, δ)` present in the
/// records under `from`.
pub fn merge_constants(
    from: &Path,
    out: &Path,
    ns: Option<&[usize]>,
    deltas: Option<&[f64]>,
    config: &JobConfig,
) -> Result<Vec<TheoremConstants>> {
    let records = load_records(from)?;
    if records.is_empty() {
        return Err(Error::Coverage(format!("no estimate records in {}", from.display())));
    }
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for r in &records {
        let key = (r.n, r.lambda);
        let wanted = ns.is_none_or(|ns| ns.contains(&r.n)) && deltas.is_none_or(|ds| ds.contains(&r.lambda));
        if wanted && !keys.contains(&key) {
            keys.push(key);
        }
    }
    if keys.is_empty() {
        return Err(Error::Coverage("no records match the requested n / delta".into()));
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out_constants = Vec::new();
    for (n, delta) in keys {
        let c = derive_constants(n, delta, &records)?;
        let cfg = JobConfig {
            n: vec![n],
            delta: vec![delta],
            ..config.clone()
        };
        store_constants(out, &cfg, &c)?;
        out_constants.push(c);
    }
    Ok(out_constants)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), |v| format!("{v:.6}"))
}

fn run_constants(a: &ConstantsArgs) -> Result<i32> {
    let out = a.output.dir();
    let from = a.from.clone().unwrap_or_else(|| out.clone());
    let config = base_config(Command::Constants, &a.output);
    for c in merge_constants(&from, &out, a.n.as_ref().map(|v| &v.0[..]), a.delta.as_ref().map(|v| &v.0[..]), &config)? {
        println!(
            "constants n={} delta={} c_hat={} c1_hat={}",
            c.n,
            c.delta,
            fmt_opt(c.c_hat),
            fmt_opt(c.c1_hat)
        );
    }
    Ok(EXIT_OK)
}

fn build_member(a: &MemberArgs) -> Result<CatalogImmersion> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Error::OutOfRange(format!("--{flag} is required for {}", a.member)))
    };
    match a.member.as_str() {
        "umbilic-sphere" => make_umbilic_sphere(need(a.n, "n")?, a.k.unwrap_or(2), a.r.unwrap_or(1.0)),
        "sphere-product" => make_sphere_product(
            need(a.p, "p")?,
            need(a.q, "q")?,
            a.r.unwrap_or(1.0),
            a.s.unwrap_or(1.0),
        ),
        "clifford-minimal" => make_clifford_minimal(need(a.p, "p")?, need(a.q, "q")?),
        other => Err(Error::Unsupported(format!(
            "unknown member {other:?}; expected umbilic-sphere, sphere-product or clifford-minimal"
        ))),
    }
}

fn member_config(command: Command, a: &MemberArgs, m: &CatalogImmersion) -> JobConfig {
    JobConfig {
        member: Some(a.member.clone()),
        n: vec![m.n],
        k: vec![m.k],
        p: a.p,
        q: a.q,
        r: a.r,
        s: a.s,
        delta: a.delta.clone().map(|d| d.0).unwrap_or_default(),
        budget: Some(a.budget),
        samples: a.samples,
        quad_method: a.quad.quad_method,
        quad_nodes: a.quad.quad_nodes,
        ..base_config(command, &a.output)
    }
}

/// Stored records for `(n, δ)`, estimating every missing one first.
fn records_for(a: &MemberArgs, n: usize, delta: f64, config: &JobConfig) -> Result<Vec<EstimateRecord>> {
    let dir = a.output.dir();
    let mut records: Vec<EstimateRecord> = load_records(&dir)?
        .into_iter()
        .filter(|r| r.n == n && r.lambda == delta)
        .collect();
    for variant in [Variant::Pinch, Variant::Weyl] {
        for k in variant.k_range(n) {
            if records.iter().any(|r| r.variant == variant && r.k == k) {
                continue;
            }
            let quad = a.quad.spec(k, a.output.seed);
            let job = EstimateJob::new(n, k, delta, variant, quad)
                .budget(a.budget)
                .seed(a.output.seed);
            let rec = estimate(&job)?;
            store_record(&dir, config, &rec)?;
            println!(
                "estimate {} n={n} k={k} lambda={delta} eps_hat={:.6}",
                variant.name(),
                rec.epsilon_hat
            );
            records.push(rec);
        }
    }
    Ok(records)
}

fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' })
        .collect();
    s.split('-').filter(|p| !p.is_empty()).collect::<Vec<_>>().join("-")
}

fn run_catalog(a: &MemberArgs) -> Result<i32> {
    let m = build_member(a)?;
    let deltas = a
        .delta
        .clone()
        .map(|d| d.0)
        .ok_or_else(|| Error::OutOfRange("--delta is required for catalog".into()))?;
    let config = member_config(Command::Catalog, a, &m);
    let dir = a.output.dir();
    for delta in deltas {
        let nf = m.n as f64;
        if !(delta > 1.0 / nf && delta < 1.0) {
            return Err(Error::OutOfRange(format!("delta must lie in (1/n, 1), got {delta}")));
        }
        let mut records = records_for(a, m.n, delta, &config)?;
        let before: Vec<f64> = records.iter().map(|r| r.epsilon_hat).collect();
        let checked = check_with_refinement(&m, delta, &mut records, REFINE_ROUNDS)?;
        for &i in &checked.refined {
            let r = &records[i];
            store_record(&dir, &config, r)?;
            println!(
                "refine {} n={} k={} lambda={delta} eps_hat {:.6} -> {:.6}",
                r.variant.name(),
                r.n,
                r.k,
                before[i],
                r.epsilon_hat
            );
        }
        store_constants(&dir, &config, &checked.constants)?;
        let reports = checked.reports;
        if reports.is_empty() {
            return Err(Error::Inadmissible(format!("no inequality applies to {}", m.name)));
        }
        for r in &reports {
            let check = serde_json::to_value(r.check)?;
            let check = check.as_str().unwrap_or_default();
            let env = Envelope::new(config.clone(), Payload::Inequality(r.clone()));
            let name = format!("catalog-{}-{check}-d{delta}.json", slug(&m.name));
            write_envelope(&dir.join(name), &env)?;
            append_csv(&dir.join("catalog.csv"), &[InequalityRow::from(r)])?;
            println!(
                "catalog {} {check} delta={delta} lhs={:.6} rhs={:.6} margin={:.6} satisfied={}",
                m.name, r.lhs_total, r.rhs_total, r.margin, r.satisfied
            );
        }
    }
    Ok(EXIT_OK)
}

pub fn morse_report(m: &CatalogImmersion, samples: usize, seed: u64) -> Result<MorseReport> {
    let tc = total_curvature(m, samples, seed)?;
    let shiohama_xu = (0..=m.n)
        .map(|i| shiohama_xu_check(m, i, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let euler = euler_check(m, EULER_DIRECTIONS, seed)?;
    Ok(MorseReport {
        total_curvature: tc,
        shiohama_xu,
        euler,
    })
}

fn run_morse(a: &MemberArgs) -> Result<i32> {
    let m = build_member(a)?;
    let samples = a.samples.unwrap_or(DEFAULT_SAMPLES);
    let config = member_config(Command::Morse, a, &m);
    let report = morse_report(&m, samples, a.output.seed)?;
    let dir = a.output.dir();
    let row = MorseRow::from(&report);
    let env = Envelope::new(config, Payload::TotalCurvature(report));
    write_envelope(&dir.join(format!("morse-{}.json", slug(&m.name))), &env)?;
    append_csv(&dir.join("morse.csv"), &[&row])?;
    println!(
        "morse {} tau={:.6} ± {:.2e} betti_sum={} chern_lashof={} morse_inequalities={} euler_mismatches={}",
        row.member,
        row.tau,
        row.tau_stderr,
        row.betti_sum,
        row.chern_lashof,
        row.morse_inequalities,
        row.euler_mismatches
    );
    Ok(EXIT_OK)
}

fn run_verify(a: &VerifyArgs) -> Result<i32> {
    let outcomes = crate::props::run_all(a.samples, a.output.seed);
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let all = outcomes.iter().all(|o| o.passed);
    let config = JobConfig {
        samples: Some(a.samples),
        ..base_config(Command::VerifyProps, &a.output)
    };
    let dir = a.output.dir();
    let env = Envelope::new(config, Payload::Properties(outcomes));
    write_envelope(&dir.join("verify-props.json"), &env)?;
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_ints("2,4..6").unwrap().0, vec![2, 4, 5, 6]);
        assert!(parse_ints("5..3").is_err());
        assert!(parse_ints("x").is_err());
        assert_eq!(parse_floats("0.3, 0.5").unwrap().0, vec![0.3, 0.5]);
        assert!(parse_floats("0.3,,").is_err());
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("sphere-product(p=2,q=2,r=1,s=1)"), "sphere-product-p-2-q-2-r-1-s-1");
    }

    #[test]
    fn bad_flags_exit_2() {
        assert_eq!(run(["curvpinch", "estimate", "--bogus"]), EXIT_CONFIG);
        assert_eq!(run(["curvpinch", "estimate", "--n", "7", "--lambda", "0.5", "--variant", "nope"]), EXIT_CONFIG);
        assert_eq!(run(["curvpinch", "--help"]), EXIT_OK);
    }
}
