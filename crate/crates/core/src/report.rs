//! JSON result envelopes, CSV tables and the on-disk record store.
//!
//! Envelopes carry reals as hex floats (see [`crate::hexfloat`]) so payloads
//! round-trip bit-exactly; the `summary` object mirrors the headline numbers
//! in decimal. Every file is written to a temporary sibling and renamed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::InequalityReport;
use crate::error::{Error, Result};
use crate::estimate::{EstimateRecord, TheoremConstants, Variant};
use crate::morse::{EulerCheck, ShiohamaXu, TotalCurvature};
use crate::sphere::QuadMethod;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Estimate,
    Constants,
    Catalog,
    Morse,
    VerifyProps,
}

/// Echo of the command line that produced an envelope.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(with = "crate::hexfloat::vec")]
    pub lambda: Vec<f64>,
    #[serde(with = "crate::hexfloat::vec")]
    pub delta: Vec<f64>,
    pub variant: Option<Variant>,
    pub budget: Option<u64>,
    pub seed: u64,
    pub quad_method: Option<QuadMethod>,
    pub quad_nodes: Option<usize>,
    pub samples: Option<usize>,
    pub member: Option<String>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    #[serde(with = "crate::hexfloat::option")]
    pub r: Option<f64>,
    #[serde(with = "crate::hexfloat::option")]
    pub s: Option<f64>,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub total_curvature: TotalCurvature,
    pub shiohama_xu: Vec<ShiohamaXu>,
    pub euler: EulerCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    Estimate(EstimateRecord),
    Constants(TheoremConstants),
    Inequality(InequalityReport),
    TotalCurvature(MorseReport),
    Properties(Vec<PropertyOutcome>),
}

impl Payload {
    /// Headline numbers in decimal.
    pub fn summary(&self) -> Value {
        match self {
            Payload::Estimate(r) => json!({
                "n": r.n, "k": r.k, "lambda": r.lambda, "variant": r.variant.name(),
                "epsilon_hat": finite_or_null(r.epsilon_hat), "evaluations": r.evaluations,
            }),
            Payload::Constants(c) => json!({
                "n": c.n, "delta": c.delta,
                "c_hat": c.c_hat, "c1_hat": c.c1_hat,
            }),
            Payload::Inequality(r) => json!({
                "member": r.member, "check": r.check, "delta": r.delta,
                "lhs_total": r.lhs_total, "rhs_total": r.rhs_total,
                "margin": r.margin, "satisfied": r.satisfied,
            }),
            Payload::TotalCurvature(m) => json!({
                "member": m.total_curvature.member,
                "tau": m.total_curvature.total, "tau_stderr": m.total_curvature.total_stderr,
                "per_index": m.total_curvature.per_index,
                "euler_mismatches": m.euler.mismatches,
            }),
            Payload::Properties(p) => json!({
                "passed": p.iter().filter(|o| o.passed).count(),
                "failed": p.iter().filter(|o| !o.passed).count(),
            }),
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: String,
    pub timestamp: String,
    pub config: JobConfig,
    pub payload: Payload,
    pub summary: Value,
}

impl Envelope {
    pub fn new(config: JobConfig, payload: Payload) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            summary: payload.summary(),
            config,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(s)?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(Error::Malformed(format!(
                "schema version {} is not {SCHEMA_VERSION}",
                env.schema_version
            )));
        }
        Ok(env)
    }
}

/// Payload bytes alone, which are independent of the timestamp.
pub fn payload_bytes(payload: &Payload) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec(payload)?)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Malformed(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn write_envelope(path: &Path, env: &Envelope) -> Result<()> {
    write_atomic(path, env.to_json()?.as_bytes())
}

pub fn read_envelope(path: &Path) -> Result<Envelope> {
    Envelope::from_json(&fs::read_to_string(path)?)
}

fn float_tag(x: f64) -> String {
    format!("{x}").replace('-', "m")
}

/// File name keyed by `(n, k, λ, variant, quadrature)`; a rerun replaces
/// the earlier file.
pub fn estimate_file_name(r: &EstimateRecord) -> String {
    format!(
        "estimate-{}-n{}-k{}-l{}-{}{}-s{}.json",
        r.variant.name(),
        r.n,
        r.k,
        float_tag(r.lambda),
        r.quad.method,
        r.quad.nodes,
        r.quad.seed
    )
}

pub fn constants_file_name(c: &TheoremConstants) -> String {
    format!("constants-n{}-d{}.json", c.n, float_tag(c.delta))
}

/// Every estimate record stored in `dir`; other envelopes are skipped.
pub fn load_records(dir: &Path) -> Result<Vec<EstimateRecord>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("estimate-"))
        })
        .collect();
    paths.sort();
    for p in paths {
        if let Payload::Estimate(r) = read_envelope(&p)?.payload {
            out.push(r);
        }
    }
    Ok(out)
}

/// Stored constants for `(n, δ)`, if any.
pub fn load_constants(dir: &Path, n: usize, delta: f64) -> Result<Option<TheoremConstants>> {
    let probe = TheoremConstants {
        n,
        delta,
        c_hat: None,
        c1_hat: None,
        per_k: Vec::new(),
    };
    let path = dir.join(constants_file_name(&probe));
    if !path.exists() {
        return Ok(None);
    }
    match read_envelope(&path)?.payload {
        Payload::Constants(c) if c.n == n && c.delta == delta => Ok(Some(c)),
        _ => Err(Error::Malformed(format!("{} does not hold constants", path.display()))),
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateRow {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    pub variant: &'static str,
    pub epsilon_hat: f64,
    pub budget: u64,
    pub evaluations: u64,
    pub seed: u64,
    pub restarts: usize,
    pub quad_method: String,
    pub quad_nodes: usize,
}

impl From<&EstimateRecord> for EstimateRow {
    fn from(r: &EstimateRecord) -> Self {
        EstimateRow {
            n: r.n,
            k: r.k,
            lambda: r.lambda,
            variant: r.variant.name(),
            epsilon_hat: r.epsilon_hat,
            budget: r.budget,
            evaluations: r.evaluations,
            seed: r.seed,
            restarts: r.restarts,
            quad_method: r.quad.method.to_string(),
            quad_nodes: r.quad.nodes,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConstantsRow {
    pub n: usize,
    pub delta: f64,
    pub c_hat: Option<f64>,
    pub c1_hat: Option<f64>,
}

impl From<&TheoremConstants> for ConstantsRow {
    fn from(c: &TheoremConstants) -> Self {
        ConstantsRow {
            n: c.n,
            delta: c.delta,
            c_hat: c.c_hat,
            c1_hat: c.c1_hat,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InequalityRow {
    pub member: String,
    pub check: String,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub curvature_norm_integral: f64,
    pub pinch_integral: f64,
    pub lhs_total: f64,
    pub constant: f64,
    pub betti_sum: u64,
    pub rhs_total: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub hypothesis: String,
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl From<&InequalityReport> for InequalityRow {
    fn from(r: &InequalityReport) -> Self {
        InequalityRow {
            member: r.member.clone(),
            check: kebab(&r.check),
            n: r.n,
            k: r.k,
            delta: r.delta,
            curvature_norm_integral: r.curvature_norm_integral,
            pinch_integral: r.pinch_integral,
            lhs_total: r.lhs_total,
            constant: r.constant,
            betti_sum: r.betti_sum,
            rhs_total: r.rhs_total,
            margin: r.margin,
            satisfied: r.satisfied,
            hypothesis: kebab(&r.hypothesis),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MorseRow {
    pub member: String,
    pub samples: usize,
    pub seed: u64,
    pub tau: f64,
    pub tau_stderr: f64,
    pub per_index_sum: f64,
    pub betti_sum: u64,
    pub chern_lashof: bool,
    pub morse_inequalities: bool,
    pub pipelines_agree: bool,
    pub shiohama_xu_max_relative_error: f64,
    pub euler_mismatches: usize,
}

impl From<&MorseReport> for MorseRow {
    fn from(m: &MorseReport) -> Self {
        let t = &m.total_curvature;
        MorseRow {
            member: t.member.clone(),
            samples: t.samples,
            seed: t.seed,
            tau: t.total,
            tau_stderr: t.total_stderr,
            per_index_sum: t.per_index_sum(),
            betti_sum: t.betti.iter().sum(),
            chern_lashof: t.chern_lashof_holds(),
            morse_inequalities: t.morse_inequalities_hold(),
            pipelines_agree: t.pipelines_agree(),
            shiohama_xu_max_relative_error: m
                .shiohama_xu
                .iter()
                .map(|c| c.relative_error)
                .fold(0.0, f64::max),
            euler_mismatches: m.euler.mismatches,
        }
    }
}

/// Appends rows to a CSV table, writing the header when the file is new.
/// The whole table is rewritten atomically.
pub fn append_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let existing = if path.exists() { fs::read(path)? } else { Vec::new() };
    let mut w = csv::WriterBuilder::new()
        .has_headers(existing.is_empty())
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let fresh = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut all = existing;
    all.extend_from_slice(&fresh);
    write_atomic(path, &all)
}
