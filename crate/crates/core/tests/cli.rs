use std::path::{Path, PathBuf};
use std::process::Command;

use curvpinch::cli::{merge_constants, EXIT_CONFIG, EXIT_OK};
use curvpinch::estimate::{constant_term, Variant};
use curvpinch::report::{payload_bytes, read_envelope, JobConfig, Payload};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_curvpinch"));
    c.env_remove("CURVPINCH_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> i32 {
    let status = bin().args(args).arg("--out").arg(out).output().unwrap();
    status.status.code().unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/envelope.schema.json");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn assert_valid(path: &Path) {
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{}: {errors:#?}", path.display());
}

fn json_files(dir: &Path, prefix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with(prefix) && name.ends_with(".json")
        })
        .collect();
    v.sort();
    v
}

#[test]
fn inadmissible_k_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let code = run(&["estimate", "--n", "7", "--k", "4", "--lambda", "0.8", "--budget", "200"], dir.path());
    assert_eq!(code, EXIT_CONFIG);
    assert!(json_files(dir.path(), "").is_empty());
}

#[test]
fn lambda_outside_band_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let code = run(&["estimate", "--n", "5", "--k", "2", "--lambda", "0.1", "--budget", "200"], dir.path());
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn constants_without_records_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["constants"], dir.path()), EXIT_CONFIG);
}

#[test]
fn unknown_flags_and_members_are_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["estimate", "--bogus"], dir.path()), EXIT_CONFIG);
    assert_eq!(run(&["morse", "--member", "torus"], dir.path()), EXIT_CONFIG);
    assert_eq!(run(&["catalog", "--member", "sphere-product", "--p", "2", "--q", "2"], dir.path()), EXIT_CONFIG);
}

#[test]
fn estimate_reruns_are_byte_identical_and_valid() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["estimate", "--n", "5", "--k", "2", "--lambda", "0.5,0.8", "--budget", "400", "--seed", "9"];
    assert_eq!(run(&args, a.path()), EXIT_OK);
    assert_eq!(run(&args, b.path()), EXIT_OK);
    let (fa, fb) = (json_files(a.path(), "estimate-"), json_files(b.path(), "estimate-"));
    assert_eq!(fa.len(), 2);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        let (ex, ey) = (read_envelope(x).unwrap(), read_envelope(y).unwrap());
        assert_eq!(payload_bytes(&ex.payload).unwrap(), payload_bytes(&ey.payload).unwrap());
        assert_valid(x);
    }
    let csv = std::fs::read_to_string(a.path().join("estimates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn out_directory_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let status = bin()
        .args(["verify-props", "--samples", "5"])
        .env("CURVPINCH_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let path = dir.path().join("verify-props.json");
    assert_valid(&path);
    match read_envelope(&path).unwrap().payload {
        Payload::Properties(p) => assert!(p.iter().all(|o| o.passed)),
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn merged_constants_take_the_minimum_term() {
    let dir = TempDir::new().unwrap();
    let args = ["estimate", "--n", "8", "--lambda", "0.5", "--budget", "300", "--quad-nodes", "128"];
    assert_eq!(run(&args, dir.path()), EXIT_OK);
    assert_eq!(json_files(dir.path(), "estimate-pinch-n8").len(), 3);

    let out = TempDir::new().unwrap();
    let merged = merge_constants(dir.path(), out.path(), Some(&[8]), None, &JobConfig::default()).unwrap();
    assert_eq!(merged.len(), 1);
    let c = &merged[0];
    let pinch: Vec<_> = c.per_k.iter().filter(|t| t.variant == Variant::Pinch).collect();
    assert_eq!(pinch.iter().map(|t| t.k).collect::<Vec<_>>(), vec![2, 3, 4]);
    let min = pinch
        .iter()
        .map(|t| constant_term(8, t.k, t.epsilon_hat))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(c.c_hat, Some(min));
    assert_eq!(c.c1_hat, None);
    let files = json_files(out.path(), "constants-");
    assert_eq!(files.len(), 1);
    assert_valid(&files[0]);

    // the CLI path agrees with the library path
    assert_eq!(run(&["constants", "--from", dir.path().to_str().unwrap()], out.path()), EXIT_OK);
    match read_envelope(&files[0]).unwrap().payload {
        Payload::Constants(stored) => assert_eq!(stored.c_hat, c.c_hat),
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn catalog_and_morse_envelopes_validate() {
    let dir = TempDir::new().unwrap();
    let args = [
        "catalog", "--member", "sphere-product", "--p", "2", "--q", "2", "--delta", "0.6", "--budget", "300",
    ];
    assert_eq!(run(&args, dir.path()), EXIT_OK);
    let reports = json_files(dir.path(), "catalog-");
    assert!(!reports.is_empty());
    for path in reports.iter().chain(&json_files(dir.path(), "constants-")) {
        assert_valid(path);
    }
    for path in &reports {
        match read_envelope(path).unwrap().payload {
            Payload::Inequality(r) => assert!(r.satisfied, "{r:?}"),
            other => panic!("unexpected payload {other:?}"),
        }
    }

    let args = ["morse", "--member", "umbilic-sphere", "--n", "3", "--samples", "2000"];
    assert_eq!(run(&args, dir.path()), EXIT_OK);
    let files = json_files(dir.path(), "morse-");
    assert_eq!(files.len(), 1);
    assert_valid(&files[0]);
    assert!(dir.path().join("morse.csv").exists());
}
