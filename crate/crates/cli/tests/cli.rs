use std::fs;
use std::path::{Path, PathBuf};

use finvc_cli::{file_digest, main_with_args, Manifest, CURVES_FILE, EXIT_VIOLATION, MANIFEST_FILE, REPORT_FILE};
use serde_json::Value;
use tempfile::TempDir;

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let s = schema(schema_name);
    let v = jsonschema::validator_for(&s).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:#?}");
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

struct Run {
    code: i32,
    out: PathBuf,
}

fn invoke(dir: &TempDir, sub: &str, config_text: &str, extra: &[&str]) -> Run {
    let cfg = dir.path().join(format!("{sub}.toml"));
    fs::write(&cfg, config_text).unwrap();
    let out = dir.path().join(format!("{sub}-out"));
    let mut args = vec![
        "finvc".to_string(),
        sub.to_string(),
        "--config".into(),
        cfg.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    Run { code: main_with_args(args), out }
}

fn check_outputs(run: &Run, report_schema: &str) -> Value {
    let report = read_json(&run.out.join(REPORT_FILE));
    assert_valid(report_schema, &report);
    let manifest = read_json(&run.out.join(MANIFEST_FILE));
    assert_valid("manifest.schema.json", &manifest);
    let m: Manifest = serde_json::from_value(manifest).unwrap();
    for (name, digest) in &m.outputs {
        assert_eq!(&file_digest(&run.out.join(name)).unwrap(), digest, "{name}");
    }
    assert!(m.outputs.contains_key(REPORT_FILE));
    assert!(m.outputs.contains_key(CURVES_FILE));
    report
}

const APPROX: &str = r#"
command = "approx-concentration"
seed = 11
trials = 3000
lambda_grid = [0.1, 0.4]
[domain]
source = "cube"
m = 40
[hypothesis]
kind = "random"
count = 6
"#;

const UNIFORM: &str = r#"
command = "uniform-convergence"
seed = 5
trials = 400
n_grid = [8, 32]
lambda_grid = [0.2]
[domain]
source = "cube"
m = 6
[hypothesis]
kind = "explicit"
classifiers = ["++++++", "+-+-+-", "------"]
[sampling]
p0 = 0.7
"#;

#[test]
fn growth_on_the_square() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "growth"
seed = 1
[domain]
source = "inline"
points = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
[hypothesis]
kind = "halfspace"
"#;
    let run = invoke(&dir, "growth", cfg, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "growth-report.schema.json");
    assert_eq!(r["record"]["count"], 14);
    assert_eq!(r["record"]["cover_count"], "14");
    assert_eq!(r["consistent"], true);
}

#[test]
fn vc_dim_of_the_line() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "vc-dim"
seed = 2
[domain]
source = "inline"
points = [[0.0], [1.0], [2.5], [3.0], [4.2], [5.0], [6.1], [7.0]]
[hypothesis]
kind = "halfspace"
"#;
    let run = invoke(&dir, "vc-dim", cfg, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "vc-dim-report.schema.json");
    assert_eq!(r["vc_dimension"], 2);
    assert_eq!(r["lower_bound_only"], false);
}

#[test]
fn approx_report_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let run = invoke(&dir, "approx-concentration", APPROX, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "concentration-report.schema.json");
    assert_eq!(r["mu_used"].as_f64(), Some(2.0));
    let csv = fs::read_to_string(run.out.join(CURVES_FILE)).unwrap();
    assert!(csv.starts_with("event,n,lambda,trials,successes,empirical_freq,"));
    // an explicit grid is used as given: two events per lambda
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}

#[test]
fn uniform_report_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let run = invoke(&dir, "uniform-convergence", UNIFORM, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "concentration-report.schema.json");
    assert_eq!(r["deviation"]["n"], serde_json::json!([8, 32]));
}

#[test]
fn bd_check_is_exact_on_small_cubes() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "bd-check"
seed = 3
trials = 50
[domain]
source = "cube"
m = 5
[hypothesis]
kind = "explicit"
classifiers = ["+++++", "+-+--"]
"#;
    let run = invoke(&dir, "bd-check", cfg, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "bd-report.schema.json");
    assert_eq!(r["exhaustive"], true);
    assert_eq!(r["violated"], false);
    for rep in r["reports"].as_array().unwrap() {
        assert_eq!(rep["eta"]["exact"], true);
    }
}

#[test]
fn bounds_table_small_example() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "bounds-table"
[bounds]
m_grid = [16, 1000]
d_v = 3
"#;
    let run = invoke(&dir, "bounds-table", cfg, &[]);
    assert_eq!(run.code, 0);
    let r = check_outputs(&run, "bounds-table-report.schema.json");
    let row = &r["rows"][0];
    assert_eq!(row["vc_poly"], "65536");
    assert_eq!(row["sauer_shelah_sum"], "697");
}

#[test]
fn manifest_rerun_is_byte_identical_across_threads() {
    let dir = TempDir::new().unwrap();
    // no seed and the default lambda grid: the generated seed and the
    // appended m^{-1/4} must both survive the JSON round trip
    let cfg = APPROX.replace("seed = 11\n", "").replace("lambda_grid = [0.1, 0.4]\n", "");
    let first = invoke(&dir, "approx-concentration", &cfg, &["--threads", "1"]);
    assert_eq!(first.code, 0);
    let manifest = first.out.join(MANIFEST_FILE);
    let want_report = fs::read(first.out.join(REPORT_FILE)).unwrap();
    let want_curves = fs::read(first.out.join(CURVES_FILE)).unwrap();
    for threads in ["1", "4", "8"] {
        let out = dir.path().join(format!("rerun-{threads}"));
        let code = main_with_args([
            "finvc",
            "approx-concentration",
            "--config",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(code, 0);
        assert_eq!(fs::read(out.join(REPORT_FILE)).unwrap(), want_report, "threads {threads}");
        assert_eq!(fs::read(out.join(CURVES_FILE)).unwrap(), want_curves, "threads {threads}");
    }
}

#[test]
fn uniform_rerun_is_byte_identical_across_threads() {
    let dir = TempDir::new().unwrap();
    let mut digests = Vec::new();
    for threads in ["1", "4", "8"] {
        let run = invoke(&dir, "uniform-convergence", UNIFORM, &["--threads", threads]);
        assert_eq!(run.code, 0);
        let m: Manifest = serde_json::from_value(read_json(&run.out.join(MANIFEST_FILE))).unwrap();
        digests.push(m.outputs);
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0], digests[2]);
}

#[test]
fn invalid_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "approx-concentration"
trials = 0
lambda_grid = [-1.0]
[domain]
source = "cube"
m = 0
"#;
    let run = invoke(&dir, "approx-concentration", cfg, &[]);
    assert_eq!(run.code, 2);
    assert!(!run.out.join(MANIFEST_FILE).exists());
}

#[test]
fn unknown_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let run = invoke(&dir, "approx-concentration", &format!("{APPROX}\ntrails = 5\n"), &[]);
    assert_eq!(run.code, 2);
}

#[test]
fn mismatched_subcommand_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("a.toml");
    fs::write(&cfg, APPROX).unwrap();
    let code = main_with_args(["finvc", "growth", "--config", cfg.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_input_file_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "growth"
[domain]
source = "file"
path = "does-not-exist.csv"
[hypothesis]
kind = "halfspace"
"#;
    let run = invoke(&dir, "growth", cfg, &[]);
    assert_eq!(run.code, 2);
}

// With a loss of range b < 1 the b^4 exponent overstates the tail, so the
// printed variant is flagged while the b^2 variant holds.
#[test]
fn small_loss_range_flags_the_printed_variant() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
command = "uniform-convergence"
seed = 9
trials = 2000
n_grid = [16]
lambda_grid = [0.01]
[domain]
source = "cube"
m = 4
[hypothesis]
kind = "explicit"
classifiers = ["++++", "+-+-"]
[sampling]
p0 = 0.5
loss = [[0.0, 0.1], [0.1, 0.0]]
"#;
    let run = invoke(&dir, "uniform-convergence", cfg, &[]);
    assert_eq!(run.code, EXIT_VIOLATION);
    let r = check_outputs(&run, "concentration-report.schema.json");
    let printed = r["violated_printed"].as_array().unwrap();
    let derived = r["violated_derived"].as_array().unwrap();
    assert_eq!(printed[0], true);
    assert!(derived.iter().all(|v| v == false));
    let m = read_json(&run.out.join(MANIFEST_FILE));
    assert_eq!(m["violated"], true);
}

#[test]
fn json_only_format_skips_csv() {
    let dir = TempDir::new().unwrap();
    let run = invoke(&dir, "approx-concentration", APPROX, &["--format", "json"]);
    assert_eq!(run.code, 0);
    assert!(run.out.join(REPORT_FILE).exists());
    assert!(!run.out.join(CURVES_FILE).exists());
    let m: Manifest = serde_json::from_value(read_json(&run.out.join(MANIFEST_FILE))).unwrap();
    assert_eq!(m.outputs.len(), 1);
}
