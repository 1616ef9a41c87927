use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mimo-coverage"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped(name: &str) -> PathBuf {
    configs().join(format!("{name}.json"))
}

fn exec(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (status.code().unwrap(), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Data rows of a CSV table as (value, metric, method, flag, quantity).
fn rows(csv: &str) -> Vec<(String, String, String, String, String)> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["param", "value", "metric", "std_err", "method", "flag", "quantity"]);
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            let f = |i: usize| r[i].to_string();
            (f(1), f(2), f(4), f(5), f(6))
        })
        .collect()
}

fn metric(rows: &[(String, String, String, String, String)], quantity: &str) -> Vec<f64> {
    rows.iter().filter(|r| r.4 == quantity).map(|r| r.1.parse().unwrap()).collect()
}

#[test]
fn shipped_configs_validate() {
    for name in ["fig1", "fig2", "hetnet_k2", "rayleigh_baseline"] {
        let (code, out, err) = exec(bin().args(["validate", "--config"]).arg(shipped(name)));
        assert_eq!(code, 0, "{name}: {err}");
        assert!(out.starts_with("ok "), "{out}");
        assert!(err.is_empty(), "{name}: {err}");
    }
}

#[test]
fn low_path_loss_exponent_is_a_semantic_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "a.json", r#"{"version": 1, "model": "general", "parameters": {"alpha": 1.5, "gamma": 1, "density": 1e-3}}"#);
    let (code, _, err) = exec(bin().args(["validate", "--config"]).arg(&p));
    assert_eq!(code, 1);
    assert!(err.contains("parameters.alpha: path-loss exponent must exceed 2"), "{err}");
    let (code, _, _) = exec(bin().args(["run", "--config"]).arg(&p));
    assert_eq!(code, 1);
}

#[test]
fn unknown_model_tag_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "m.json", "{\n  \"version\": 1,\n  \"model\": \"femtocell\"\n}");
    let (code, _, err) = exec(bin().args(["validate", "--config"]).arg(&p));
    assert_eq!(code, 1);
    assert!(err.contains("model: unknown variant `femtocell`"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "bad.json", "{\"version\": 1,\n\"model\": \"general\",,}");
    let (code, _, err) = exec(bin().args(["validate", "--config"]).arg(&p));
    assert_eq!(code, 1);
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.csv"));
        let (code, _, err) = exec(
            bin()
                .env("MIMO_COVERAGE_THREADS", threads)
                .args(["run", "--trials", "3000", "--config"])
                .arg(shipped("rayleigh_baseline"))
                .arg("--out")
                .arg(&out),
        );
        assert_eq!(code, 0, "{err}");
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
}

#[test]
fn table_hash_revalidates_against_source() {
    let (code, out, _) = exec(bin().args(["run", "--out", "-", "--config"]).arg(shipped("fig2")));
    assert_eq!(code, 0);
    let hash = out.lines().next().unwrap().strip_prefix("# config_hash: ").unwrap().to_string();
    let (code, _, err) = exec(bin().args(["validate", "--expect-hash", &hash, "--config"]).arg(shipped("fig2")));
    assert_eq!(code, 0, "{err}");
    let (code, _, _) = exec(bin().args(["validate", "--expect-hash", &"0".repeat(64), "--config"]).arg(shipped("fig2")));
    assert_eq!(code, 1);
}

#[test]
fn fig1_capacity_has_interior_maximum() {
    let (code, out, err) = exec(bin().args(["run", "--out", "-", "--config"]).arg(shipped("fig1")));
    assert_eq!(code, 0, "{err}");
    let r = rows(&out);
    let c = metric(&r, "secrecy_capacity");
    assert_eq!(c.len(), 20);
    let best = (0..c.len()).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
    assert!(best > 0 && best < c.len() - 1, "max at index {best}");
    assert!(c[best] > c[0] && c[best] > c[c.len() - 1]);
}

#[test]
fn fig2_bound_column_is_non_decreasing_and_below_one() {
    let (code, out, err) = exec(bin().args(["run", "--out", "-", "--config"]).arg(shipped("fig2")));
    assert_eq!(code, 0, "{err}");
    let r = rows(&out);
    let lb = metric(&r, "coverage_lb");
    assert_eq!(lb.len(), 7);
    assert!(lb.windows(2).all(|w| w[0] <= w[1]), "{lb:?}");
    assert!(lb.iter().all(|&v| (0.0..=1.0).contains(&v)));
    // the second difference only turns negative once Nt is large against |β0|
    assert!(lb[2..].windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= 0.0), "{lb:?}");
}

#[test]
fn both_mode_emits_flagged_pairs() {
    let (code, out, err) = exec(bin().args(["run", "--trials", "4000", "--out", "-", "--config"]).arg(shipped("hetnet_k2")));
    assert_eq!(code, 0, "{err}");
    let r = rows(&out);
    assert_eq!(r.len(), 14);
    for pair in r.chunks(2) {
        assert_eq!(pair[0].0, pair[1].0);
        assert_eq!(pair[0].2, "analytic");
        assert_eq!(pair[1].2, "monte_carlo");
        assert!(pair[1].3 == "agree" || pair[1].3 == "disagree");
    }
}

#[test]
fn sweep_flags_override_the_config_and_json_mirrors_rows() {
    let (code, out, err) = exec(
        bin()
            .args(["sweep", "--param", "gamma_db", "--grid", "-5,0,5", "--format", "json", "--out", "-", "--config"])
            .arg(shipped("fig2")),
    );
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["param"], "gamma_db");
    assert_eq!(rows[0]["value"], -5.0);
    assert_eq!(v["metadata"]["seed"], 2);
    assert_eq!(v["header"][0], "param");
}

#[test]
fn sweep_without_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "s.json", r#"{"version": 1, "model": "general", "parameters": {"alpha": 4, "gamma": 1, "density": 1e-3}}"#);
    let (code, _, err) = exec(bin().args(["sweep", "--config"]).arg(&p));
    assert_eq!(code, 1);
    assert!(err.contains("--param"), "{err}");
    let (code, out, _) = exec(bin().args(["run", "--out", "-", "--config"]).arg(&p));
    assert_eq!(code, 0);
    assert_eq!(rows(&out).len(), 1);
}

#[test]
fn numeric_failure_is_per_row_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "n.json",
        r#"{"version": 1, "model": "general",
            "parameters": {"alpha": 2.0001, "density": 1e-3, "signal_shape": 40},
            "sweep": {"param": "gamma_db", "grid": [0, 80]}}"#,
    );
    let out = dir.path().join("n.csv");
    let (code, _, err) = exec(bin().args(["run", "--config"]).arg(&p).arg("--out").arg(&out));
    assert_eq!(code, 2, "{err}");
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].3, "ok");
    assert!(r[1].3.starts_with("error: "), "{:?}", r[1]);
    assert!(r[1].1.is_empty());
}

#[test]
fn output_path_and_format_come_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("t.json");
    let text = format!(
        r#"{{"version": 1, "model": "general", "parameters": {{"alpha": 4, "gamma": 1, "density": 1e-3}},
            "output": {{"path": {}, "format": "json"}}}}"#,
        serde_json::to_string(&target).unwrap()
    );
    let p = write(&dir, "o.json", &text);
    let (code, out, _) = exec(bin().args(["run", "--config"]).arg(&p));
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["quantity"], "coverage");
}

#[test]
fn bad_usage_and_thread_override_exit_one() {
    let (code, _, _) = exec(bin().arg("run"));
    assert_eq!(code, 1);
    let (code, _, err) = exec(bin().env("MIMO_COVERAGE_THREADS", "zero").args(["validate", "--config"]).arg(shipped("fig1")));
    assert_eq!(code, 1);
    assert!(err.contains("MIMO_COVERAGE_THREADS"));
    let (code, out, _) = exec(bin().arg("--help"));
    assert_eq!(code, 0);
    assert!(out.contains("validate"));
}
