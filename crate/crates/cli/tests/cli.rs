use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bsseries::rational::ratio;
use bsseries::{SeriesSolution, YPolynomial};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bsseries"))
}

fn golden_config(dir: &Path) -> Value {
    json!({
        "k1": "3/2",
        "k2": "1/2",
        "grid": {"y_min": -2.0, "y_max": 2.0, "ny": 81, "z_start": 0.05, "z_end": 0.5, "nz": 450},
        "sweep": {"orders": [4, 8, 16], "z": [0.1, 0.5, 1.0]},
        "oracle": {"save_every": 50, "domain_pad": 10},
        "output": {
            "series": dir.join("series.json"),
            "report": dir.join("report.json"),
            "dir": dir.join("oracle")
        }
    })
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(args: &[&str], cfg: &Path) -> Output {
    bin().args(args).arg("--config").arg(cfg).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn expand_writes_exact_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    let out = run(&["expand"], &cfg);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("series.json")).unwrap();
    let s = SeriesSolution::from_json(&text).unwrap();
    assert_eq!(s.order(), 12);
    assert_eq!(s.terms()[0], YPolynomial::y());
    assert_eq!(s.terms()[1], YPolynomial::constant(ratio(1, 2)));
    assert_eq!(s.terms()[2], YPolynomial::monomial(ratio(-1, 2), 1));
    assert!(text.starts_with(
        r#"{"k1":"3/2","k2":"1/2","order":12,"terms":[["0/1","1/1"],["1/2"],["0/1","-1/2"]"#
    ));
}

#[test]
fn expand_order_zero_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    let target = dir.path().join("n0.json");
    let out = bin()
        .args(["expand", "--order", "0", "--k1", "-1/3", "--out"])
        .arg(&target)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let s = SeriesSolution::from_json(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(s.order(), 0);
    assert_eq!(s.terms().len(), 1);
    assert_eq!(s.params().k1, ratio(-1, 3));
}

#[test]
fn inadmissible_initial_profile_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = golden_config(dir.path());
    cfg["f0"] = json!(["1"]);
    let path = write_config(dir.path(), "cfg.json", &cfg);
    let out = run(&["expand"], &path);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("residual: -1"), "{stderr}");
    assert!(!dir.path().join("series.json").exists());
}

#[test]
fn malformed_configs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut unknown = golden_config(dir.path());
    unknown["colour"] = json!("blue");
    let path = write_config(dir.path(), "unknown.json", &unknown);
    assert_eq!(code(&run(&["expand"], &path)), 1);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["verify"], &bad)), 1);

    let mut bad_rational = golden_config(dir.path());
    bad_rational["k2"] = json!("1/0");
    let path = write_config(dir.path(), "rat.json", &bad_rational);
    assert_eq!(code(&run(&["expand"], &path)), 1);

    assert_eq!(code(&run(&["expand"], &dir.path().join("missing.json"))), 1);
}

#[test]
fn verify_passes_on_expanded_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    let out = run(&["verify"], &cfg);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], json!(true));
    assert_eq!(report["adm"]["orders"].as_array().unwrap().len(), 13);
    assert_eq!(
        report["adm"]["orders"][0],
        json!({"n": 0, "pass": true, "max_abs_defect_numerator_bits": 0})
    );
    assert_eq!(report["residual"]["min_z_degree"], json!(13));

    let mut n0 = golden_config(dir.path());
    n0["order"] = json!(0);
    let path = write_config(dir.path(), "n0.json", &n0);
    assert_eq!(code(&run(&["verify"], &path)), 0);
}

#[test]
fn tampered_series_fails_verification_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    assert_eq!(code(&run(&["expand"], &cfg)), 0);
    let series_path = dir.path().join("series.json");
    let mut file: Value =
        serde_json::from_str(&std::fs::read_to_string(&series_path).unwrap()).unwrap();
    file["terms"][1] = json!(["3/2"]);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, file.to_string()).unwrap();

    let out = bin()
        .args(["verify", "--series-in"])
        .arg(&tampered)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["adm"]["pass"], json!(false));
    assert_eq!(report["adm"]["orders"][1]["pass"], json!(false));
    assert_eq!(report["adm"]["orders"][2]["pass"], json!(true));
    assert_eq!(report["recurrence"]["pass"], json!(false));
}

#[test]
fn expand_then_verify_round_trip_is_bit_identical_and_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    let cfg_before = std::fs::read(&cfg).unwrap();

    assert_eq!(code(&run(&["expand"], &cfg)), 0);
    let series_path = dir.path().join("series.json");
    let first = std::fs::read(&series_path).unwrap();
    assert_eq!(code(&run(&["expand"], &cfg)), 0);
    assert_eq!(std::fs::read(&series_path).unwrap(), first);

    let out = bin()
        .args(["verify", "--series-in"])
        .arg(&series_path)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let reread = SeriesSolution::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(
        reread.to_json() + "\n",
        String::from_utf8(first.clone()).unwrap()
    );
    assert_eq!(std::fs::read(&series_path).unwrap(), first);
    assert_eq!(std::fs::read(&cfg).unwrap(), cfg_before);
    // no temp files left behind
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn oracle_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &golden_config(dir.path()));
    let out = run(&["oracle"], &cfg);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let oracle = dir.path().join("oracle");

    let grid = read_csv(&oracle.join("grid.csv"));
    assert_eq!(grid[0], ["y", "z", "u"]);
    // extended to z = 1 at the same dz: 950 steps, every 50th kept plus the keep_z levels
    assert_eq!((grid.len() - 1) % 81, 0);

    let sweep = read_csv(&oracle.join("sweep.csv"));
    assert_eq!(sweep[0], ["N", "z", "max_abs", "rms"]);
    assert_eq!(sweep.len(), 1 + 3 * 3);
    let err = |n: &str, z: &str| -> f64 {
        sweep.iter().find(|r| r[0] == n && r[1] == z).unwrap()[2]
            .parse()
            .unwrap()
    };
    assert!(err("16", "1") < err("8", "1") && err("8", "1") < err("4", "1"));

    let metrics = read_csv(&oracle.join("metrics.csv"));
    assert_eq!(metrics[0], ["N", "z", "max_abs", "rms"]);
    assert!(metrics[1..].iter().all(|r| r[0] == "12"));

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(oracle.join("summary.json")).unwrap())
            .unwrap();
    let p = summary["observed_order"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&p), "{p}");
    assert!(summary["domain_sensitivity_max_abs"].as_f64().unwrap() < 1e-6);
}

#[test]
fn oracle_reports_coarse_runs_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = golden_config(dir.path());
    cfg["grid"]["nz"] = json!(3);
    cfg["grid"]["z_end"] = json!(2.0);
    cfg["sweep"]["z"] = json!([2.0]);
    let path = write_config(dir.path(), "cfg.json", &cfg);
    let out = run(&["oracle"], &path);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_rejects_singular_start_and_missing_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = golden_config(dir.path());
    cfg["grid"]["z_start"] = json!(0.0);
    let path = write_config(dir.path(), "zero.json", &cfg);
    assert_eq!(code(&run(&["oracle"], &path)), 1);

    let mut no_grid = golden_config(dir.path());
    no_grid.as_object_mut().unwrap().remove("grid");
    let path = write_config(dir.path(), "nogrid.json", &no_grid);
    assert_eq!(code(&run(&["oracle"], &path)), 1);
}

#[test]
fn explicit_blowup_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = golden_config(dir.path());
    cfg["grid"] = json!({"y_min": -2.0, "y_max": 2.0, "ny": 401, "z_start": 0.05, "z_end": 10.0, "nz": 200, "theta": 0.0});
    cfg["sweep"]["z"] = json!([1.0]);
    let path = write_config(dir.path(), "cfg.json", &cfg);
    let out = run(&["oracle"], &path);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
}
