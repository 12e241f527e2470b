use std::path::Path;
use std::process::{Command, Output};

fn darp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, name: &str, n: usize, seed: u64) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let o = darp(&["generate", "--n", &n.to_string(), "--vehicles", "2", "--seed", &seed.to_string(), "--out", &p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn objective(text: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix("objective"))
        .expect("objective line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn solve_exit_code_follows_the_expected_objective() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "g.txt", 4, 1);
    let o = darp(&["solve", &inst, "--preprocess", "--cuts", "all"]);
    assert!(o.status.success());
    let z = objective(&stdout(&o));
    assert!(stdout(&o).contains("route 1"));

    let right = format!("{:.1}", z);
    assert_eq!(darp(&["solve", &inst, "--expect", &right]).status.code(), Some(0));
    let wrong = format!("{:.1}", z + 1.0);
    assert_eq!(darp(&["solve", &inst, "--expect", &wrong]).status.code(), Some(1));
}

#[test]
fn formulations_agree_and_relaxation_is_lower() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "g.txt", 3, 2);
    let z: Vec<f64> = ["lb", "eb", "laeb", "alaeb"]
        .iter()
        .map(|f| objective(&stdout(&darp(&["solve", &inst, "--formulation", f]))))
        .collect();
    for w in &z {
        assert!((w - z[0]).abs() < 1e-6, "{z:?}");
    }
    let lp = objective(&stdout(&darp(&["relax", &inst])));
    assert!(lp <= z[0] + 1e-6);
}

#[test]
fn infeasible_path_families_need_preprocessing() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "g.txt", 2, 3);
    let o = darp(&["solve", &inst, "--cuts", "ip1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("GP"));
}

#[test]
fn preprocess_report_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "g.txt", 5, 4);
    let o = darp(&["preprocess", &inst, "--report"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["nodes_after"].as_u64().unwrap() <= v["nodes_before"].as_u64().unwrap());
}

#[test]
fn bench_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "a.txt", 3, 5);
    generate(dir.path(), "b.txt", 3, 6);
    let manifest = dir.path().join("m.json");
    std::fs::write(&manifest, r#"[{"path": "a.txt"}, {"path": "b.txt"}, {"path": "missing.txt"}]"#).unwrap();
    let out = dir.path().join("runs.csv");
    let o = darp(&[
        "bench",
        manifest.to_str().unwrap(),
        "--grid",
        "none;GP+VS4+CI1+IP1+IP2",
        "--formulations",
        "eb,laeb",
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    // the missing file is a failed run, not a golden mismatch
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 1 + 3 * 2 * 2);
    assert!(rows[0].starts_with("instance,formulation,flags,GP,VS1"));
    assert!(rows[1].starts_with("a,eb,none,"));
    assert!(rows.iter().filter(|r| r.starts_with("missing,")).all(|r| r.contains(",error,")));
}

#[test]
fn bench_on_empty_manifest_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(&manifest, "[]").unwrap();
    let out = dir.path().join("runs.csv");
    let o = darp(&["bench", manifest.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn verify_theorems_passes_on_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "a.txt", 4, 7);
    let manifest = dir.path().join("m.json");
    std::fs::write(&manifest, r#"[{"path": "a.txt"}]"#).unwrap();
    let o = darp(&["verify-theorems", manifest.to_str().unwrap(), "--point-instances", "3"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 1 + 3 + 1 + 1);
}

#[test]
fn manifest_lists_desk_scale_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("desk.json");
    let o = darp(&["manifest", "--data-dir", "/data", "--max-n", "16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 8);
    assert_eq!(entries[0]["path"], "/data/a2-16.txt");
    assert_eq!(entries[0]["expected_objective"], 294.3);
}
