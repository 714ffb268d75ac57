use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn diagnostics(o: &Output) -> Vec<Value> {
    String::from_utf8(o.stderr.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|_| panic!("not JSON: {l}")))
        .collect()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn energies(spec: &str) -> Vec<f64> {
    let v: Value = serde_json::from_str(spec).unwrap();
    v["energies"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect()
}

/// Writes the 31-level spectrum and its chain into `dir`.
fn mirror31_chain(dir: &TempDir) -> PathBuf {
    let spec = path(dir, "m31.json");
    let chain = path(dir, "c31.json");
    assert!(run(&["design", "mirror31", "--output", s(&spec)]).status.success());
    assert!(run(&["reconstruct", s(&spec), "--output", s(&chain)]).status.success());
    chain
}

#[test]
fn design_families() {
    let o = run(&["design", "linear", "--levels", "5", "--omega", "1"]);
    assert!(o.status.success());
    assert_eq!(energies(&stdout(&o)), vec![0.0, 1.0, 2.0, 3.0, 4.0]);

    let o = run(&["design", "quadratic", "--levels", "3", "--p", "1", "--q", "1"]);
    assert_eq!(energies(&stdout(&o)), vec![0.0, 5.0, 12.0]);

    let dir = TempDir::new().unwrap();
    let out = path(&dir, "cos.json");
    let o = run(&["design", "cosine", "--levels", "31", "--amplitude", "208", "--output", s(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "certificate: valid, tau=pi");
    let e = energies(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(e.len(), 31);
    assert_eq!(e[30], 207.0);
}

#[test]
fn design_csv() {
    let o = run(&["design", "linear", "--levels", "3", "--omega0", "-1", "--format", "csv"]);
    assert_eq!(stdout(&o), "nu,energy,n\n0,-1,0\n1,0,0\n2,1,0\n");
}

#[test]
fn rejected_amplitude_exits_2() {
    let o = run(&["design", "cosine", "--levels", "31", "--amplitude", "20"]);
    assert_eq!(o.status.code(), Some(2));
    let diag = diagnostics(&o);
    assert_eq!(diag.last().unwrap()["level"], "error");
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["design", "linear"]).status.code(), Some(2));
    assert_eq!(run(&["correlate", "x.json", "--observable", "zz", "--sites", "0", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(run(&["reconstruct", "--energies", "0,0,1"]).status.code(), Some(2));
}

#[test]
fn reconstruct_mirror31() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "m31.json");
    run(&["design", "mirror31", "--output", s(&spec)]);
    let chain = path(&dir, "c31.json");
    let o = run(&["reconstruct", s(&spec), "--output", s(&chain)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("J in [101.4777, 108.4814], variation 3.34%"));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&chain).unwrap()).unwrap();
    assert_eq!(c["n_sites"], 31);
    assert_eq!(c["couplings"].as_array().unwrap().len(), 30);
}

#[test]
fn reconstruct_two_levels() {
    let o = run(&["reconstruct", "--energies=-1,1"]);
    let c: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(c["couplings"], serde_json::json!([1.0]));
    assert_eq!(c["fields"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn annealing_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "lin.json");
    run(&["design", "linear", "--levels", "7", "--omega0", "-3", "--output", s(&spec)]);
    let args = ["--seed", "42", "reconstruct", s(&spec), "--method", "annealing", "--sweeps", "1500"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);

    let direct = run(&["reconstruct", s(&spec)]);
    let x: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let y: Value = serde_json::from_str(&stdout(&direct)).unwrap();
    for (p, q) in x["couplings"].as_array().unwrap().iter().zip(y["couplings"].as_array().unwrap()) {
        assert!((p.as_f64().unwrap() - q.as_f64().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn unconverged_annealing_exits_3() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "lin.json");
    run(&["design", "linear", "--levels", "5", "--output", s(&spec)]);
    let o = run(&["--tolerance", "0", "reconstruct", s(&spec), "--method", "annealing", "--sweeps", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stdout.is_empty());
}

#[test]
fn certify_verdicts() {
    let o = run(&["certify", "--energies", "-1,0,3"]);
    assert!(o.status.success());
    let o = run(&["certify", "--energies", "0,2"]);
    assert_eq!(o.status.code(), Some(2));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["valid"], false);
    let o = run(&["certify", "--energies", "0,2", "--tau", "0.5pi"]);
    assert!(o.status.success());
}

#[test]
fn figure_one_peak() {
    let dir = TempDir::new().unwrap();
    let chain = mirror31_chain(&dir);
    for temp in ["0", "1000"] {
        let o = run(&[
            "correlate", s(&chain), "--observable", "zz", "--sites", "0,30", "--temperature", temp, "--grid",
            "0.5pi:1.5pi:101",
        ]);
        assert!(o.status.success());
        let text = stdout(&o);
        let mut lines = text.lines();
        let header: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(header["observable"], "zz");
        assert_eq!(lines.next().unwrap(), "t,re,im");
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
                (c[0], c[1])
            })
            .collect();
        assert_eq!(rows.len(), 101);
        let peak = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!((peak.0 - std::f64::consts::PI).abs() < 1e-12);
        assert!((peak.1 - 0.25).abs() < 1e-9);
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let chain = mirror31_chain(&dir);
    let o = run(&["correlate", s(&chain), "--observable", "xx", "--sites", "4", "--grid", "0:1:0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn fidelity_at_mirror_time() {
    let dir = TempDir::new().unwrap();
    let chain = mirror31_chain(&dir);
    let o = run(&["--format", "json", "fidelity", s(&chain), "--grid", "0:pi:3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let f = v["fidelity"].as_array().unwrap();
    assert!((f[2].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(f[0].as_f64().unwrap() < 1e-20);
}

#[test]
fn oracle_check_small_chain() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "s.json");
    let chain = path(&dir, "c.json");
    run(&["design", "cosine", "--levels", "6", "--output", s(&spec)]);
    run(&["reconstruct", s(&spec), "--output", s(&chain)]);
    let o = run(&["oracle-check", s(&chain), "--grid", "0:2:5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["max_xx_deviation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn config_replay_reproduces_output() {
    let dir = TempDir::new().unwrap();
    let chain = mirror31_chain(&dir);
    let first = run(&["correlate", s(&chain), "--observable", "xx", "--sites", "2,28", "--grid", "0:2pi:9"]);
    let diag = diagnostics(&first);
    let config = diag.iter().find(|d| d["event"] == "config").unwrap();
    let cfg_path = path(&dir, "run.json");
    std::fs::write(&cfg_path, config["config"].to_string()).unwrap();
    let replay = run(&["--config", s(&cfg_path)]);
    assert!(replay.status.success());
    assert_eq!(first.stdout, replay.stdout);

    let clash = run(&["--config", s(&cfg_path), "design", "mirror31"]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn bundled_revival_chain_revives() {
    let chain = concat!(env!("CARGO_MANIFEST_DIR"), "/recipes/data/revival41_chain.json");
    for temp in ["0", "10000"] {
        let o = run(&[
            "--format", "json", "correlate", chain, "--observable", "xx", "--sites", "19", "--temperature", temp,
            "--grid", "0:48pi:2",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        for c in v["values"].as_array().unwrap() {
            assert!((c[0].as_f64().unwrap() - 0.25).abs() < 1e-10);
        }
    }
}
