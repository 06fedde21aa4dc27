use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIG2: &str = r#"
schema_version = 1

[model]
f = "linear"
h = { kind = "exp", alpha = 2.0 }
u0 = { kind = "constant", value = 1.0 }

[graph]
kernel = { kind = "constant", value = 0.5 }

[positions]
scenario = "regular"
n = 60

[run]
t_end = 1.0
cells = 20
seed = 3
replicas = 2
ns = [10, 20, 40]
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphon-hawkes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn repo_config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn version_names_schema() {
    let o = run(&["--version"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains(env!("CARGO_PKG_VERSION")) && text.contains("config schema 1"), "{text}");
}

#[test]
fn missing_field_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &FIG2.replace("alpha = 2.0", ""));
    let o = run(&["validate-config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"), "{}", stderr(&o));
}

#[test]
fn typo_is_rejected_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo.toml", &FIG2.replace("t_end = 1.0", "t_ned = 1.0"));
    let o = run(&["validate-config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("t_ned") && msg.contains("line"), "{msg}");
}

#[test]
fn valid_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ok.toml", FIG2);
    let o = run(&["validate-config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["fig2.toml", "fig4.toml", "supercritical.toml"] {
        assert!(run(&["validate-config", &repo_config(name)]).status.success(), "{name}");
    }
}

#[test]
fn figure_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["figure", "fig2", "--seed", "7", "--n", "80", "--t-end", "1", "--quiet", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.iter().any(|(n, _)| n == "figure2_rates.csv"));
    assert!(ta.iter().any(|(n, _)| n == "figure2_field.csv"));
    assert_eq!(ta, tb);
}

#[test]
fn unknown_figure_fails() {
    let o = run(&["figure", "fig9", "--dry-run"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn longtime_reports_product_graphon() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["longtime", "-c", &repo_config("fig4.toml"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((report["r_inf"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-3);
    assert_eq!(report["class"], "subcritical");
    assert!(dir.path().join("ell.csv").exists());
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ok.toml", FIG2);
    let out = dir.path().join("out");
    let o = run(&["sweep", "-c", cfg.to_str().unwrap(), "--dry-run", "--seed", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let plan: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(plan["master_seed"], 11);
    assert_eq!(plan["seeds"].as_array().unwrap().len(), 6);
    assert!(!out.exists());
}

#[test]
fn every_subcommand_writes_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ok.toml", FIG2);
    let cfg = cfg.to_str().unwrap();
    let cases: [(&[&str], &[&str]); 6] = [
        (&["sample-graph"], &["graph.txt", "graph_summary.json"]),
        (&["simulate", "--coupled"], &["spikes.csv", "summary.csv", "simulation.json"]),
        (&["solve-limit"], &["lambda.csv", "u.csv", "solve.json"]),
        (&["longtime"], &["longtime.json", "ell.csv"]),
        (&["sweep"], &["convergence.csv", "convergence_replicas.csv", "convergence.json"]),
        (&["profile-error"], &["profile_error.csv", "profile_error_replicas.csv"]),
    ];
    for (k, (cmd, files)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let mut args = cmd.to_vec();
        args.extend(["-c", cfg, "--quiet", "--threads", "1", "--out", out.to_str().unwrap()]);
        let o = run(&args);
        assert!(o.status.success(), "{cmd:?}: {}", stderr(&o));
        assert!(out.join("plan.json").exists());
        for f in *files {
            assert!(out.join(f).exists(), "{cmd:?} did not write {f}");
        }
    }
}

#[test]
fn explosion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(repo_config("supercritical.toml"))
        .unwrap()
        .replace("seed = 1", "seed = 1\nmax_events = 2000");
    let cfg = write_config(dir.path(), "super.toml", &text);
    let o = run(&["simulate", "-c", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).to_lowercase().contains("explo"), "{}", stderr(&o));
}
