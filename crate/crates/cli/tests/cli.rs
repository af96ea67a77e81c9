use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tensor-chernoff"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn passing_suite_exits_zero_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = write_config(dir.path(), "suite = \"tensor_props\"\ntrials = 5\n");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rep = tensor_chernoff::harness::Report::from_json(&text).unwrap();
    assert!(rep.all_pass());
}

#[test]
fn seed_flag_overrides_config_and_worker_count_is_invisible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "suite = \"chernoff_sweep\"\nseed = 1\nnum_walks = 400\ntheta = [5.0, 50.0, 300.0]\n",
    );
    let mut bodies = Vec::new();
    for w in ["1", "2", "8"] {
        let out = dir.path().join(format!("r{w}.json"));
        let o = run(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            w,
            "--seed",
            "99",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        bodies.push(std::fs::read(&out).unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
    let rep = tensor_chernoff::harness::Report::from_json(std::str::from_utf8(&bodies[0]).unwrap()).unwrap();
    assert_eq!(rep.environment.seed, 99);
    assert_eq!(rep.config.seed, 99);
}

#[test]
fn csv_output_has_the_table_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let cfg = write_config(dir.path(), "suite = \"chernoff_sweep\"\nnum_walks = 200\ntheta = [5.0, 300.0]\n");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("theta,p_hat,stderr,bound,vacuous,assumption3_violations\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = write_config(dir.path(), "suite = \"tensor_props\"\ntrails = 5\n");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("trails") && err.contains("line 2"), "{err}");

    let o = run(&["run", "--config", "/no/such/file.toml", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // A quadrature window this short makes every multivariate right-hand
    // side a quadrature error, which is recorded as a failed check.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        "suite = \"inequalities\"\ntrials = 4\n[quadrature]\ntruncation = 0.5\nnode_count = 64\n",
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = tensor_chernoff::harness::Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!rep.all_pass());
}

#[test]
fn shipped_configs_parse() {
    for name in ["tensor_props", "inequalities", "expander", "chernoff_sweep"] {
        let p = configs().join(format!("{name}.toml"));
        let cfg = tensor_chernoff::harness::ExperimentConfig::from_file(&p).unwrap();
        assert_eq!(cfg.suite.label(), name);
    }
}
