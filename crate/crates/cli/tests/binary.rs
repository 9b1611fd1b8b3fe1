use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn orcon(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orcon"))
        .args(args)
        .current_dir(dir)
        .env_remove("ORCON_THREADS")
        .output()
        .expect("spawn orcon")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn verify_exit_codes_follow_the_certificate() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "origin.txt", "0 0\n");
    write(tmp.path(), "corner.txt", "1.0\t0.0");
    assert_eq!(code(&orcon(&["verify", "toy-line", "origin.txt", "M"], tmp.path())), 0);
    assert_eq!(code(&orcon(&["verify", "toy-line", "origin.txt", "S"], tmp.path())), 1);
    assert_eq!(code(&orcon(&["verify", "toy-point", "origin.txt", "W"], tmp.path())), 0);
    assert_eq!(code(&orcon(&["verify", "toy-point", "origin.txt", "M"], tmp.path())), 1);
    assert_eq!(code(&orcon(&["verify", "toy-point", "corner.txt", "S"], tmp.path())), 0);
}

#[test]
fn verify_rejects_bad_input() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "origin.txt", "0 0");
    write(tmp.path(), "junk.txt", "0 zero");
    write(tmp.path(), "short.txt", "0");
    for args in [
        ["verify", "toy-line", "junk.txt", "M"],
        ["verify", "toy-line", "short.txt", "M"],
        ["verify", "toy-line", "origin.txt", "Q"],
        ["verify", "toy-line", "origin.txt", "C"],
    ] {
        assert_eq!(code(&orcon(&args, tmp.path())), 2, "{args:?}");
    }
    assert_eq!(code(&orcon(&["verify", "toy-line", "missing.txt", "M"], tmp.path())), 3);
}

#[test]
fn unknown_problem_lists_the_valid_ids() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "origin.txt", "0 0");
    let o = orcon(&["verify", "toy-circle", "origin.txt", "W"], tmp.path());
    assert_eq!(code(&o), 2);
    for id in ["disjunctive", "gap-domain", "heat", "toy-line", "toy-point"] {
        assert!(stderr(&o).contains(id), "{}", stderr(&o));
    }
    assert_eq!(code(&orcon(&["gradcheck", "toy-circle"], tmp.path())), 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "top.json", r#"{"version": 1, "benchmark": {"id": "toy-line"}, "start": 3}"#);
    write(tmp.path(), "inner.json", r#"{"version": 1, "benchmark": {"id": "toy-line", "n": 3}}"#);
    write(tmp.path(), "homotopy.json", r#"{"version": 1, "benchmark": {"id": "toy-line"}, "homotopy": {"tmin": 1}}"#);
    write(tmp.path(), "version.json", r#"{"version": 2, "benchmark": {"id": "toy-line"}}"#);
    write(tmp.path(), "id.json", r#"{"version": 1, "benchmark": {"id": "toy-circle"}}"#);
    for name in ["top.json", "inner.json", "homotopy.json", "version.json", "id.json"] {
        let o = orcon(&["bench", "--config", name], tmp.path());
        assert_eq!(code(&o), 2, "{name}: {}", stderr(&o));
    }
    assert_eq!(code(&orcon(&["bench", "--config", "absent.json"], tmp.path())), 3);
    assert!(!tmp.path().join("orcon-out").exists());
}

#[test]
fn disjunctive_bench_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "cfg.json", r#"{"version": 1, "benchmark": {"id": "disjunctive"}, "seed": 7}"#);
    let a = orcon(&["bench", "--config", "cfg.json", "--out", "a"], tmp.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let b = orcon(&["bench", "--config", "cfg.json", "--out", "b"], tmp.path());
    assert_eq!(code(&b), 0, "{}", stderr(&b));

    let results = std::fs::read_to_string(tmp.path().join("a/results.csv")).unwrap();
    assert_eq!(results.lines().count(), 501);
    for name in ["results.csv", "profile.csv", "profile.svg"] {
        let x = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let y = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("a/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["runs"], 500);
    assert_eq!(meta["f_min"], 9.0);
    assert_eq!(meta["f_min_source"], "known-optimum");
    assert_eq!(meta["config"]["seed"], 7);
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "cfg.json", r#"{"version": 1, "benchmark": {"id": "disjunctive"}, "starts": 8, "threads": 1}"#);
    assert_eq!(code(&orcon(&["bench", "--config", "cfg.json", "--out", "one"], tmp.path())), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_orcon"))
        .args(["bench", "--config", "cfg.json", "--out", "three"])
        .current_dir(tmp.path())
        .env("ORCON_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let read = |d: &str| std::fs::read(tmp.path().join(d).join("results.csv")).unwrap();
    assert!(read("one") == read("three"));

    let bad = Command::new(env!("CARGO_BIN_EXE_orcon"))
        .args(["bench", "--config", "cfg.json", "--out", "bad"])
        .current_dir(tmp.path())
        .env("ORCON_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn overrides_take_precedence_over_the_config() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "cfg.json", r#"{"version": 1, "benchmark": {"id": "toy-point"}, "starts": 50, "out": "cfg-out"}"#);
    let o = orcon(
        &["bench", "--config", "cfg.json", "--starts", "3", "--methods", "relax-sc,relax-fb", "--out", "flag-out"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(!tmp.path().join("cfg-out").exists());
    let results = std::fs::read_to_string(tmp.path().join("flag-out/results.csv")).unwrap();
    let methods: Vec<&str> = results.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["relax-sc", "relax-sc", "relax-sc", "relax-fb", "relax-fb", "relax-fb"]);
    let timing = std::fs::read_to_string(tmp.path().join("flag-out/timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), 7);
}

#[test]
fn profile_subcommand_reproduces_the_bench_profile() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "cfg.json", r#"{"version": 1, "benchmark": {"id": "toy-point"}, "starts": 10}"#);
    assert_eq!(code(&orcon(&["bench", "--config", "cfg.json", "--out", "run"], tmp.path())), 0);
    let o = orcon(&["profile", "--results", "run/results.csv", "--config", "cfg.json", "--out", "again"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["profile.csv", "profile.svg"] {
        let x = std::fs::read(tmp.path().join("run").join(name)).unwrap();
        let y = std::fs::read(tmp.path().join("again").join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }

    // Reference value and offset given on the command line.
    let o = orcon(&["profile", "--results", "run/results.csv", "--f-min", "0.5", "--delta", "10", "--out", "wide"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("wide/profile.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    assert!(first.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() >= 0.0));

    assert_eq!(code(&orcon(&["profile", "--results", "nowhere.csv"], tmp.path())), 3);
    assert_eq!(code(&orcon(&["profile", "--results", "run/results.csv", "--delta", "-1"], tmp.path())), 2);
}

#[test]
fn gradcheck_on_built_in_problems() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&orcon(&["gradcheck", "disjunctive"], tmp.path())), 0);
    write(tmp.path(), "gap.json", r#"{"version": 1, "benchmark": {"id": "gap-domain", "n": 10, "min_high": 3}}"#);
    let o = orcon(&["gradcheck", "gap-domain", "--config", "gap.json"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&orcon(&["gradcheck", "toy-line", "--config", "gap.json"], tmp.path())), 2);
}

#[test]
fn heat_bench_dumps_the_quadratic() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "heat.json",
        r#"{"version": 1, "benchmark": {"id": "heat", "nodes_per_axis": 4, "time_steps": 4}, "starts": 2, "methods": ["relax-sc"]}"#,
    );
    let o = orcon(&["bench", "--config", "heat.json", "--out", "h"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let q = std::fs::read_to_string(tmp.path().join("h/quadratic.csv")).unwrap();
    let n = q.lines().next().unwrap().split(',').count();
    assert_eq!(q.lines().count(), n + 2);
    assert_eq!(q.lines().last().unwrap().split(',').count(), 1);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("h/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["delta"], 0.0);
    assert_eq!(meta["n"], n);
}
