//! End-to-end runs of the `ncdirac` binary.
//!
//! Golden tables live in `tests/golden/`; regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p ncdirac-cli --test cli`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncdirac_cli::ResultRecord;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncdirac"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("algebra-check", &["algebra-check", "--n-max", "8"]),
    ("nc-algebra", &["nc-algebra", "--n-max", "8", "--theta-list=-0.3,0,0.1", "--eta-list", "0,0.05"]),
    ("landau", &["landau", "--n-max", "8"]),
    ("convergence", &["convergence", "--n-max", "8"]),
    ("nc-sweep", &["nc-sweep", "--n-max", "8", "--levels", "2", "--theta-list", "1e-4,1e-3", "--eta-list", "0,1e-3"]),
    ("series", &["series", "--n-max", "8", "--theta", "10", "--orders", "0,1,2,3,4,6,8"]),
];

#[test]
fn golden_tables() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in GOLDEN {
        let out = run(args);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let path = golden_dir().join(format!("{name}.csv"));
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stdout(&out), expected, "{name} differs from {}", path.display());
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["nc-sweep", "--n-max", "8", "--levels", "2", "--theta-list", "1e-4,1e-3", "--eta-list", "0,1e-3"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn json_record_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["convergence", "--n-max", "8", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rec: ResultRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.command, "convergence");
    assert!(rec.error.is_none());
    let again: ResultRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(again, rec);
    assert_eq!(serde_json::to_string_pretty(&rec).unwrap() + "\n", text);
}

#[test]
fn repeated_runs_agree_except_wall_time() {
    let args = ["series", "--n-max", "8", "--theta", "10", "--format", "json"];
    let parse = |o: Output| {
        let mut r: ResultRecord = serde_json::from_slice(&o.stdout).unwrap();
        r.wall_time = 0.0;
        r
    };
    assert_eq!(parse(run(&args)), parse(run(&args)));
}

#[test]
fn config_precedence_is_flags_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("run.cfg");
    std::fs::write(&kv, "# experiment\nbasis.n_max = 8\nphys.c = 20\nlevels = 2\n").unwrap();
    let js = dir.path().join("run.json");
    std::fs::write(&js, r#"{"basis": {"n_max": 8}, "phys": {"c": 20}, "levels": 2}"#).unwrap();
    for file in [&kv, &js] {
        let out = run(&["landau", "--config", file.to_str().unwrap(), "--c", "30", "--format", "json"]);
        assert!(out.status.success(), "{}", stderr(&out));
        let rec: ResultRecord = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rec.config.basis.n_max, 8, "file beats default");
        assert_eq!(rec.config.phys.c, 30.0, "flag beats file");
        assert_eq!(rec.config.levels, 2);
        assert_eq!(rec.config.basis.margin, 2, "default kept");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("bad.cfg");
    std::fs::write(&kv, "phys.speed_of_light = 3\n").unwrap();
    let out = run(&["landau", "--config", kv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("phys.speed_of_light"));
}

#[test]
fn malformed_number_in_file_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("bad.cfg");
    std::fs::write(&kv, "phys.c = fast\n").unwrap();
    let out = run(&["landau", "--config", kv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("phys.c"), "{}", stderr(&out));
}

#[test]
fn small_basis_is_a_validation_error() {
    let out = run(&["landau", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("n_max") && err.contains("minimum 4"), "{err}");
}

#[test]
fn theta_beyond_radius_is_series_divergence() {
    let out = run(&["nc-sweep", "--n-max", "8", "--theta-list", "1e6", "--eta-list", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("series divergence"));
    let rec: ResultRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rec.payload.is_none());
    assert_eq!(rec.error.unwrap().kind, ncdirac_cli::ErrorKind::SeriesDivergence);
}

#[test]
fn zero_levels_gives_header_only() {
    let out = run(&["landau", "--n-max", "8", "--levels", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "hamiltonian,level,energy,multiplicity,oracle,rel_err\n");
}

#[test]
fn unwritable_output_is_an_error() {
    let out = run(&["algebra-check", "--n-max", "8", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot write output"));
}

#[test]
fn seed_changes_only_the_random_check() {
    let a = stdout(&run(&["algebra-check", "--n-max", "8", "--seed", "1"]));
    let b = stdout(&run(&["algebra-check", "--n-max", "8", "--seed", "1"]));
    assert_eq!(a, b);
}
