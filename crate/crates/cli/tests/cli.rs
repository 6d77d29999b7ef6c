use std::path::Path;

use clap::Parser;
use confgraph_cli::{main_with, run_job, Cli, JobConfig};
use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> (i32, Value, Vec<u8>) {
    let out = dir.join("report.json");
    let _ = std::fs::remove_file(&out);
    let mut full = vec!["confgraph".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.extend(["--out".into(), out.display().to_string(), "--cache-dir".into(), dir.join("cache").display().to_string()]);
    let code = main_with(full);
    let bytes = std::fs::read(&out).unwrap_or_default();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (code, v, bytes)
}

fn config(args: &[&str], cache: &Path) -> JobConfig {
    let mut full = vec!["confgraph", "--cache-dir", cache.to_str().unwrap()];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", "/dev/null"]);
    JobConfig::from_cli(&Cli::try_parse_from(full).unwrap()).unwrap()
}

const DISKS: &[&str] = &["--task", "betti", "--flavor", "graphsD", "--dim", "2", "--n", "3", "--kmax", "1", "--kprobe", "2"];

#[test]
fn successful_job_reports_betti_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v, bytes) = run(DISKS, dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["table"]["betti"], serde_json::json!([1, 3, 2]));
    assert!(bytes.ends_with(b"\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--task", "betti", "--manifold", "K3", "--n", "2"][..],
        &["--task", "betti", "--manifold", "S^2", "--flavor", "nonsense", "--n", "2"],
        &["--task", "betti", "--manifold", "S^2", "--n", "2", "--deg-min", "3", "--deg-max", "1"],
        &["--task", "bv-betti", "--surface", "S^3", "--n", "1"],
        &["--task", "no-such-task"],
    ] {
        assert_eq!(run(args, dir.path()).0, 2, "{args:?}");
    }
    assert_eq!(main_with(["confgraph", "--help"]), 0);
}

#[test]
fn unstabilized_degrees_exit_with_one_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--task", "betti", "--manifold", "T^2", "--n", "2", "--deg-max", "3", "--kmax", "1", "--kprobe", "2"];
    let (code, v, _) = run(&args, dir.path());
    assert_eq!(code, 1);
    assert_eq!(v["status"], "not_stabilized");
    let mut allowed = args.to_vec();
    allowed.push("--allow-unstable");
    assert_eq!(run(&allowed, dir.path()).0, 0);
}

#[test]
fn second_run_is_served_from_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(DISKS, dir.path());
    let first = run_job(&cfg).unwrap();
    let second = run_job(&cfg).unwrap();
    assert!(!first.from_cache && second.from_cache);
    assert_eq!(first.report, second.report);
}

#[test]
fn corrupt_objects_are_recomputed_and_collected() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, good) = run(DISKS, dir.path());
    let objects = dir.path().join("cache").join("objects");
    for e in std::fs::read_dir(&objects).unwrap() {
        std::fs::write(e.unwrap().path(), b"{ truncated").unwrap();
    }
    let (code, _, again) = run(DISKS, dir.path());
    assert_eq!((code, &again), (0, &good));

    for e in std::fs::read_dir(&objects).unwrap() {
        std::fs::write(e.unwrap().path(), b"garbage").unwrap();
    }
    let gc = ["--task", "cache-gc"];
    let (code, v, _) = run(&gc, dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["evicted"].as_array().unwrap().len(), 1);
    let (_, v, _) = run(&gc, dir.path());
    assert_eq!(v["evicted"], serde_json::json!([]));
}

#[test]
fn reports_do_not_depend_on_worker_count_or_cache_state() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--task", "compare", "--manifold", "S^2", "--flavor", "forest", "--n", "2", "--deg-max", "4", "--kmax", "1", "--kprobe", "2"];
    let (_, _, one) = run(&args, a.path());
    let mut more = args.to_vec();
    more.extend_from_slice(&["--workers", "1"]);
    let (_, _, two) = run(&more, b.path());
    assert_eq!(one, two);
    let (_, _, cached) = run(&args, a.path());
    assert_eq!(one, cached);
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = confgraph::PDAlgebra::builtin("T^2").unwrap();
    let two = confgraph::Rational::from_integer(2.into());
    let z = confgraph::gc::z0(&t2).scaled(&two);
    let file = dir.path().join("z.txt");
    std::fs::write(&file, z.terms.to_literals(Some(&t2)).join("\n")).unwrap();
    let base = ["--task", "check-mc", "--manifold", "T^2", "--max-vertices", "2", "--max-loop", "1"];
    let mut args = base.to_vec();
    args.extend_from_slice(&["--mc", file.to_str().unwrap()]);
    let (code, v, _) = run(&args, dir.path());
    assert_eq!(code, 1);
    assert_eq!(v["status"], "check_failed");
    assert_eq!(run(&base, dir.path()).0, 0);
}
