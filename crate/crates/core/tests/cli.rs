//! End-to-end runs of the `zkb` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zkb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkb"))
        .args(args)
        .output()
        .expect("spawn zkb")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_on_zero_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "zero.cfg",
        "command = solve\ngrid.nx = 16\nsolver.dt = 1e-2\nsolver.t_end = 0.1\ninit.profile = zero\n",
    );
    let out = tmp.path().join("out");
    let o = zkb(&["solve", "--config", &cfg, "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 12);
    for line in series.lines().skip(1) {
        assert!(
            line.split(',').skip(1).all(|x| x.parse::<f64>().unwrap() == 0.0),
            "{line}"
        );
    }
    // stride 0: first and last frames only
    assert_eq!(fs::read_to_string(out.join("frames.csv")).unwrap().lines().count(), 3);
}

#[test]
fn flagged_estimate_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bug.cfg", "lab.count = 14\nlab.dissipation_sign = -1\n");
    let out = tmp.path().join("out");
    let o = zkb(&[
        "verify",
        "--estimate",
        "duhamel",
        "--config",
        &cfg,
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.contains("ESTIMATE duhamel") && stdout.contains("FLAG"),
        "{stdout}"
    );
}

#[test]
fn invalid_inputs_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();
    let o = zkb(&["counterexample", "--nmin", "7", "--nmax", "4", "--output-dir", out]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nmin"));

    let cfg = write(
        tmp.path(),
        "bad.cfg",
        "grid.nx = 32\nsolver.dt = -1\nsolver.t_end = 1\n",
    );
    let o = zkb(&["solve", "--config", &cfg, "--output-dir", out]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("solver.dt"), "{err}");

    let cfg = write(
        tmp.path(),
        "unknown.cfg",
        "solver.dt = 0.1\nsolver.t_end = 1\nsolver.colour = red\n",
    );
    let o = zkb(&["solve", "--config", &cfg, "--output-dir", out]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = zkb(&["verify", "--estimate", "quartic", "--output-dir", out]);
    assert_eq!(code(&o), 1);
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&zkb(&["--help"])), 0);
    assert_eq!(code(&zkb(&["--version"])), 0);
    assert_eq!(code(&zkb(&[])), 1);
}

#[test]
fn norm_of_snapshot_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.cfg",
        "grid.nx = 32\ngrid.lx = 16pi\nsolver.dt = 0.01\nsolver.t_end = 0.1\ninit.profile = gaussian\ninit.width = 2\n",
    );
    let run = tmp.path().join("run");
    assert_eq!(
        code(&zkb(&[
            "solve",
            "--config",
            &cfg,
            "--output-dir",
            run.to_str().unwrap()
        ])),
        0
    );
    let snap = run.join("snapshots/frame_00000010.zkbf");
    assert!(snap.exists());
    let norm = tmp.path().join("norm");
    let o = zkb(&[
        "norm",
        "--config",
        &cfg,
        "--input",
        snap.to_str().unwrap(),
        "--family",
        "hs",
        "--s",
        "0",
        "--output-dir",
        norm.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // H⁰ of the last frame equals the last L² entry of the series
    let l2: f64 = fs::read_to_string(run.join("series.csv"))
        .unwrap()
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let hs: f64 = fs::read_to_string(norm.join("norm.csv"))
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((hs - l2).abs() <= 1e-12 * l2, "{hs} vs {l2}");
    let manifest = fs::read_to_string(norm.join("manifest.txt")).unwrap();
    for key in [
        "norm.family = hs",
        "norm.s = 0",
        "run.seed = 0",
        "grid.lx = 16pi",
        "lab.count",
        "counterexample.quad",
    ] {
        assert!(manifest.contains(key), "{key} missing from manifest");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "r.cfg",
        "grid.nx = 32\nsolver.dt = 0.01\nsolver.t_end = 0.1\ninit.profile = random\ninit.width = 1\n",
    );
    let run = |name: &str, seed: &str, threads: &str| {
        let dir = tmp.path().join(name);
        let o = zkb(&[
            "solve",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--threads",
            threads,
            "--output-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        fs::read(dir.join("series.csv")).unwrap()
    };
    let a = run("a", "5", "1");
    assert_eq!(a, run("b", "5", "1"));
    assert_eq!(a, run("c", "5", "0"));
    assert_ne!(a, run("d", "6", "1"));
}
