use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deltamass"))
}

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .arg("run")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn list_shows_the_catalog() {
    let o = bin().arg("list").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 5);
    for name in [
        "neumann-trivial",
        "dirichlet-symmetric",
        "dirichlet-asymmetric",
        "jordan-left",
        "generic-random",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn neumann_all_tasks_exit_zero_with_zero_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--spec",
            "builtin:neumann-trivial",
            "--eps",
            "0.2,0.1,0.05",
            "--nodes",
            "32",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let spec = std::fs::read_to_string(dir.path().join("perturbed_spectrum.csv")).unwrap();
    let ground: Vec<f64> = spec
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[1] == "0")
        .map(|f| f[2].parse().unwrap())
        .collect();
    assert_eq!(ground.len(), 3);
    assert!(ground.iter().all(|l| l.abs() < 1e-9), "{ground:?}");
    for f in [
        "summary.json",
        "resolvent.csv",
        "hausdorff.svg",
        "limit_spectrum.csv",
        "pairs.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_hard_pass"], true);
    assert!(summary["criteria"].as_array().unwrap().len() >= 8);
}

#[test]
fn malformed_file_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "a = -1.0\nb = 1.0\nalpha = \"x\"\n").unwrap();
    let o = run(&["--spec", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["--spec", "builtin:neumann-trivial", "--zeta", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &["--spec", "builtin:neumann-trivial", "--eps", "0.1,0.2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--spec", "builtin:missing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_finite() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--spec",
        "builtin:generic-random",
        "--eps",
        "0.2,0.1",
        "--nodes",
        "24",
        "--n",
        "4",
        "--seed",
        "7",
    ];
    assert!(run(&args, a.path()).status.code().is_some_and(|c| c <= 1));
    assert!(run(&args, b.path()).status.code().is_some_and(|c| c <= 1));
    let fa = csv_files(a.path());
    assert!(fa.len() >= 10);
    for p in &fa {
        let q = b.path().join(p.file_name().unwrap());
        let (x, y) = (std::fs::read(p).unwrap(), std::fs::read(&q).unwrap());
        assert!(x == y, "{} differs", p.display());
        for line in String::from_utf8(x).unwrap().lines().skip(1) {
            for field in line.split(',') {
                if let Ok(v) = field.parse::<f64>() {
                    assert!(v.is_finite(), "{}: {line}", p.display());
                }
            }
        }
    }
    let svg = |d: &Path| std::fs::read(d.join("hausdorff.svg")).unwrap();
    assert_eq!(svg(a.path()), svg(b.path()));
}

#[test]
fn csv_only_format_skips_plots() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--spec",
            "builtin:offset-left",
            "--tasks",
            "limit,perturbed",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| !n.ends_with(".svg")));
    assert!(!names.iter().any(|n| n == "pairs.csv"));
}

#[test]
fn resolvent_only_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--spec",
            "builtin:dirichlet-symmetric",
            "--tasks",
            "resolvent",
            "--eps",
            "0.1,0.05",
            "--nodes",
            "32",
            "--zeta=-1,2",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("resolvent.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn dirichlet_model_default_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let spec = problem("dirichlet-symmetric.toml");
    let o = run(&["--spec", spec.to_str().unwrap()], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let cluster = std::fs::read_to_string(dir.path().join("cluster_1.svg")).unwrap();
    assert!(
        cluster.contains("9.869604"),
        "triple cluster plot is around pi^2"
    );
    let clusters = std::fs::read_to_string(dir.path().join("clusters.csv")).unwrap();
    assert!(clusters.lines().count() > 2);
}

#[test]
fn bundled_problem_files_run() {
    for name in ["neumann-trivial.toml", "variable-robin.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(
            &["--spec", problem(name).to_str().unwrap(), "--nodes", "32"],
            dir.path(),
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
    }
}
