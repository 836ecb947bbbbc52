use std::path::Path;
use std::process::{Command, Output};

fn fdcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdcert")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn column(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn cz_sweep_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cz.csv");
    let args = ["sweep", "--model", "cz", "--min", "0.01", "--max", "1.0", "--steps", "5", "--out", path(&out)];
    let o = fdcert(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,n,param,F,D,r,d_exact,b_fidelity_only,b_ru_at_u,b_fd,b_hybrid,flags");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("cz,2,"));
    assert_eq!(column(lines[5], 2), 1.0);
    assert!((column(lines[5], 6) - 0.5f64.sin()).abs() < 1e-12);
    assert!(text.ends_with('\n') && !text.contains('\r'));

    let again = dir.path().join("again.csv");
    let args2 = ["sweep", "--model", "cz", "--min", "0.01", "--max", "1.0", "--steps", "5", "--out", path(&again)];
    assert!(fdcert(&args2).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn toffoli_sweep_starts_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = fdcert(&["sweep", "--model", "toffoli", "--min", "0", "--max", "0.5", "--steps", "3", "--out", path(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("toffoli,3,"));
    assert!((column(first, 3) - 1.0).abs() < 1e-14);
    assert!(column(first, 4) < 1e-7);
    assert!(column(first, 6) < 1e-12);
}

#[test]
fn log_grid_and_qft() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let o = fdcert(&[
        "sweep", "--model", "qft", "--n", "3", "--min", "1e-3", "--max", "0.1", "--steps", "3", "--log-grid",
        "--out", path(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let params: Vec<f64> = text.lines().skip(1).map(|l| column(l, 2)).collect();
    assert!((params[1] - 1e-2).abs() < 1e-15);
    assert!(text.lines().skip(1).all(|l| l.starts_with("qft,3,")));
}

#[test]
fn estimate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = fdcert(&[
            "estimate", "--model", "cz", "--param", "0.3", "--samples", "500", "--shots", "1000", "--seed", "7",
            "--out", path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let r = dir.path().join("r.csv");
    let o = fdcert(&[
        "estimate", "--model", "cz", "--param", "0.3", "--samples", "20", "--shots", "10", "--seed", "7",
        "--repeats", "50", "--out", path(&r),
    ]);
    assert!(o.status.success());
    let seeds: Vec<u64> =
        std::fs::read_to_string(&r).unwrap().lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(seeds, (7..57).collect::<Vec<_>>());
}

#[test]
fn estimate_of_identity_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("id.csv");
    let o = fdcert(&[
        "estimate", "--model", "cz", "--param", "0", "--samples", "10", "--shots", "5", "--seed", "1", "--out",
        path(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert_eq!(column(row, 6), 1.0);
    assert_eq!(column(row, 7), 0.0);
}

#[test]
fn moments_output() {
    let o = fdcert(&["moments", "--model", "cz", "--param", "0.5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let f: f64 = text.lines().find_map(|l| l.strip_prefix("F: ")).unwrap().parse().unwrap();
    assert!((f - (1.0 - 0.6 * 0.25f64.sin().powi(2))).abs() < 1e-14);

    let o = fdcert(&["moments", "--model", "cz", "--param", "3.141592653589793", "--csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let idx = lines[0].split(',').position(|h| h == "d_exact").unwrap();
    assert!((column(lines[1], idx) - 1.0).abs() < 1e-12);

    let o = fdcert(&["moments", "--model", "toffoli", "--param", "0"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let c: f64 = text.lines().find_map(|l| l.strip_prefix("c(F,D): ")).unwrap().parse().unwrap();
    assert!((c - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(fdcert(&["sweep", "--model", "swap", "--out", path(&out)]).status.code(), Some(1));
    assert_eq!(fdcert(&["sweep", "--model", "qft", "--out", path(&out)]).status.code(), Some(1));
    assert_eq!(fdcert(&["sweep", "--model", "qft", "--n", "11", "--out", path(&out)]).status.code(), Some(1));
    assert_eq!(fdcert(&["sweep", "--model", "cz", "--steps", "1", "--out", path(&out)]).status.code(), Some(1));
    assert_eq!(
        fdcert(&["sweep", "--model", "cz", "--min", "1", "--max", "0.5", "--out", path(&out)]).status.code(),
        Some(1)
    );
    let missing = dir.path().join("no/such/dir/x.csv");
    assert_eq!(fdcert(&["sweep", "--model", "cz", "--out", path(&missing)]).status.code(), Some(1));
    assert_eq!(
        fdcert(&["estimate", "--model", "cz", "--param", "0.1", "--samples", "1", "--shots", "5", "--seed", "0", "--out", path(&out)])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(fdcert(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fdcert(&["--help"]).status.code(), Some(0));
    assert_eq!(fdcert(&["--version"]).status.code(), Some(0));
}

#[test]
fn verify_quick_passes() {
    let o = fdcert(&["verify"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 10);
    assert!(!text.contains("FAIL "));
}
