//! Compiles C code against the generated header and, when the static
//! library is available, links and runs it. Skipped without a C compiler.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn syntax_check(cc: &str, args: &[&str], file: &Path) {
    let out = Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Wextra", "-Werror"])
        .args(args)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(file)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = compiler() else {
        eprintln!("skipped: no C compiler");
        return;
    };
    syntax_check(&cc, &["-std=c99", "-x", "c"], &crate_dir().join("tests/c/smoke.c"));
    syntax_check(&cc, &["-std=c++11", "-x", "c++"], &crate_dir().join("include/fdcert.h"));
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("skipped: no C compiler");
        return;
    };
    let lib = profile_dir().join("libfdcert_ffi.a");
    if !lib.exists() {
        eprintln!("skipped: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let out = Command::new(&cc)
        .arg("-std=c99")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
