use std::path::Path;
use std::process::{Command, Output};

fn hyperfrob(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfrob"))
        .args(args)
        .env("HYPERFROB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn plan_mode_prints_s() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.toml", "p = 3\nn = 3\npolynomial = \"x0^4 + x1^4 + x2^4 + x3^4\"\n");
    let out = hyperfrob(&["--mode", "plan", "-r", "3", "--json", &f], dir.path());
    assert!(out.status.success());
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("\"s\": 7"), "{json}");
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "p = 9\nn = 2\npolynomial = \"x0^3 + x1^3 + x2^3\"\n");
    assert_eq!(hyperfrob(&["--mode", "basis", &bad], dir.path()).status.code(), Some(2));
    let unknown = write(dir.path(), "u.toml", "p = 5\nn = 2\npolynomial = \"x0^3\"\nfoo = 1\n");
    assert_eq!(hyperfrob(&["--mode", "basis", &unknown], dir.path()).status.code(), Some(2));
    let sing = write(dir.path(), "s.toml", "p = 5\nn = 2\npolynomial = \"x0^3 + x1^3 + x2^3 + 2*x0*x1*x2\"\n");
    assert_eq!(hyperfrob(&["--mode", "basis", &sing], dir.path()).status.code(), Some(3));
    let quartic = write(dir.path(), "q.toml", "p = 3\nn = 3\npolynomial = \"x0^4 + x1^4 + x2^4 + x3^4\"\n");
    let out = hyperfrob(&["--mode", "zeta", "--imax", "4", "--count-cap", "1000", &quartic], dir.path());
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn full_curve_run_writes_report_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.toml", "p = 7\nn = 2\npolynomial = \"x0^3 + x1^3 + 3*x2^3 + x0*x1*x2\"\n");
    let report = dir.path().join("r.json");
    let matrix = dir.path().join("m.txt");
    let args = [
        "--imax",
        "2",
        "--report",
        report.to_str().unwrap(),
        "--matrix-out",
        matrix.to_str().unwrap(),
        &f,
    ];
    let out = hyperfrob(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("status: certified"), "{summary}");
    let text = std::fs::read_to_string(&matrix).unwrap();
    assert!(text.starts_with("hyperfrob-matrix 1"));
    let first = std::fs::read_to_string(&report).unwrap();
    let again = hyperfrob(&args, dir.path());
    assert!(again.status.success());
    let second = std::fs::read_to_string(&report).unwrap();
    let strip = |s: &str| s.split("\"timings\"").next().unwrap().to_string();
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn prescreen_is_stamped_heuristic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.toml", "p = 5\nn = 2\npolynomial = \"x0^3 + x1^3 + x2^3 + x0*x1*x2\"\n");
    let out = hyperfrob(&["--mode", "matrix", "--prescreen", "2", &f], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("heuristic"));
}
