use hyperfrob::frobenius::FrobMatrix;
use hyperfrob::geometry::ProblemFile;
use hyperfrob::pipeline::{run, Mode, RunConfig, HEURISTIC_STAMP};

const F2_QUARTIC: &str =
    "x^4 + x^3*z + x^2*y^2 + x^2*y*w + x^2*z^2 + x^2*z*w + x*y^3 + y^4 + y^3*w + y*z^3 + z^4 + z^2*w^2 + w^4";

fn problem(p: u64, n: usize, poly: &str, names: &[&str]) -> ProblemFile {
    ProblemFile {
        p,
        n,
        polynomial: poly.into(),
        variables: (!names.is_empty()).then(|| names.iter().map(|s| s.to_string()).collect()),
        ..Default::default()
    }
}

fn config(mode: Mode) -> RunConfig {
    RunConfig {
        mode,
        cache_dir: None,
        ..Default::default()
    }
}

#[test]
fn quartic_over_f2_uses_the_integral_basis() {
    // Pole order 3 needs the (h-1)! rescaling when p = 2.
    let cfg = RunConfig {
        precision: Some(2),
        prescreen: Some(6),
        i_max: 3,
        ..config(Mode::Full)
    };
    let out = run(&cfg, &problem(2, 3, F2_QUARTIC, &["x", "y", "z", "w"]));
    assert_eq!(out.exit_code, 0, "{:?}", out.report.error);
    assert_eq!(out.report.stamp, HEURISTIC_STAMP);
    let m = out.matrix.unwrap();
    assert_eq!(m.r, 2);
    assert_eq!(m.rank_mod_p(), 1);
    let z = out.report.zeta.unwrap();
    assert_eq!(z.counts, [5, 17, 77]);
    assert!(z.verdicts.iter().all(|v| v.pass));
}

#[test]
fn worker_count_does_not_change_the_matrix() {
    let pf = problem(5, 3, "x0^3 + x1^3 + x2^3 + x3^3 + x0*x1*x2 + 2*x1*x2*x3", &[]);
    let mut a = run(&RunConfig { workers: 1, ..config(Mode::Matrix) }, &pf);
    let mut b = run(&RunConfig { workers: 3, ..config(Mode::Matrix) }, &pf);
    assert_eq!(a.exit_code, 0);
    assert_eq!(a.matrix.unwrap().entries, b.matrix.unwrap().entries);
    // The memory estimate scales with the thread count by design.
    a.report.memory = None;
    b.report.memory = None;
    assert_eq!(a.report.to_json_without_timings(), b.report.to_json_without_timings());
}

#[test]
fn matrix_artifact_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    let cfg = RunConfig {
        matrix_out: Some(path.clone()),
        inline_matrix: false,
        ..config(Mode::Matrix)
    };
    let out = run(&cfg, &problem(7, 2, "x0^3 + x1^3 + 3*x2^3 + x0*x1*x2", &[]));
    assert_eq!(out.exit_code, 0);
    let back = FrobMatrix::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let m = out.matrix.unwrap();
    assert_eq!((back.p, back.r, back.dim), (m.p, m.r, m.dim));
    assert_eq!(back.entries, m.entries);
    assert!(out.report.matrix.unwrap().rows.is_none());
}

#[test]
fn plane_cubic_in_characteristic_three_is_unsupported() {
    // Smooth, but p divides d and the mod-p Jacobian quotient is too large.
    let pf = problem(3, 2, "x^3 + 2*x^2*y + x^2*z + x*y^2 + x*y*z + y^3 + 2*y*z^2", &["x", "y", "z"]);
    let out = run(&config(Mode::Basis), &pf);
    assert_eq!(out.exit_code, 1);
    assert_eq!(out.report.error.unwrap().kind, "unsupported");
}

#[test]
fn singular_input_is_rejected_before_any_matrix_work() {
    let pf = problem(3, 2, "x^3 + y^3 + z^3 + x*y*z + x^2*y", &["x", "y", "z"]);
    let out = run(&config(Mode::Full), &pf);
    assert_eq!(out.exit_code, 3);
    assert!(out.report.matrix.is_none());
}
