//! End-to-end tests of the command-line surface: exit codes, file
//! round-trips, and deterministic output.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bispec"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const PROLATE_PROBLEM: &str = r#"{
  "context": { "kind": "exp" },
  "endpoints": { "x_point": "1", "y_point": "i", "x_mode": "sym", "y_mode": "sym" },
  "l_target": 1,
  "m_target": 1
}"#;

#[test]
fn solve_writes_result_and_witness_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    let out = dir.path().join("result.json");
    std::fs::write(&problem, PROLATE_PROBLEM).unwrap();
    let (code, _, stderr) = run(&[
        "solve",
        problem.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result["dimension"], 2);
    assert_eq!(result["system"]["cols"], 4);
    let witness = result["nonconstant_witness"]["x"].as_str().unwrap();
    assert!(witness.contains("Dx^2"));

    // round-trip: the printed witness must reparse and pass verification
    let (code, stdout, _) = run(&[
        "verify",
        witness,
        "--context",
        "exp",
        "--x-endpoint",
        "1",
        "--y-endpoint",
        "i",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("bisymmetric: true"));
}

#[test]
fn solve_output_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    std::fs::write(&problem, PROLATE_PROBLEM).unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let (code, _, _) = run(&[
            "solve",
            problem.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap()
    );
}

#[test]
fn malformed_expression_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    std::fs::write(
        &problem,
        r#"{
          "context": { "kind": "exp" },
          "u": "x*++Dx",
          "endpoints": { "x_point": "1", "y_point": "i", "x_mode": "sym", "y_mode": "sym" },
          "l_target": 1,
          "m_target": 1
        }"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&["solve", problem.to_str().unwrap()]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn constants_only_solution_signals_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    std::fs::write(
        &problem,
        r#"{
          "context": { "kind": "exp" },
          "endpoints": { "x_point": "1", "y_point": "i", "x_mode": "sym", "y_mode": "sym" },
          "l_target": 0,
          "m_target": 0
        }"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["solve", problem.to_str().unwrap()]);
    assert_eq!(code, 3);
    let result: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(result["nonconstant_witness"], serde_json::Value::Null);
}

#[test]
fn large_candidate_space_requires_slow_ok() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    std::fs::write(
        &problem,
        r#"{
          "context": { "kind": "exp" },
          "endpoints": { "x_point": "1", "y_point": "i", "x_mode": "sym", "y_mode": "sym" },
          "l_target": 10,
          "m_target": 10
        }"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&["solve", problem.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--slow-ok"), "stderr: {stderr}");
}

#[test]
fn grassmannian_pipeline_chains_into_solver() {
    let dir = tempfile::tempdir().unwrap();
    let conds = dir.path().join("conditions.json");
    std::fs::write(
        &conds,
        r#"{ "conditions": [ { "point": "0", "coeffs": ["0", "1"] } ] }"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["grassmannian", conds.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("u: x*Dx - 1"), "stdout: {stdout}");
    assert!(stdout.contains("q: y"), "stdout: {stdout}");
    assert!(stdout.contains("lagrangian: true"));
    assert!(stdout.contains("sigma-stable: true"));

    let out = dir.path().join("result.json");
    let (code, _, stderr) = run(&[
        "grassmannian",
        conds.to_str().unwrap(),
        "--solve",
        "--x-endpoint",
        "1",
        "--y-endpoint",
        "i",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let witness = result["nonconstant_witness"]["x"].as_str().unwrap();
    assert!(witness.contains("Dx^2"));
}

#[test]
fn sigma_unstable_plane_is_rejected_with_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let conds = dir.path().join("conditions.json");
    std::fs::write(
        &conds,
        r#"{ "conditions": [ { "point": "1", "coeffs": ["1"] } ] }"#,
    )
    .unwrap();
    let (code, stdout, stderr) = run(&["grassmannian", conds.to_str().unwrap()]);
    assert_eq!(code, 4, "stdout: {stdout}");
    assert!(stderr.contains("plane rejected"));
}

#[test]
fn algebra_utilities_print_canonical_forms() {
    let (code, stdout, _) = run(&["algebra", "adjoint", "x*Dx"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "-x*Dx - 1");

    let (code, stdout, _) = run(&["algebra", "fourier", "x^2*Dx"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "y*Dy^2");

    let (code, stdout, _) = run(&["algebra", "mul", "Dx", "x"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "x*Dx + 1");

    let (code, stdout, _) = run(&[
        "algebra", "basis", "--context", "bessel", "--nu", "1/2", "--L", "1", "--M", "1",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("4 elements"), "stdout: {stdout}");

    // applying x∂ to a rational function of x
    let (code, stdout, _) = run(&["algebra", "apply", "x*Dx", "x^3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "3*x^3");
}
