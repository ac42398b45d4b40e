use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn algco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algco"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("ALGCO_THREADS")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    algco(args).status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_documents_every_exit_code() {
    let out = stdout(&algco(&["--help"]));
    for needle in ["Exit codes:", "0  success", "1  a checked", "2  input error", "3  the representation is not flat", "4  two routes", "ALGCO_THREADS"] {
        assert!(out.contains(needle), "missing {needle:?} in help:\n{out}");
    }
    for sub in ["ce", "kunneth", "glue", "mv", "homotopy", "flows", "cylinder", "verify-all"] {
        assert!(out.contains(sub), "subcommand {sub} not listed");
    }
}

#[test]
fn ce_reports_betti_numbers_as_json() {
    let out = algco(&["--format", "json", "ce", "--algebra", "heisenberg3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("[1,2,2,1]"), "{text}");
}

#[test]
fn exit_codes_by_failure_kind() {
    assert_eq!(code(&["ce", "--algebra", "algebras/sl2.json", "--rep", "reps/sl2_broken.json"]), 3);
    assert_eq!(code(&["ce", "--algebra", "algebras/abelian1.json", "--rep", "reps/abelian1_bad_shape.json"]), 2);
    assert_eq!(code(&["ce", "--algebra", "no_such_file.json"]), 2);
    assert_eq!(code(&["ce", "--algebra", "nonsense"]), 2);
    assert_eq!(code(&["mv", "--cover", "covers/point_heisenberg3.json"]), 2);
    assert_eq!(code(&["homotopy", "--input", "homotopy/negative_control.json"]), 1);
    assert_eq!(code(&["homotopy", "--input", "homotopy/so3_poly.json", "--steps", "5"]), 2);
}

#[test]
fn bad_thread_count_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_algco"))
        .args(["ce", "--algebra", "sl2"])
        .env("ALGCO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_algco"))
        .args(["ce", "--algebra", "sl2"])
        .env("ALGCO_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--format", "json", "glue", "--cover", "covers/circle_sl2.json"][..],
        &["--format", "json", "cylinder", "--input", "cylinder/sl2_adjoint.json"][..],
        &["--format", "json", "homotopy", "--input", "homotopy/so3_rotated.json"][..],
    ] {
        let a = algco(args);
        let b = algco(args);
        assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
        assert_eq!(a.stdout, b.stdout, "output differs between runs of {args:?}");
    }
}

#[test]
fn tolerance_flag_overrides_inputs() {
    // an absurdly tight tolerance turns a passing numeric check into a failure
    assert_eq!(code(&["homotopy", "--input", "homotopy/so3_samples.json"]), 0);
    assert_eq!(code(&["--tol", "0", "homotopy", "--input", "homotopy/so3_samples.json"]), 1);
}

#[test]
fn representatives_flag_adds_cocycles() {
    let plain = stdout(&algco(&["--format", "json", "ce", "--algebra", "sl2"]));
    let reps = stdout(&algco(&["--format", "json", "--representatives", "ce", "--algebra", "sl2"]));
    assert!(reps.len() > plain.len());
    assert!(reps.contains("representatives"));
}

#[test]
fn verify_all_meets_every_expectation() {
    let out = algco(&["verify-all", "--manifest", "manifest.json"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}
