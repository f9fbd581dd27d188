use std::process::{Command, Output};

fn odbif(args: &[&str], out_dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odbif"))
        .args(args)
        .env("ODBIF_OUT_DIR", out_dir)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn slab_constants_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = odbif(
        &[
            "constants",
            "--problem",
            "slab",
            "--n",
            "1",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "odbif/1");
    assert_eq!(v["constants"]["d_n"].as_f64().unwrap(), 4.0 / 3.0);
}

#[test]
fn ball_constants_carry_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = odbif(
        &[
            "constants",
            "--problem",
            "dirichlet",
            "--N",
            "3",
            "--n",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["constants"]["lambda_n"].as_f64().unwrap() - 5.753746).abs() < 1e-6);
    assert!(v["provenance"]["nu1_residual"].as_f64().unwrap().abs() < 1e-11);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        odbif(&["constants", "--problem", "dirichlet"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        odbif(
            &["constants", "--problem", "dirichlet", "--n", "1"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    let bad_sweep = [
        "verify",
        "branch",
        "--problem",
        "slab",
        "--n",
        "1",
        "--s",
        "0.01,0.02,0.03,0.04",
    ];
    assert_eq!(odbif(&bad_sweep, dir.path()).status.code(), Some(2));
    let too_large = [
        "export-profile",
        "--problem",
        "dirichlet",
        "--N",
        "1",
        "--n",
        "1",
        "--s",
        "5",
    ];
    assert_eq!(odbif(&too_large, dir.path()).status.code(), Some(2));
}

#[test]
fn kernel_text_lists_the_single_hit() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "kernel",
        "--problem",
        "dirichlet",
        "--N",
        "2",
        "--n",
        "2",
        "--kmax",
        "200",
        "--lmax",
        "200",
        "--format",
        "text",
    ];
    let out = odbif(&args, dir.path());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("hits: [(1,1)]"));
}

#[test]
fn verify_exit_code_follows_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let pass = odbif(
        &[
            "verify",
            "branch",
            "--problem",
            "slab",
            "--n",
            "1",
            "--s",
            "0.04,0.02,0.01,0.005",
        ],
        dir.path(),
    );
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(json(&pass)["verdict"], "PASS");
    let control = odbif(
        &[
            "verify",
            "branch",
            "--problem",
            "dirichlet",
            "--N",
            "1",
            "--n",
            "1",
            "--control",
        ],
        dir.path(),
    );
    assert_eq!(control.status.code(), Some(0));
    // four radial cells are too coarse for the grid-halving window
    let coarse = [
        "verify",
        "eigen",
        "--problem",
        "slab",
        "--n",
        "1",
        "--fine",
        "8x16",
        "--coarse",
        "4x8",
    ];
    let fail = odbif(&coarse, dir.path());
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json(&fail)["verdict"], "FAIL");
    let shifted = odbif(
        &[
            "verify",
            "linearization",
            "--problem",
            "slab",
            "--n",
            "1",
            "--eps",
            "0.01,0.01",
        ],
        dir.path(),
    );
    assert_eq!(shifted.status.code(), Some(2));
}

#[test]
fn export_profile_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "export-profile",
        "--problem",
        "dirichlet",
        "--N",
        "1",
        "--n",
        "1",
        "--s",
        "0.05",
        "--svg",
        "out.svg",
        "--csv",
        "out.csv",
    ];
    let out = odbif(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("out.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.starts_with("x,h\n"));
    assert_eq!(csv.lines().count(), 514);
}

#[test]
fn report_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = odbif(
        &[
            "spectrum",
            "--N",
            "1",
            "--count",
            "3",
            "--format",
            "csv",
            "--out",
            "spectrum.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("ell,nu,sqrt_nu"));
    assert_eq!(csv.lines().count(), 4);
}
