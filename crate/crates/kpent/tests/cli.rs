//! End-to-end tests of the `kpent` binary: subcommand surface, file
//! round-trips, and the exit-code contract (0 pass, 1 fail, 2 config
//! error).

use std::process::Command;

fn kpent() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kpent"))
}

fn stdout_of(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn selftest_passes() {
    let out = kpent().arg("selftest").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("registry-coverage,pass"));
    assert!(text.contains("renyi-gap-at-1,pass"));
}

#[test]
fn entropy_of_builtin_density() {
    let out = kpent()
        .args(["entropy", "--density", "uniform:a=0,b=1", "--grid", "512"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("alpha,entropy_nats"));
    assert!(text.contains("entropy_power,1"), "{text}");
}

#[test]
fn entropy_without_inputs_is_config_error() {
    let out = kpent().arg("entropy").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_theorem_is_config_error() {
    let out = kpent().args(["verify", "T9.9-nothing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown theorem"));
}

#[test]
fn grid_files_round_trip_through_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let narrow = dir.path().join("narrow.grid");
    let wide = dir.path().join("wide.grid");
    let sum = dir.path().join("sum.grid");
    let star = dir.path().join("star.grid");

    // Two uniform densities at matching spacing (1/256).
    let mk = |spec: &str, cells: &str, path: &std::path::Path| {
        let out = kpent()
            .args([
                "entropy",
                "--density",
                spec,
                "--grid",
                cells,
                "--save-grid",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    mk("uniform:a=0,b=1", "256", &narrow);
    mk("uniform:a=0,b=2", "512", &wide);
    assert!(narrow.exists() && wide.with_extension("grid.json").exists());

    // Convolve writes a grid we can rearrange next.
    let out = kpent()
        .args([
            "convolve",
            "--a",
            narrow.to_str().unwrap(),
            "--b",
            wide.to_str().unwrap(),
            "--out-grid",
            sum.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = kpent()
        .args([
            "rearrange",
            "--input",
            sum.to_str().unwrap(),
            "--out-grid",
            star.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());

    // The narrow uniform majorizes the wide one; the reverse fails (exit 1).
    let out = kpent()
        .args([
            "majorize",
            "--f",
            wide.to_str().unwrap(),
            "--g",
            narrow.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("holds,true"));

    let out = kpent()
        .args([
            "majorize",
            "--f",
            narrow.to_str().unwrap(),
            "--g",
            wide.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("holds,false"));
}

#[test]
fn verify_emits_fixed_csv_columns() {
    let out = kpent()
        .args([
            "verify",
            "C2.1-convexKlinearT",
            "--seed",
            "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theorem_id,lhs,rhs,margin,tolerance,pass,lhs_provenance,rhs_provenance,seed,runtime_ms"
    );
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 10);
    assert!(first.starts_with("C2.1-convexKlinearT"));
}

#[test]
fn kp_check_emits_geometry_schema() {
    let out = kpent()
        .args([
            "kp-check", "--mode", "union", "--k", "3", "--d", "2", "--instances", "2",
            "--samples", "20000", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.starts_with("theorem_id,k,d,lhs,rhs,margin,stderr,samples,seed,pass"));
}

#[test]
fn sweep_and_json_output() {
    let out = kpent()
        .args([
            "sweep",
            "C2.3-intrinsic2d",
            "--param",
            "lip",
            "--values",
            "0.5,0.9",
            "--format",
            "json",
            "--seed",
            "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let arr = rows.as_array().unwrap();
    assert!(arr.iter().any(|r| r["theorem_id"]
        .as_str()
        .unwrap()
        .ends_with("@lip=0.5")));
}

#[test]
fn falsify_reports_zero_flags_and_honors_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let out = kpent()
        .args([
            "falsify",
            "KP-intersection",
            "--trials",
            "3",
            "--samples",
            "20000",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(summary["trials"], 3);
    assert_eq!(summary["flags"].as_array().unwrap().len(), 0);
}

#[test]
fn falsify_rejects_proved_statements() {
    let out = kpent()
        .args(["falsify", "T2.1-lambdaX", "--trials", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "instances = 1\nseed = 3\nlip = 0.8\n").unwrap();
    let out = kpent()
        .args(["verify", "C2.3-intrinsic2d", "--config", good.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    // two rows per instance (V1 and V2) plus the header
    assert_eq!(stdout_of(&out).lines().count(), 3);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "instances = 1\nnot_a_knob = true\n").unwrap();
    let out = kpent()
        .args(["verify", "C2.3-intrinsic2d", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diversity_discrete_values() {
    let out = kpent()
        .args([
            "diversity",
            "--discrete",
            r#"{"weights":[0.5,0.5],"points":[[0.0],[1.0]]}"#,
            "--t",
            "1,1000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    // 2/(1+e^-t): ~1.4621 at t=1, ~2 at t=1000
    assert!(text.contains("1,1.462"), "{text}");
    assert!(text.lines().last().unwrap().contains(",2"), "{text}");
}

#[test]
fn epi_check_runs_closed_form_suite() {
    let out = kpent()
        .args(["epi-check", "--which", "linear", "--d", "2", "--instances", "3", "--seed", "8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_of(&out).contains("T3.1-linearEPI"));
}
