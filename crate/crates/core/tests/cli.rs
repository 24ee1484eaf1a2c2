use std::process::Command;

fn fnse() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fnse"))
}

#[test]
fn simulate_writes_identical_outputs_and_norms_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = fnse()
            .args(["simulate", "--r", "2", "--snapshots", "8", "--outdir"])
            .arg(dir.path().join(name))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join(name).join("series.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    assert!(a.starts_with(b"# normseries/v1\n"));
    let out = fnse().arg("norms").arg(dir.path().join("a/u_final.fnss")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("|u|_B^-1 lp") && text.contains("|u|_inf"));
}

#[test]
fn invalid_configs_exit_with_two() {
    let out = fnse().args(["simulate", "--beta", "0.7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "r = 2\nr = 3\n").unwrap();
    let out = fnse().arg("simulate").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn override_marks_results_unsupported() {
    let out = fnse()
        .args(["simulate", "--r", "2", "--gamma", "9", "--snapshots", "6", "--override-constraints"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("UNSUPPORTED"));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# two pairs\nr = 2\nK_override = 4\nsnapshots = 6\n").unwrap();
    let out = fnse().arg("simulate").arg("--config").arg(&cfg).args(["--r", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("r = 3  K = 4"));
}

#[test]
fn sweep_prints_summary_and_fit() {
    let out = fnse().args(["sweep", "--r-list", "2,3", "--snapshots", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# sweepsummary/v1") && text.contains("# sweepfit/v1"));
    let out = fnse().args(["sweep", "--r-list", "2,3", "--gamma", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_snapshot_is_an_error() {
    let out = fnse().args(["norms", "/nonexistent/file.fnss"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
