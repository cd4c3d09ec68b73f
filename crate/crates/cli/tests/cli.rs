use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::tempdir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necrobifurc"))
        .current_dir(dir)
        .env_remove("NECROBIFURC_JOBS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().to_string())
        .collect()
}

#[test]
fn steady_demo_profile_is_bounded() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["steady", "--out-dir", "out", "--limit"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("out/steady_profile.csv")).unwrap();
    assert!(csv.starts_with("r,sigma,sigma_prime,p,p_prime,E,F,sigma_limit,sigma_prime_limit\n"));
    let sigma: Vec<f64> = column(&csv, "sigma")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(sigma.len(), 201);
    assert!(sigma.iter().all(|v| (0.0..=1.0).contains(v)));
    let summary = fs::read_to_string(dir.path().join("out/steady_summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    for key in ["A1", "A2", "C1", "C2", "apopt"] {
        assert!(header.split(',').any(|h| h == key), "{header}");
    }
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempdir().unwrap();
    for (sub, jobs) in [("a", "1"), ("b", "4")] {
        let out = run(
            dir.path(),
            &[
                "bifurcate",
                "--chi",
                "1,10,0.5",
                "--l-max",
                "12",
                "--out-dir",
                sub,
                "--jobs",
                jobs,
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("a/bifurcation.csv")).unwrap();
    let b = fs::read(dir.path().join("b/bifurcation.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bifurcation_rows_are_sorted_and_mode_zero_vanishes() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["bifurcate", "--chi", "5,1", "--l-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("bifurcation.csv")).unwrap();
    let ls = column(&csv, "l");
    let chis = column(&csv, "chi");
    assert_eq!(ls.len(), 14);
    assert_eq!(
        (ls[0].as_str(), chis[0].parse::<f64>().unwrap()),
        ("0", 1.0)
    );
    assert_eq!(chis[13].parse::<f64>().unwrap(), 5.0);
    let p = column(&csv, "P_l");
    assert_eq!(p[0].parse::<f64>().unwrap(), 0.0);
    assert!(column(&csv, "status").iter().all(|s| s == "ok"));
}

#[test]
fn fig4_preset_switches_monotonicity() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["bifurcate", "--preset", "fig4", "--gnuplot"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("bifurcation.csv")).unwrap();
    let chis = column(&csv, "chi");
    let flags = column(&csv, "monotone_flag");
    let flag_at = |chi: f64| {
        let k = chis
            .iter()
            .position(|c| c.parse::<f64>().unwrap() == chi)
            .unwrap();
        flags[k].clone()
    };
    assert_eq!(flag_at(1.0), "true");
    assert_eq!(flag_at(100.0), "false");
    let limit = fs::read_to_string(dir.path().join("bifurcation_limit.csv")).unwrap();
    assert!(column(&limit, "monotone_flag").iter().all(|f| f == "true"));
    assert!(dir.path().join("bifurcation.gp").exists());
}

#[test]
fn empty_chi_list_is_a_config_error() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "[bifurcate]\nchi = []\n").unwrap();
    let out = run(
        dir.path(),
        &["bifurcate", "--config", "run.toml", "--out-dir", "out"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_config_leaves_no_output() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[params\nbeta = 1\n").unwrap();
    let out = run(
        dir.path(),
        &["steady", "--config", "bad.toml", "--out-dir", "out"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());

    fs::write(dir.path().join("unknown.toml"), "[params]\nbetta = 1\n").unwrap();
    let out = run(
        dir.path(),
        &["steady", "--config", "unknown.toml", "--out-dir", "out"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = run(
        dir.path(),
        &["steady", "--sigma-ul", "1.5", "--out-dir", "out"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[params]\nbeta = 2.0\nchi = 3.0\n[steady]\nn = 10\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["steady", "--config", "run.toml", "--beta", "4"],
    );
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("steady_summary.csv")).unwrap();
    assert_eq!(column(&summary, "beta")[0].parse::<f64>().unwrap(), 4.0);
    assert_eq!(column(&summary, "chi")[0].parse::<f64>().unwrap(), 3.0);
    let profile = fs::read_to_string(dir.path().join("steady_profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 12);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("file"), "").unwrap();
    let out = run(dir.path(), &["steady", "--out-dir", "file/sub"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mode_ranges_are_bounded() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["bifurcate", "--l-max", "65"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["modes", "--l", "2,99"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["modes", "--l", "0,2,5", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 5);
}

#[test]
fn limits_command_writes_both_tables() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["limits", "--l-max", "8", "--n", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let profile = fs::read_to_string(dir.path().join("limits_profile.csv")).unwrap();
    let sigma = column(&profile, "sigma_limit");
    assert_eq!(sigma.last().unwrap().parse::<f64>().unwrap(), 1.0);
    let modes = fs::read_to_string(dir.path().join("limits_modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 1 + 7);
}

#[test]
fn verify_reports_pass_and_injected_failure() {
    let dir = tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "verify",
            "--suite",
            "lemma4.2",
            "--beta",
            "0.1,1,10",
            "--l",
            "2",
            "--out-dir",
            "ok",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][0]["name"], "lemma4.2");
    assert!(dir.path().join("ok/verify_report.json").exists());

    let out = run(
        dir.path(),
        &[
            "verify",
            "--suite",
            "lemma4.2",
            "--self-test-negative",
            "--out-dir",
            "neg",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    let bessel = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "bessel")
        .unwrap();
    assert_eq!(bessel["passed"], false);

    let out = run(
        dir.path(),
        &["verify", "--suite", "nope", "--out-dir", "bad"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("bad").exists());
}

#[test]
fn full_verification_passes() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--seed", "20240917"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 10);
}
