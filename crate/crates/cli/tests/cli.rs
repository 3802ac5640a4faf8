//! End-to-end tests of the binary: subcommands, flag overrides, output
//! files, and the documented exit codes (0 ok, 2 config, 3 degenerate,
//! 4 I/O).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ofdma-sched"))
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(
        &path,
        r#"
ues = 4
rbs = 4
ttis = 5
gbr_fraction = 0.5
seeds = [7]

[ga]
population_size = 10
max_generations = 10
"#,
    )
    .unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let csv = dir.path().join("run.csv");
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6); // header + 5 TTIs
    assert!(stdout(&out).contains("simulated 5 TTIs"));
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for csv in [&a, &b] {
        let out = bin()
            .args([
                "simulate",
                cfg.to_str().unwrap(),
                "--csv",
                csv.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let csv = dir.path().join("short.csv");
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--ttis",
            "2",
            "--scheduler",
            "max_tp",
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().contains(",max_tp,"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "ues = 0\n").unwrap();
    let out = bin()
        .args(["simulate", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.toml");
    let out = bin()
        .args(["simulate", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown keys are config errors too.
    std::fs::write(&path, "not_a_key = 1\n").unwrap();
    let out = bin()
        .args(["simulate", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_scenario_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("zero.csv");
    std::fs::write(
        &table,
        "mcs_index,min_cqi,rate_bits_per_rb_per_tti\n0,1,0.0\n",
    )
    .unwrap();
    let cfg = dir.path().join("degenerate.toml");
    std::fs::write(
        &cfg,
        format!(
            "ues = 3\nrbs = 3\nttis = 2\ngbr_fraction = 0.0\nmcs_table = \"{}\"\n",
            table.display()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["simulate", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--csv",
            "/nonexistent-dir/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn compare_prints_one_row_per_scheduler() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = bin()
        .args([
            "compare",
            cfg.to_str().unwrap(),
            "--schedulers",
            "max_tp,pf",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("max_tp\t")));
    assert!(text.lines().any(|l| l.starts_with("pf\t")));
}

#[test]
fn sweep_validates_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = bin()
        .args(["sweep", cfg.to_str().unwrap(), "--w1-grid", "0,0.5,1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["sweep", cfg.to_str().unwrap(), "--w1-grid", "0,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).lines().count() >= 3);
}

#[test]
fn warmstart_reports_medians() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.toml");
    std::fs::write(
        &path,
        r#"
ues = 4
rbs = 4
ttis = 14
gbr_fraction = 0.5
demand_cycle = 2
clusters = 2
seeds = [3]

[ga]
population_size = 10
max_generations = 10
"#,
    )
    .unwrap();
    let out = bin()
        .args(["warmstart", path.to_str().unwrap(), "--repeats", "2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("median_warm="));
}

#[test]
fn cluster_command_reads_exported_database() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("scenario.toml");
    let db_path = dir.path().join("demands.txt");
    std::fs::write(
        &cfg_path,
        r#"
ues = 4
rbs = 4
ttis = 8
gbr_fraction = 0.5
seeds = [7]

[ga]
population_size = 10
max_generations = 8
"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "simulate",
            cfg_path.to_str().unwrap(),
            "--demand-db",
            db_path.to_str().unwrap(),
            "--csv",
            dir.path().join("run.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());

    let out = bin()
        .args(["cluster", db_path.to_str().unwrap(), "-k", "2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("rows=8 k=2"));
    assert!(text.contains("cluster 0:"));
    assert!(text.contains("cluster 1:"));

    // More clusters than rows: insufficient data, generic failure code.
    let out = bin()
        .args(["cluster", db_path.to_str().unwrap(), "-k", "20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
