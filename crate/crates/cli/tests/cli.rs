//! End-to-end checks of the `nrsim` binary: each subcommand is spawned
//! as a child process and judged on exit status and emitted files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nrsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const TINY_SWEEP: &str = "mcs = 0\ntrials = 2\nsnr_start_db = 30\nsnr_stop_db = 30\n";

#[test]
fn simulate_writes_report_summary_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.cfg", TINY_SWEEP);
    let out = nrsim(
        &["simulate", "--config", &cfg, "--out", "sweep.csv"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,blocks,block_errors,bler,ber_pre,ber_post,evm_pct,mean_iters,elapsed_s"
    );
    assert_eq!(lines.count(), 1);

    let summary = fs::read_to_string(dir.path().join("sweep.summary.txt")).unwrap();
    assert!(summary.contains("[points]"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pusch link-level sweep"));
}

#[test]
fn worker_counts_do_not_change_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.cfg",
        "mcs = 0\ntrials = 4\nsnr_start_db = 0\nsnr_stop_db = 0\n",
    );
    for workers in ["1", "2"] {
        let out = nrsim(
            &[
                "simulate",
                "--config",
                &cfg,
                "--out",
                &format!("w{workers}.csv"),
                "--workers",
                workers,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = fs::read(dir.path().join("w1.csv")).unwrap();
    let b = fs::read(dir.path().join("w2.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn the_seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.cfg", TINY_SWEEP);
    let out = nrsim(
        &[
            "simulate",
            "--config",
            &cfg,
            "--out",
            "seeded.csv",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let summary = fs::read_to_string(dir.path().join("seeded.summary.txt")).unwrap();
    assert!(summary.contains("seed = 7"));
}

#[test]
fn a_bad_config_key_is_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "bogus = 1\n");
    let out = nrsim(
        &["simulate", "--config", &cfg, "--out", "never.csv"],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("bogus"), "stderr: {stderr}");
    assert!(!dir.path().join("never.csv").exists());
}

#[test]
fn dump_estimates_writes_one_row_per_resource_element() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.cfg",
        "mcs = 0\ntrials = 1\nsnr_start_db = 20\nsnr_stop_db = 20\n",
    );
    let out = nrsim(
        &[
            "simulate",
            "--config",
            &cfg,
            "--out",
            "probe.csv",
            "--dump-estimates",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dump = fs::read_to_string(dir.path().join("probe.csv.estimates.csv")).unwrap();
    let mut lines = dump.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,rx,port,subcarrier,symbol,re,im"
    );
    // 2 rx antennas x 2 ports x 1272 subcarriers x 14 symbols
    assert_eq!(lines.count(), 2 * 2 * 1272 * 14);
}

#[test]
fn filters_design_dumps_taps_and_response() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "filter.cfg",
        "taps = 101\nresponse_points = 64\ntaps_out = t.csv\nresponse_out = r.csv\n",
    );
    let out = nrsim(&["filters", "design", "--config", &cfg], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let taps = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(taps.lines().count(), 102);
    assert_eq!(taps.lines().next().unwrap(), "index,coefficient");

    let resp = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(resp.lines().count(), 65);
    let first = resp.lines().nth(1).unwrap();
    let amp: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!((amp - 1.0).abs() < 1e-2, "passband gain {amp}");
}

#[test]
fn filters_design_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "filter.cfg", "ripple = 0.1\n");
    let out = nrsim(&["filters", "design", "--config", &cfg], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("ripple"), "stderr: {stderr}");
}

#[test]
fn ldpc_selftest_reports_ok() {
    let dir = tempfile::tempdir().unwrap();
    let out = nrsim(&["ldpc", "selftest"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ok: selftest passed"));
    assert!(stdout.contains("BG1 z=384"));
}
