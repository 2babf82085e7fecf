//! Sweep results: per-point metric rows, CSV and text rendering, and
//! atomic file emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::Result;

use super::config::SimConfig;

/// Aggregated metrics of one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointReport {
    pub snr_db: f64,
    /// Slots actually simulated (early stop may cut the configured count).
    pub trials: usize,
    /// Code blocks those slots carried.
    pub blocks: u64,
    pub block_errors: u64,
    pub bler: f64,
    /// Coded-bit error rate at the demapper output.
    pub ber_pre: f64,
    /// Information-bit error rate after decoding.
    pub ber_post: f64,
    /// Mean equalized-pilot error magnitude, percent.
    pub evm_pct: f64,
    /// Mean decoder iterations per code block.
    pub mean_iters: f64,
    /// Air time simulated, seconds.
    pub elapsed_s: f64,
}

/// A data asset the run depended on, with its content digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Asset {
    pub name: String,
    pub sha256: String,
}

/// A full sweep: the configuration it ran under, the assets it loaded,
/// and one metric row per SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub config: SimConfig,
    pub assets: Vec<Asset>,
    pub points: Vec<PointReport>,
}

pub const CSV_HEADER: &str =
    "snr_db,blocks,block_errors,bler,ber_pre,ber_post,evm_pct,mean_iters,elapsed_s";

impl SimReport {
    /// The machine-readable report: a fixed 9-column CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                p.snr_db,
                p.blocks,
                p.block_errors,
                p.bler,
                p.ber_pre,
                p.ber_post,
                p.evm_pct,
                p.mean_iters,
                p.elapsed_s
            );
        }
        out
    }

    /// A human-readable companion: config echo, asset digests, and a
    /// fixed-width metric table.
    pub fn summary(&self) -> String {
        let mut out = String::from("pusch link-level sweep\n\n[config]\n");
        out.push_str(&self.config.to_config_text());
        out.push_str("\n[assets]\n");
        for a in &self.assets {
            let _ = writeln!(out, "{} = {}", a.name, a.sha256);
        }
        let _ = writeln!(
            out,
            "\n[points]\n{:>8} {:>8} {:>7} {:>10} {:>10} {:>10} {:>8} {:>6} {:>9}",
            "snr_db",
            "blocks",
            "errors",
            "bler",
            "ber_pre",
            "ber_post",
            "evm_pct",
            "iters",
            "elapsed_s"
        );
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:>8.2} {:>8} {:>7} {:>10.4e} {:>10.4e} {:>10.4e} {:>8.2} {:>6.2} {:>9.3}",
                p.snr_db,
                p.blocks,
                p.block_errors,
                p.bler,
                p.ber_pre,
                p.ber_post,
                p.evm_pct,
                p.mean_iters,
                p.elapsed_s
            );
        }
        out
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the CSV to `path` and the summary alongside it, each through
/// a temp-file rename so readers never observe a partial report.
pub fn emit_report(report: &SimReport, path: &Path) -> Result<()> {
    write_atomic(path, &report.to_csv())?;
    write_atomic(&path.with_extension("summary.txt"), &report.summary())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SimReport {
        SimReport {
            config: SimConfig::default(),
            assets: vec![Asset {
                name: "bg2_s6.csv".into(),
                sha256: "ab".repeat(32),
            }],
            points: vec![
                PointReport {
                    snr_db: -10.0,
                    trials: 4,
                    blocks: 8,
                    block_errors: 8,
                    bler: 1.0,
                    ber_pre: 0.21,
                    ber_post: 0.35,
                    evm_pct: 60.0,
                    mean_iters: 20.0,
                    elapsed_s: 0.002,
                },
                PointReport {
                    snr_db: -9.0,
                    trials: 4,
                    blocks: 8,
                    block_errors: 0,
                    bler: 0.0,
                    ber_pre: 0.1,
                    ber_post: 0.0,
                    evm_pct: 40.0,
                    mean_iters: 3.5,
                    elapsed_s: 0.002,
                },
            ],
        }
    }

    #[test]
    fn an_empty_sweep_renders_a_header_only_csv() {
        let mut r = sample();
        r.points.clear();
        assert_eq!(r.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn every_row_keeps_nine_columns() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert_eq!(row.split(',').count(), 9, "row {row}");
        }
    }

    #[test]
    fn re_emitting_overwrites_with_identical_bytes() {
        let dir = std::env::temp_dir().join("nrsim_report_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep.csv");
        fs::write(&path, "stale").unwrap();
        let report = sample();
        emit_report(&report, &path).unwrap();
        let first = fs::read(&path).unwrap();
        emit_report(&report, &path).unwrap();
        let second = fs::read(&path).unwrap();
        assert_eq!(first, second);
        assert_eq!(first, report.to_csv().into_bytes());
        let summary = fs::read_to_string(path.with_extension("summary.txt")).unwrap();
        assert_eq!(summary, report.summary());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn the_summary_carries_config_assets_and_points() {
        let s = sample().summary();
        assert!(s.contains("mcs = 0"));
        assert!(s.contains("bg2_s6.csv = abab"));
        assert!(s.contains("[points]"));
        assert!(s.lines().count() > 25);
    }
}
