//! The `simulate` subcommand: parse a sweep config, run it, write the
//! CSV report and a plain-text summary, and echo the summary to stdout.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args as ClapArgs;
use nrsim_core::sim::{emit_report, parse_config, probe_estimate, run_sweep, SimConfig};

/// Arguments for `nrsim simulate`.
#[derive(ClapArgs)]
pub struct Args {
    /// Sweep configuration file (flat `key = value` lines).
    #[arg(long)]
    pub config: PathBuf,

    /// Output CSV path; a `.summary.txt` sibling is written next to it.
    #[arg(long)]
    pub out: PathBuf,

    /// Overrides the seed from the config file.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Caps the rayon worker count (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,

    /// Also dump one slot's channel estimates per SNR point.
    #[arg(long)]
    pub dump_estimates: bool,
}

pub fn run(args: &Args) -> Result<(), Box<dyn Error>> {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| run_sweep(&cfg)),
        None => run_sweep(&cfg),
    }?;
    emit_report(&report, &args.out)?;
    if args.dump_estimates {
        dump_estimates(&cfg, &args.out)?;
    }
    print!("{}", report.summary());
    Ok(())
}

/// Writes `<out>.estimates.csv` holding the channel estimate of trial 0
/// at every sweep point, one row per resource element.
fn dump_estimates(cfg: &SimConfig, out: &Path) -> Result<(), Box<dyn Error>> {
    let mut csv = String::from("snr_db,rx,port,subcarrier,symbol,re,im\n");
    for snr_db in cfg.snr_points() {
        let est = probe_estimate(cfg, snr_db, 0)?;
        for rx in 0..est.n_rx() {
            for port in 0..est.n_ports() {
                let grid = est.grid(rx, port);
                let (n_sc, n_sym) = grid.dim();
                for l in 0..n_sym {
                    for k in 0..n_sc {
                        let h = grid[(k, l)];
                        csv.push_str(&format!("{snr_db},{rx},{port},{k},{l},{},{}\n", h.re, h.im));
                    }
                }
            }
        }
    }
    let mut path = out.as_os_str().to_owned();
    path.push(".estimates.csv");
    fs::write(PathBuf::from(path), csv)?;
    Ok(())
}
