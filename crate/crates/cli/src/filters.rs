//! The `filters design` subcommand: design a windowed-sinc lowpass and
//! dump its taps and sampled frequency response as CSV.

use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args as ClapArgs;
use nrsim_core::waveform::{design_lowpass, FS, N_SC, SCS};

/// Arguments for `nrsim filters design`.
#[derive(ClapArgs)]
pub struct Args {
    /// Optional design file overriding the transmit-filter defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Design inputs; the defaults reproduce the transmit lowpass.
struct Spec {
    taps: usize,
    f_pass_hz: f64,
    f_stop_hz: f64,
    fs_hz: f64,
    response_points: usize,
    taps_out: PathBuf,
    response_out: PathBuf,
}

impl Default for Spec {
    fn default() -> Self {
        Spec {
            taps: 153,
            f_pass_hz: 0.5 * SCS * N_SC as f64,
            f_stop_hz: 20.0e6,
            fs_hz: FS,
            response_points: 512,
            taps_out: PathBuf::from("filter_taps.csv"),
            response_out: PathBuf::from("filter_response.csv"),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad value for `{key}`: `{value}`"))
}

fn parse_spec(text: &str) -> Result<Spec, String> {
    let mut spec = Spec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "taps" => spec.taps = num(key, value)?,
            "f_pass_hz" => spec.f_pass_hz = num(key, value)?,
            "f_stop_hz" => spec.f_stop_hz = num(key, value)?,
            "fs_hz" => spec.fs_hz = num(key, value)?,
            "response_points" => spec.response_points = num(key, value)?,
            "taps_out" => spec.taps_out = PathBuf::from(value),
            "response_out" => spec.response_out = PathBuf::from(value),
            _ => return Err(format!("unknown filter design key `{key}`")),
        }
    }
    if spec.response_points < 2 {
        return Err("response_points must be at least 2".into());
    }
    Ok(spec)
}

pub fn run(args: &Args) -> Result<(), Box<dyn Error>> {
    let spec = match &args.config {
        Some(path) => parse_spec(&fs::read_to_string(path)?)?,
        None => Spec::default(),
    };
    let fir = design_lowpass(spec.taps, spec.f_pass_hz, spec.f_stop_hz, spec.fs_hz)?;

    let mut taps_csv = String::from("index,coefficient\n");
    for (i, t) in fir.taps().iter().enumerate() {
        taps_csv.push_str(&format!("{i},{t}\n"));
    }
    fs::write(&spec.taps_out, taps_csv)?;

    let mut resp_csv = String::from("freq_hz,amplitude\n");
    for i in 0..spec.response_points {
        let f = 0.5 * spec.fs_hz * i as f64 / (spec.response_points - 1) as f64;
        resp_csv.push_str(&format!("{f},{}\n", fir.amplitude_at(f, spec.fs_hz)));
    }
    fs::write(&spec.response_out, resp_csv)?;

    println!(
        "designed {} taps (pass {:.3} MHz, stop {:.3} MHz at fs {:.2} MHz)",
        spec.taps,
        spec.f_pass_hz / 1e6,
        spec.f_stop_hz / 1e6,
        spec.fs_hz / 1e6
    );
    println!("taps -> {}", spec.taps_out.display());
    println!("response -> {}", spec.response_out.display());
    Ok(())
}
