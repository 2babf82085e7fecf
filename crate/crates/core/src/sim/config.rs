//! Experiment configuration: a flat `key = value` text format, its
//! parser, and the validated [`SimConfig`] the harness runs from.
//!
//! Lines may carry `#` comments; later assignments override earlier
//! ones; any key outside the schema is an error.

use crate::channel::TdlProfile;
use crate::ldpc::CheckUpdate;
use crate::receiver::EstimatorKind;
use crate::waveform::CP_SHORT;
use crate::{Error, Result};

use super::mcs::lookup_mcs;

/// Propagation channel selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    /// Noise only, identity spatial mapping.
    Awgn,
    /// Bundled TDLA30 multipath profile, Rayleigh taps.
    Tdla30,
    /// Single Rayleigh tap at zero delay.
    Flat,
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Tdla30 => "tdla30",
            ChannelKind::Flat => "flat",
        }
    }

    fn from_name(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(ChannelKind::Awgn),
            "tdla30" => Ok(ChannelKind::Tdla30),
            "flat" => Ok(ChannelKind::Flat),
            other => Err(Error::Config(format!("channel: unknown kind {other:?}"))),
        }
    }

    /// Fading profile backing this channel, `None` for pure AWGN.
    pub fn profile(&self) -> Option<TdlProfile> {
        match self {
            ChannelKind::Awgn => None,
            ChannelKind::Tdla30 => Some(TdlProfile::tdla30()),
            ChannelKind::Flat => Some(TdlProfile::flat()),
        }
    }
}

/// Residual carrier offsets beyond this alias in the pilot phase slope.
pub const CFO_LIMIT_HZ: f64 = 1500.0;

/// Everything one Monte-Carlo campaign depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub mcs: u8,
    pub layers: usize,
    pub rx_antennas: usize,
    pub channel: ChannelKind,
    pub doppler_hz: f64,
    pub cfo_hz: f64,
    pub sto_samples: i64,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub trials: usize,
    /// Early-stop threshold on block errors per point; 0 disables it.
    pub max_block_errors: usize,
    pub seed: u64,
    /// Decoder iteration cap.
    pub max_iters: usize,
    pub estimator: EstimatorKind,
    /// Replace every receiver estimate with its true value.
    pub genie: bool,
    pub boxplus: CheckUpdate,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mcs: 0,
            layers: 2,
            rx_antennas: 2,
            channel: ChannelKind::Awgn,
            doppler_hz: 0.0,
            cfo_hz: 0.0,
            sto_samples: 0,
            snr_start_db: -10.0,
            snr_stop_db: 0.0,
            snr_step_db: 1.0,
            trials: 1000,
            max_block_errors: 100,
            seed: 1,
            max_iters: 20,
            estimator: EstimatorKind::Mmse,
            genie: false,
            boxplus: CheckUpdate::TwoPiece,
        }
    }
}

impl SimConfig {
    /// Rejects any field combination the pipeline cannot honor.
    pub fn validate(&self) -> Result<()> {
        lookup_mcs(self.mcs)?;
        if self.layers == 0 || self.layers > 2 {
            return Err(Error::Config(format!(
                "layers: {} not in 1..=2",
                self.layers
            )));
        }
        if self.rx_antennas == 0 || self.rx_antennas > 2 {
            return Err(Error::Config(format!(
                "rx_antennas: {} not in 1..=2",
                self.rx_antennas
            )));
        }
        if self.layers > self.rx_antennas {
            return Err(Error::Config(format!(
                "layers: {} exceed {} receive antennas",
                self.layers, self.rx_antennas
            )));
        }
        if self.channel == ChannelKind::Awgn {
            if self.doppler_hz != 0.0 {
                return Err(Error::Config("doppler_hz: needs a fading channel".into()));
            }
            if self.rx_antennas != self.layers {
                return Err(Error::Config(
                    "rx_antennas: awgn maps antennas one-to-one onto layers".into(),
                ));
            }
        }
        if !(self.doppler_hz >= 0.0 && self.doppler_hz.is_finite()) {
            return Err(Error::Config(format!(
                "doppler_hz: bad value {}",
                self.doppler_hz
            )));
        }
        if !(self.cfo_hz.is_finite() && self.cfo_hz.abs() <= CFO_LIMIT_HZ) {
            return Err(Error::Config(format!(
                "cfo_hz: {} outside +-{CFO_LIMIT_HZ}",
                self.cfo_hz
            )));
        }
        if self.sto_samples.unsigned_abs() >= CP_SHORT as u64 / 2 {
            return Err(Error::Config(format!(
                "sto_samples: {} exceeds half the short cyclic prefix",
                self.sto_samples
            )));
        }
        let sweep_ok = self.snr_start_db.is_finite()
            && self.snr_stop_db.is_finite()
            && self.snr_step_db.is_finite()
            && self.snr_step_db > 0.0
            && self.snr_start_db <= self.snr_stop_db;
        if !sweep_ok {
            return Err(Error::Config(format!(
                "snr sweep: bad range {}..{} step {}",
                self.snr_start_db, self.snr_stop_db, self.snr_step_db
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters: must be at least 1".into()));
        }
        Ok(())
    }

    /// The sweep's SNR points, start to stop inclusive.
    pub fn snr_points(&self) -> Vec<f64> {
        let n = ((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9) as usize + 1;
        (0..n)
            .map(|i| self.snr_start_db + i as f64 * self.snr_step_db)
            .collect()
    }

    /// Renders the configuration back into the file format it parses
    /// from.
    pub fn to_config_text(&self) -> String {
        let est = match self.estimator {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Mmse => "mmse",
        };
        let bx = match self.boxplus {
            CheckUpdate::Exact => "exact",
            CheckUpdate::TwoPiece => "two_piece",
        };
        format!(
            "mcs = {}\nlayers = {}\nrx_antennas = {}\nchannel = {}\n\
             doppler_hz = {}\ncfo_hz = {}\nsto_samples = {}\n\
             snr_start_db = {}\nsnr_stop_db = {}\nsnr_step_db = {}\n\
             trials = {}\nmax_block_errors = {}\nseed = {}\nmax_iters = {}\n\
             estimator = {}\ngenie = {}\nboxplus = {}\n",
            self.mcs,
            self.layers,
            self.rx_antennas,
            self.channel.name(),
            self.doppler_hz,
            self.cfo_hz,
            self.sto_samples,
            self.snr_start_db,
            self.snr_stop_db,
            self.snr_step_db,
            self.trials,
            self.max_block_errors,
            self.seed,
            self.max_iters,
            est,
            self.genie,
            bx,
        )
    }
}

fn num<T: std::str::FromStr>(key: &str, val: &str) -> Result<T> {
    val.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {val:?}")))
}

/// Parses the flat `key = value` format into a validated config.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
        let (key, val) = (key.trim(), val.trim());
        match key {
            "mcs" => cfg.mcs = num(key, val)?,
            "layers" => cfg.layers = num(key, val)?,
            "rx_antennas" => cfg.rx_antennas = num(key, val)?,
            "channel" => cfg.channel = ChannelKind::from_name(val)?,
            "doppler_hz" => cfg.doppler_hz = num(key, val)?,
            "cfo_hz" => cfg.cfo_hz = num(key, val)?,
            "sto_samples" => cfg.sto_samples = num(key, val)?,
            "snr_start_db" => cfg.snr_start_db = num(key, val)?,
            "snr_stop_db" => cfg.snr_stop_db = num(key, val)?,
            "snr_step_db" => cfg.snr_step_db = num(key, val)?,
            "trials" => cfg.trials = num(key, val)?,
            "max_block_errors" => cfg.max_block_errors = num(key, val)?,
            "seed" => cfg.seed = num(key, val)?,
            "max_iters" => cfg.max_iters = num(key, val)?,
            "estimator" => {
                cfg.estimator = match val {
                    "ls" => EstimatorKind::Ls,
                    "mmse" => EstimatorKind::Mmse,
                    other => {
                        return Err(Error::Config(format!("estimator: unknown kind {other:?}")))
                    }
                }
            }
            "genie" => {
                cfg.genie = match val {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::Config(format!(
                            "genie: expected bool, got {other:?}"
                        )))
                    }
                }
            }
            "boxplus" => {
                cfg.boxplus = match val {
                    "exact" => CheckUpdate::Exact,
                    "two_piece" => CheckUpdate::TwoPiece,
                    other => {
                        return Err(Error::Config(format!("boxplus: unknown update {other:?}")))
                    }
                }
            }
            other => return Err(Error::UnknownConfigKey(other.to_string())),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
