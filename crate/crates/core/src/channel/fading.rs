//! Sum-of-sinusoids Rayleigh tap processes and channel realizations.
//!
//! Each (rx, tx, tap) triple gets an independent complex process with
//! unit variance: two quadrature sums of randomly phased oscillators
//! whose frequencies follow the classical Doppler spectrum. Oscillator
//! sums are evaluated on a coarse time grid (a small fraction of the
//! fading cycle) and linearly interpolated at the waveform rate.

use std::f64::consts::PI;

use rand::Rng;

use super::profile::TdlProfile;
use crate::waveform::FS;
use crate::{Error, Result, C64};

/// Oscillators per quadrature component of each tap process.
pub const OSCILLATORS: usize = 256;

/// Synthesis grid resolution: evaluations per fading cycle `1/f_d`.
const GRID_STEPS_PER_CYCLE: f64 = 512.0;

/// Frozen oscillator parameters of one tap process.
struct SosParams {
    w_cos: Vec<f64>,
    w_sin: Vec<f64>,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl SosParams {
    fn draw(doppler_hz: f64, rng: &mut impl Rng) -> Self {
        let n = OSCILLATORS;
        let mut uniform = || 2.0 * PI * rng.gen::<f64>() - PI;
        let theta = uniform();
        let mut w_cos = vec![0.0; n];
        let mut w_sin = vec![0.0; n];
        let mut phi = vec![0.0; n];
        let mut psi = vec![0.0; n];
        for k in 0..n {
            if doppler_hz > 0.0 {
                let alpha = (2.0 * PI * (k + 1) as f64 - PI + theta) / (4.0 * n as f64);
                w_cos[k] = 2.0 * PI * doppler_hz * alpha.cos();
                w_sin[k] = 2.0 * PI * doppler_hz * alpha.sin();
            }
            phi[k] = uniform();
            psi[k] = uniform();
        }
        Self {
            w_cos,
            w_sin,
            phi,
            psi,
        }
    }

    fn eval(&self, t: f64) -> C64 {
        let scale = (1.0 / OSCILLATORS as f64).sqrt();
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..OSCILLATORS {
            re += (self.w_cos[k] * t + self.phi[k]).cos();
            im += (self.w_sin[k] * t + self.psi[k]).cos();
        }
        C64::new(re * scale, im * scale)
    }
}

/// A tap gain trajectory: constant when static, otherwise sampled on
/// the synthesis grid.
enum GainSeries {
    Constant(C64),
    Grid { points: Vec<C64>, step: f64 },
}

impl GainSeries {
    fn at(&self, n: usize) -> C64 {
        match self {
            GainSeries::Constant(g) => *g,
            GainSeries::Grid { points, step } => {
                let x = n as f64 / step;
                let i = x as usize;
                let frac = x - i as f64;
                points[i] * (1.0 - frac) + points[i + 1] * frac
            }
        }
    }
}

struct TapTrack {
    amp: f64,
    series: GainSeries,
}

/// Per-(rx, tx, tap) complex gain trajectories at the waveform rate.
pub struct ChannelRealization {
    n_rx: usize,
    n_tx: usize,
    n_samples: usize,
    delays: Vec<usize>,
    tracks: Vec<TapTrack>,
    doppler_hz: f64,
}

impl ChannelRealization {
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn num_taps(&self) -> usize {
        self.delays.len()
    }

    /// Tap delay in whole samples.
    pub fn delay(&self, tap: usize) -> usize {
        self.delays[tap]
    }

    /// Power-weighted complex gain of one tap at sample `n`.
    pub fn gain_at(&self, rx: usize, tx: usize, tap: usize, n: usize) -> C64 {
        let track = &self.tracks[(rx * self.n_tx + tx) * self.delays.len() + tap];
        track.series.at(n) * track.amp
    }

    /// Identity spatial channel: each antenna maps straight through.
    pub fn identity(n_ant: usize, n_samples: usize) -> Self {
        let mut tracks = Vec::with_capacity(n_ant * n_ant);
        for rx in 0..n_ant {
            for tx in 0..n_ant {
                tracks.push(TapTrack {
                    amp: if rx == tx { 1.0 } else { 0.0 },
                    series: GainSeries::Constant(C64::new(1.0, 0.0)),
                });
            }
        }
        Self {
            n_rx: n_ant,
            n_tx: n_ant,
            n_samples,
            delays: vec![0],
            tracks,
            doppler_hz: 0.0,
        }
    }

    /// Single-tap static channel with an explicit spatial gain matrix
    /// `gains[rx][tx]`.
    pub fn from_constant(gains: &[Vec<C64>], n_samples: usize) -> Result<Self> {
        let n_rx = gains.len();
        let n_tx = gains.first().map_or(0, Vec::len);
        if n_rx == 0 || n_tx == 0 || gains.iter().any(|row| row.len() != n_tx) {
            return Err(Error::InvalidArgument("ragged or empty gain matrix".into()));
        }
        let tracks = gains
            .iter()
            .flat_map(|row| row.iter())
            .map(|&g| TapTrack {
                amp: 1.0,
                series: GainSeries::Constant(g),
            })
            .collect();
        Ok(Self {
            n_rx,
            n_tx,
            n_samples,
            delays: vec![0],
            tracks,
            doppler_hz: 0.0,
        })
    }
}

/// Draws an independent sum-of-sinusoids process for every
/// (rx, tx, tap) triple, scaled by the tap's normalized power.
pub fn generate_fading(
    profile: &TdlProfile,
    doppler_hz: f64,
    n_samples: usize,
    n_rx: usize,
    n_tx: usize,
    rng: &mut impl Rng,
) -> Result<ChannelRealization> {
    if !(doppler_hz >= 0.0) {
        return Err(Error::InvalidArgument("doppler must be >= 0".into()));
    }
    if n_rx == 0 || n_tx == 0 || n_samples == 0 {
        return Err(Error::InvalidArgument("empty realization".into()));
    }
    let delays = profile.delays_samples(FS);
    let amps: Vec<f64> = profile
        .normalized_powers()
        .iter()
        .map(|p| p.sqrt())
        .collect();

    let mut tracks = Vec::with_capacity(n_rx * n_tx * delays.len());
    for _rx in 0..n_rx {
        for _tx in 0..n_tx {
            for &amp in &amps {
                let params = SosParams::draw(doppler_hz, rng);
                let series = if doppler_hz == 0.0 {
                    GainSeries::Constant(params.eval(0.0))
                } else {
                    let step_seconds = 1.0 / (GRID_STEPS_PER_CYCLE * doppler_hz);
                    let step = step_seconds * FS;
                    let len = (n_samples as f64 / step) as usize + 2;
                    let points = (0..len)
                        .map(|k| params.eval(k as f64 * step_seconds))
                        .collect();
                    GainSeries::Grid { points, step }
                };
                tracks.push(TapTrack { amp, series });
            }
        }
    }
    Ok(ChannelRealization {
        n_rx,
        n_tx,
        n_samples,
        delays,
        tracks,
        doppler_hz,
    })
}
