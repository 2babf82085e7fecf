//! Propagation impairments: tapped-delay-line fading, AWGN, residual
//! carrier frequency offset and sample timing offset.
//!
//! [`apply_channel`] runs the full impairment stack in a fixed order:
//! time-varying multipath mixing, CFO rotation, integer STO shift,
//! then per-antenna AWGN scaled against measured signal power.

pub mod fading;
pub mod profile;

pub use fading::{generate_fading, ChannelRealization, OSCILLATORS};
pub use profile::{TdlProfile, TdlTap};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::waveform::{CP_SHORT, FS};
use crate::{Error, Result, C64};

/// What the channel does to a transmission, besides fading.
#[derive(Clone, Debug)]
pub struct ImpairmentSpec {
    /// Per-rx-antenna SNR in dB; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Residual carrier frequency offset.
    pub cfo_hz: f64,
    /// Residual timing offset in whole samples.
    pub sto_samples: i64,
    /// Maximum Doppler of the fading processes.
    pub doppler_hz: f64,
    /// Multipath profile; `None` is a clean AWGN-only channel.
    pub profile: Option<TdlProfile>,
}

impl ImpairmentSpec {
    /// AWGN-only impairments at the given SNR.
    pub fn awgn(snr_db: f64) -> Self {
        Self {
            snr_db,
            cfo_hz: 0.0,
            sto_samples: 0,
            doppler_hz: 0.0,
            profile: None,
        }
    }

    /// The timing offset must stay well inside the cyclic prefix.
    pub fn validate(&self) -> Result<()> {
        if self.sto_samples.unsigned_abs() >= CP_SHORT as u64 / 2 {
            return Err(Error::InvalidArgument(format!(
                "sto {} exceeds half the short cyclic prefix",
                self.sto_samples
            )));
        }
        if !(self.doppler_hz >= 0.0) {
            return Err(Error::InvalidArgument("doppler must be >= 0".into()));
        }
        Ok(())
    }
}

/// Adds circular complex Gaussian noise so that measured signal power
/// over noise power equals `snr_db`. Infinite SNR passes through.
pub fn awgn(sig: &[C64], snr_db: f64, rng: &mut impl Rng) -> Result<Vec<C64>> {
    if snr_db == f64::INFINITY {
        return Ok(sig.to_vec());
    }
    let power: f64 = sig.iter().map(|x| x.norm_sqr()).sum::<f64>() / sig.len().max(1) as f64;
    if power == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot set an SNR on a zero-power signal".into(),
        ));
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    Ok(sig
        .iter()
        .map(|x| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            x + C64::new(re * sigma, im * sigma)
        })
        .collect())
}

/// Rotates the stream by `e^{j 2 pi cfo n / fs}`.
pub fn apply_cfo(sig: &[C64], cfo_hz: f64, fs: f64) -> Vec<C64> {
    if cfo_hz == 0.0 {
        return sig.to_vec();
    }
    let step = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * cfo_hz / fs);
    let mut phase = C64::new(1.0, 0.0);
    sig.iter()
        .map(|x| {
            let y = x * phase;
            phase *= step;
            y
        })
        .collect()
}

/// Shifts the stream by a whole number of samples, zero-filling the
/// exposed edge. Positive offsets delay the signal.
pub fn apply_sto(sig: &[C64], sto_samples: i64) -> Vec<C64> {
    let len = sig.len() as i64;
    (0..len)
        .map(|n| {
            let src = n - sto_samples;
            if src >= 0 && src < len {
                sig[src as usize]
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Mixes per-tx streams through the realization's tapped delay lines,
/// then applies CFO, STO, and AWGN per receive antenna.
pub fn apply_channel(
    sig: &[Vec<C64>],
    real: &ChannelRealization,
    imp: &ImpairmentSpec,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<C64>>> {
    if sig.len() != real.n_tx() {
        return Err(Error::LengthMismatch {
            expected: real.n_tx(),
            actual: sig.len(),
        });
    }
    let len = sig.first().map_or(0, Vec::len);
    if len == 0 || sig.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidArgument("ragged or empty tx streams".into()));
    }
    if real.n_samples() < len {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: real.n_samples(),
        });
    }

    let mut out = Vec::with_capacity(real.n_rx());
    for rx in 0..real.n_rx() {
        let mut acc = vec![C64::new(0.0, 0.0); len];
        for (tx, stream) in sig.iter().enumerate() {
            for tap in 0..real.num_taps() {
                if real.gain_at(rx, tx, tap, 0) == C64::new(0.0, 0.0) && real.doppler_hz() == 0.0 {
                    continue;
                }
                let d = real.delay(tap);
                for n in d..len {
                    acc[n] += real.gain_at(rx, tx, tap, n) * stream[n - d];
                }
            }
        }
        let mixed = apply_cfo(&acc, imp.cfo_hz, FS);
        let shifted = apply_sto(&mixed, imp.sto_samples);
        out.push(awgn(&shifted, imp.snr_db, rng)?);
    }
    Ok(out)
}
