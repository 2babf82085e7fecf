//! Receive chain: OFDM demodulation, synchronization, channel and SNR
//! estimation, MMSE equalization and soft demapping.
//!
//! [`receive`] runs the estimated path end to end and returns
//! descrambled codeword-ordered LLRs together with the measured EVM,
//! SNR and synchronization state. [`receive_genie`] swaps every
//! estimate for externally supplied truth, the reference the estimated
//! path is judged against.

pub mod demap;
pub mod equalize;
pub mod estimate;
pub mod spline;
pub mod sync;

pub use demap::demap_llr;
pub use equalize::{equalize_mmse, equalize_re, EqualizedSymbols, ReEqualization};
pub use estimate::{
    estimate_ls, estimate_snr, interpolate_estimate, mmse_denoise, ChannelEstimate, EstimatorKind,
    MmseDenoiser, MmseFilter, PilotEstimate, SnrEstimate, DELAY_SPAN, RHO_MAX_DB, RHO_MIN_DB,
    SNR_WINDOW,
};
pub use spline::CubicSpline;
pub use sync::{correct_sync, estimate_sync, SyncEstimate};

use ndarray::Array2;

use crate::waveform::dmrs::{dmrs_sequence, pilot_subcarrier};
use crate::waveform::ofdm::{N_SC, SLOT_SAMPLES};
use crate::waveform::{descramble_llrs, layer_demap_llrs, Ofdm, TxConfig};
use crate::{Error, Result, C64};

/// Receiver settings on top of the link parameters.
#[derive(Clone, Debug)]
pub struct RxConfig {
    pub link: TxConfig,
    pub estimator: EstimatorKind,
    pub sync_correction: bool,
    /// Keep the interpolated channel estimate in the output.
    pub keep_estimate: bool,
}

/// Everything one slot's receive pass produces.
#[derive(Clone, Debug)]
pub struct RxOutput {
    /// Descrambled LLRs in codeword order, positive for bit 0.
    pub llrs: Vec<f64>,
    /// RMS error of the equalized pilots against their references, %.
    pub evm_pct: f64,
    pub snr: SnrEstimate,
    pub sync: SyncEstimate,
    /// Present when [`RxConfig::keep_estimate`] asked for it.
    pub estimate: Option<ChannelEstimate>,
}

pub fn demodulate_streams(
    streams: &[Vec<C64>],
    offset: usize,
    ofdm: &Ofdm,
) -> Result<Vec<Array2<C64>>> {
    if streams.is_empty() || streams.len() > 2 {
        return Err(Error::InvalidArgument(format!(
            "{} receive antennas unsupported",
            streams.len()
        )));
    }
    streams
        .iter()
        .map(|s| {
            if s.len() < offset + SLOT_SAMPLES {
                return Err(Error::LengthMismatch {
                    expected: offset + SLOT_SAMPLES,
                    actual: s.len(),
                });
            }
            ofdm.demodulate_slot(&s[offset..offset + SLOT_SAMPLES])
        })
        .collect()
}

/// Shared tail of both receive paths: equalize, demap per layer,
/// recombine, descramble, measure EVM.
fn finish(
    grids: &[Array2<C64>],
    est: &ChannelEstimate,
    rho: f64,
    cfg: &RxConfig,
) -> Result<(Vec<f64>, f64)> {
    let eq = equalize_mmse(grids, est, rho, &cfg.link.allocation)?;
    let per_layer: Vec<Vec<f64>> = eq
        .symbols
        .iter()
        .zip(&eq.noise_var)
        .map(|(s, v)| demap_llr(s, v, cfg.link.modulation))
        .collect::<Result<_>>()?;
    let llrs = layer_demap_llrs(&per_layer, cfg.link.modulation.bits_per_symbol())?;
    let llrs = descramble_llrs(&llrs, cfg.link.data_seed);
    let evm = evm_percent(grids, est, rho, &cfg.link)?;
    Ok((llrs, evm))
}

/// RMS error of SIMO-equalized DMRS against the reference pilots, in
/// percent of the reference power.
pub fn evm_percent(
    grids: &[Array2<C64>],
    est: &ChannelEstimate,
    rho: f64,
    link: &TxConfig,
) -> Result<f64> {
    let mut err = 0.0;
    let mut refpow = 0.0;
    for &l in &link.allocation.dmrs_symbols {
        let r = dmrs_sequence(link.slot, l, link.n_id, N_SC / 2);
        for port in 0..link.n_layers {
            for (m, pilot) in r.iter().enumerate() {
                let k = pilot_subcarrier(port, m);
                let h: Vec<C64> = (0..est.n_rx()).map(|rx| est.at(rx, port, k, l)).collect();
                let y: Vec<C64> = grids.iter().map(|g| g[(k, l)]).collect();
                let out = equalize_re(&[h], &y, rho)?;
                let z = if out.bias[0] > 1e-12 {
                    out.biased[0] / out.bias[0]
                } else {
                    C64::new(0.0, 0.0)
                };
                err += (z - pilot).norm_sqr();
                refpow += pilot.norm_sqr();
            }
        }
    }
    Ok(100.0 * (err / refpow).sqrt())
}

/// Full estimated receive path for one slot. `offset` skips leading
/// samples (e.g. the transmit filter's group delay) in each stream; an
/// MMSE denoiser is required when the config selects that estimator.
pub fn receive(
    streams: &[Vec<C64>],
    offset: usize,
    cfg: &RxConfig,
    ofdm: &Ofdm,
    denoiser: Option<&MmseDenoiser>,
) -> Result<RxOutput> {
    if cfg.link.n_layers > streams.len() {
        return Err(Error::InvalidArgument(format!(
            "{} layers exceed {} receive antennas",
            cfg.link.n_layers,
            streams.len()
        )));
    }
    let mut grids = demodulate_streams(streams, offset, ofdm)?;
    let alloc = &cfg.link.allocation;
    let sync = if cfg.sync_correction {
        let raw = estimate_ls(
            &grids,
            cfg.link.n_layers,
            alloc,
            cfg.link.slot,
            cfg.link.n_id,
        )?;
        let est = estimate_sync(&raw);
        correct_sync(&mut grids, &est);
        est
    } else {
        SyncEstimate::zero()
    };
    let ls = estimate_ls(
        &grids,
        cfg.link.n_layers,
        alloc,
        cfg.link.slot,
        cfg.link.n_id,
    )?;
    let snr = estimate_snr(&ls)?;
    let pilots = match cfg.estimator {
        EstimatorKind::Ls => ls,
        EstimatorKind::Mmse => {
            let den = denoiser
                .ok_or_else(|| Error::InvalidArgument("MMSE estimator needs a denoiser".into()))?;
            let filt = den.filter(snr.linear)?;
            ls.map_combs(|c| filt.apply(c))?
        }
    };
    let est = interpolate_estimate(&pilots, cfg.estimator)?;
    let (llrs, evm_pct) = finish(&grids, &est, snr.linear, cfg)?;
    Ok(RxOutput {
        llrs,
        evm_pct,
        snr,
        sync,
        estimate: cfg.keep_estimate.then_some(est),
    })
}

/// Genie-aided receive path: the true channel and SNR replace every
/// estimate and no synchronization correction runs.
pub fn receive_genie(
    streams: &[Vec<C64>],
    offset: usize,
    cfg: &RxConfig,
    ofdm: &Ofdm,
    est: &ChannelEstimate,
    rho_linear: f64,
) -> Result<RxOutput> {
    if cfg.link.n_layers > streams.len() {
        return Err(Error::InvalidArgument(format!(
            "{} layers exceed {} receive antennas",
            cfg.link.n_layers,
            streams.len()
        )));
    }
    let grids = demodulate_streams(streams, offset, ofdm)?;
    let (llrs, evm_pct) = finish(&grids, est, rho_linear, cfg)?;
    Ok(RxOutput {
        llrs,
        evm_pct,
        snr: SnrEstimate::uniform(est.n_rx(), est.n_ports(), rho_linear),
        sync: SyncEstimate::zero(),
        estimate: cfg.keep_estimate.then(|| est.clone()),
    })
}
