//! Monte-Carlo execution: per-trial random streams keyed by (seed,
//! SNR, trial), parallel waves folded in trial order so early stopping
//! is a pure function of the seed, and sweep orchestration.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::channel::{
    apply_channel, generate_fading, ChannelRealization, ImpairmentSpec, TdlProfile,
};
use crate::ldpc::{lifting_set_index, BaseGraph, Decoder};
use crate::receiver::{
    demodulate_streams, receive, receive_genie, ChannelEstimate, MmseDenoiser, RxConfig,
};
use crate::transport::{segmentation, TransportChain};
use crate::waveform::{
    transmit, tx_lowpass, Allocation, FirFilter, Ofdm, TxConfig, TxSignal, FS, SLOT_SAMPLES,
};
use crate::{Error, Result, C64};

use super::config::{ChannelKind, SimConfig};
use super::mcs::lookup_mcs;
use super::report::{Asset, PointReport, SimReport};

/// Trials dispatched per parallel wave. Completed waves are folded in
/// trial order, so the early-stop cut point cannot depend on thread
/// scheduling or worker count.
const BATCH: usize = 64;

/// Air time one slot occupies, in seconds.
pub const SLOT_SECONDS: f64 = SLOT_SAMPLES as f64 / FS;

/// Scrambling identities fixed for every campaign; the receiver shares
/// them through the link config.
const DATA_SEED: u32 = 613;
const N_ID: u32 = 42;
const SLOT: usize = 4;
const RV: u8 = 0;

/// An independent generator for one trial. Hashing the coordinates
/// keys the stream so no draw can move with execution order.
fn trial_stream(seed: u64, snr_db: f64, trial: u64) -> ChaCha12Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(snr_db.to_bits().to_le_bytes());
    h.update(trial.to_le_bytes());
    ChaCha12Rng::from_seed(h.finalize().into())
}

struct TrialOut {
    blocks: u64,
    block_errors: u64,
    pre_err: u64,
    pre_bits: u64,
    post_err: u64,
    post_bits: u64,
    iters: u64,
    evm_pct: f64,
}

#[derive(Default)]
struct Accum {
    trials: usize,
    blocks: u64,
    block_errors: u64,
    pre_err: u64,
    pre_bits: u64,
    post_err: u64,
    post_bits: u64,
    iters: u64,
    evm_sum: f64,
}

impl Accum {
    fn add(&mut self, t: &TrialOut) {
        self.trials += 1;
        self.blocks += t.blocks;
        self.block_errors += t.block_errors;
        self.pre_err += t.pre_err;
        self.pre_bits += t.pre_bits;
        self.post_err += t.post_err;
        self.post_bits += t.post_bits;
        self.iters += t.iters;
        self.evm_sum += t.evm_pct;
    }

    fn into_report(self, snr_db: f64) -> PointReport {
        PointReport {
            snr_db,
            trials: self.trials,
            blocks: self.blocks,
            block_errors: self.block_errors,
            bler: self.block_errors as f64 / self.blocks as f64,
            ber_pre: self.pre_err as f64 / self.pre_bits as f64,
            ber_post: self.post_err as f64 / self.post_bits as f64,
            evm_pct: self.evm_sum / self.trials as f64,
            mean_iters: self.iters as f64 / self.blocks as f64,
            elapsed_s: self.trials as f64 * SLOT_SECONDS,
        }
    }
}

/// Everything a trial produces before the receiver runs.
struct Staged {
    payload: Vec<u8>,
    coded: Vec<u8>,
    tx: TxSignal,
    real: ChannelRealization,
    imp: ImpairmentSpec,
    received: Vec<Vec<C64>>,
}

/// Shared per-campaign state: the planned transport chain, link
/// config, OFDM plans, filter, and the estimator's denoising operator.
struct Runner {
    cfg: SimConfig,
    chain: TransportChain,
    link: TxConfig,
    ofdm: Ofdm,
    fir: FirFilter,
    denoiser: Option<MmseDenoiser>,
    profile: Option<TdlProfile>,
}

impl Runner {
    fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let entry = lookup_mcs(cfg.mcs)?;
        let link = TxConfig {
            modulation: entry.modulation,
            n_layers: cfg.layers,
            data_seed: DATA_SEED,
            n_id: N_ID,
            slot: SLOT,
            allocation: Allocation::default(),
        };
        let chain = TransportChain::new(
            entry.tbs,
            entry.rate,
            entry.modulation.bits_per_symbol(),
            cfg.layers,
            link.coded_bits_per_slot(),
            RV,
        )?;
        let denoiser = match (cfg.genie, cfg.estimator) {
            (false, crate::receiver::EstimatorKind::Mmse) => Some(MmseDenoiser::default()),
            _ => None,
        };
        Ok(Runner {
            cfg: cfg.clone(),
            chain,
            link,
            ofdm: Ofdm::new(),
            fir: tx_lowpass(),
            denoiser,
            profile: cfg.channel.profile(),
        })
    }

    /// True per-RE channel of this trial: each layer probed alone
    /// through the same realization and impairments, without noise,
    /// then divided by the known transmit grid.
    fn genie_estimate(
        &self,
        tx: &TxSignal,
        real: &ChannelRealization,
        imp: &ImpairmentSpec,
    ) -> Result<ChannelEstimate> {
        let clean = ImpairmentSpec {
            snr_db: f64::INFINITY,
            ..imp.clone()
        };
        let mut probe_rng = ChaCha12Rng::seed_from_u64(0);
        let n = tx.antennas[0].len();
        let offset = self.fir.group_delay();
        let mut per_port = Vec::with_capacity(self.cfg.layers);
        for port in 0..self.cfg.layers {
            let streams: Vec<Vec<C64>> = (0..self.cfg.layers)
                .map(|t| {
                    if t == port {
                        tx.antennas[port].clone()
                    } else {
                        vec![C64::new(0.0, 0.0); n]
                    }
                })
                .collect();
            let probe = apply_channel(&streams, real, &clean, &mut probe_rng)?;
            per_port.push(demodulate_streams(&probe, offset, &self.ofdm)?);
        }
        let mut grids: Vec<Array2<C64>> =
            Vec::with_capacity(self.cfg.rx_antennas * self.cfg.layers);
        for rx in 0..self.cfg.rx_antennas {
            for port in 0..self.cfg.layers {
                let mut g = per_port[port][rx].clone();
                for (idx, v) in g.indexed_iter_mut() {
                    let x = tx.grids[port][idx];
                    *v = if x.norm_sqr() > 1e-18 {
                        *v / x
                    } else {
                        C64::new(0.0, 0.0)
                    };
                }
                grids.push(g);
            }
        }
        ChannelEstimate::from_grids(
            grids,
            self.cfg.rx_antennas,
            self.cfg.layers,
            self.cfg.estimator,
        )
    }

    /// True post-transform noise-floor SNR for the genie receiver: the
    /// injected noise variance is set against the clean mixed streams,
    /// and the unitary transform carries it per resource element
    /// unchanged.
    fn genie_rho(
        &self,
        tx: &TxSignal,
        real: &ChannelRealization,
        imp: &ImpairmentSpec,
        snr_db: f64,
    ) -> Result<f64> {
        let quiet = ImpairmentSpec {
            snr_db: f64::INFINITY,
            ..imp.clone()
        };
        let mut silent_rng = ChaCha12Rng::seed_from_u64(0);
        let clean = apply_channel(&tx.antennas, real, &quiet, &mut silent_rng)?;
        let rho = 10f64.powf(snr_db / 10.0);
        let mean_var = clean
            .iter()
            .map(|s| {
                let p: f64 = s.iter().map(|x| x.norm_sqr()).sum::<f64>() / s.len() as f64;
                p / rho
            })
            .sum::<f64>()
            / clean.len() as f64;
        Ok(1.0 / mean_var)
    }

    fn stage(&self, snr_db: f64, idx: u64) -> Result<Staged> {
        let mut rng = trial_stream(self.cfg.seed, snr_db, idx);
        let payload: Vec<u8> = (0..self.chain.tbs()).map(|_| rng.gen_range(0..2)).collect();
        let coded = self.chain.encode(&payload)?;
        let tx = transmit(&coded, &self.link, &self.ofdm, &self.fir)?;
        let n = tx.antennas[0].len();
        let real = match &self.profile {
            None => ChannelRealization::identity(self.cfg.layers, n),
            Some(p) => generate_fading(
                p,
                self.cfg.doppler_hz,
                n,
                self.cfg.rx_antennas,
                self.cfg.layers,
                &mut rng,
            )?,
        };
        let imp = ImpairmentSpec {
            snr_db,
            cfo_hz: self.cfg.cfo_hz,
            sto_samples: self.cfg.sto_samples,
            doppler_hz: self.cfg.doppler_hz,
            profile: None,
        };
        let received = apply_channel(&tx.antennas, &real, &imp, &mut rng)?;
        Ok(Staged {
            payload,
            coded,
            tx,
            real,
            imp,
            received,
        })
    }

    fn rx_config(&self, keep_estimate: bool) -> RxConfig {
        RxConfig {
            link: self.link.clone(),
            estimator: self.cfg.estimator,
            sync_correction: self.cfg.cfo_hz != 0.0 || self.cfg.sto_samples != 0,
            keep_estimate,
        }
    }

    fn trial(&self, snr_db: f64, idx: u64) -> Result<TrialOut> {
        let Staged {
            payload,
            coded,
            tx,
            real,
            imp,
            received,
        } = self.stage(snr_db, idx)?;
        let rx_cfg = self.rx_config(false);
        let offset = self.fir.group_delay();
        let out = if self.cfg.genie {
            let est = self.genie_estimate(&tx, &real, &imp)?;
            let rho = self.genie_rho(&tx, &real, &imp, snr_db)?;
            receive_genie(&received, offset, &rx_cfg, &self.ofdm, &est, rho)?
        } else {
            receive(
                &received,
                offset,
                &rx_cfg,
                &self.ofdm,
                self.denoiser.as_ref(),
            )?
        };
        let mut pre_err = 0u64;
        for (llr, bit) in out.llrs.iter().zip(&coded) {
            pre_err += u64::from((*llr < 0.0) != (*bit == 1));
        }
        let dec = self.chain.decode_with(
            &mut Decoder::new(),
            &out.llrs,
            self.cfg.max_iters,
            self.cfg.boxplus,
        )?;
        let post_err = dec
            .payload
            .iter()
            .zip(&payload)
            .filter(|(a, b)| a != b)
            .count() as u64;
        Ok(TrialOut {
            blocks: dec.block_ok.len() as u64,
            block_errors: dec.block_ok.iter().filter(|ok| !**ok).count() as u64,
            pre_err,
            pre_bits: coded.len() as u64,
            post_err,
            post_bits: payload.len() as u64,
            iters: dec.iterations.iter().map(|&i| i as u64).sum(),
            evm_pct: out.evm_pct,
        })
    }

    fn point(&self, snr_db: f64) -> Result<PointReport> {
        let mut acc = Accum::default();
        'sweep: for start in (0..self.cfg.trials).step_by(BATCH) {
            let n = BATCH.min(self.cfg.trials - start);
            let wave: Vec<TrialOut> = (start..start + n)
                .into_par_iter()
                .map(|t| self.trial(snr_db, t as u64))
                .collect::<Result<_>>()?;
            for out in &wave {
                acc.add(out);
                if self.cfg.max_block_errors > 0
                    && acc.block_errors >= self.cfg.max_block_errors as u64
                {
                    break 'sweep;
                }
            }
        }
        Ok(acc.into_report(snr_db))
    }
}

fn sidecar_asset(line: &str) -> Asset {
    let mut it = line.split_whitespace();
    let sha256 = it.next().unwrap_or_default().to_string();
    let name = it.next().unwrap_or_default().to_string();
    Asset { name, sha256 }
}

fn asset_checksums(cfg: &SimConfig) -> Result<Vec<Asset>> {
    let entry = lookup_mcs(cfg.mcs)?;
    let seg = segmentation(entry.tbs, entry.rate)?;
    let set = lifting_set_index(seg.z).ok_or(Error::InvalidLiftingSize { z: seg.z })?;
    let mut assets = Vec::new();
    if let Some(line) = BaseGraph::bundled_checksum(seg.bg, set) {
        assets.push(sidecar_asset(line));
    }
    if cfg.channel == ChannelKind::Tdla30 {
        assets.push(sidecar_asset(
            include_str!("../../data/channel/tdla30.csv.sha256").trim(),
        ));
    }
    Ok(assets)
}

/// Runs one SNR point to its trial budget or early-stop threshold.
pub fn run_point(cfg: &SimConfig, snr_db: f64) -> Result<PointReport> {
    Runner::new(cfg)?.point(snr_db)
}

/// The channel estimate the receiver forms (or is handed, in genie
/// mode) for one trial of the `snr_db` point, kept for inspection.
pub fn probe_estimate(cfg: &SimConfig, snr_db: f64, trial: u64) -> Result<ChannelEstimate> {
    let runner = Runner::new(cfg)?;
    let staged = runner.stage(snr_db, trial)?;
    if cfg.genie {
        return runner.genie_estimate(&staged.tx, &staged.real, &staged.imp);
    }
    let rx_cfg = runner.rx_config(true);
    let out = receive(
        &staged.received,
        runner.fir.group_delay(),
        &rx_cfg,
        &runner.ofdm,
        runner.denoiser.as_ref(),
    )?;
    Ok(out.estimate.expect("keep_estimate was set"))
}

/// Runs the configured sweep and assembles the full report.
pub fn run_sweep(cfg: &SimConfig) -> Result<SimReport> {
    let runner = Runner::new(cfg)?;
    let mut points = Vec::new();
    for snr_db in cfg.snr_points() {
        points.push(runner.point(snr_db)?);
    }
    Ok(SimReport {
        config: cfg.clone(),
        assets: asset_checksums(cfg)?,
        points,
    })
}
