//! Residual synchronization: CFO and STO estimated from the pilot
//! lattice, corrected on the resource grid in the frequency domain.
//!
//! CFO shows up as a phase rotation between the two DMRS symbols; STO
//! as a linear phase slope across the pilot comb, located by an
//! oversampled IDFT peak. Correction de-rotates each subcarrier for the
//! STO and deconvolves the fractional-CFO subcarrier leakage with a
//! truncated Dirichlet kernel, so multiple allocations could be fixed
//! independently without touching the time signal.

use std::f64::consts::PI;

use ndarray::Array2;
use rustfft::FftPlanner;

use crate::receiver::estimate::PilotEstimate;
use crate::waveform::ofdm::{
    cp_len, signed_bin, symbol_start, CP_SHORT, FS, N_FFT, N_SC, SCS, SYMBOLS_PER_SLOT,
};
use crate::C64;

/// IDFT oversampling factor of the STO search.
pub const STO_OVERSAMPLE: usize = 8;
/// One-sided reach of the CFO correction kernel, in subcarriers.
pub const CFO_KERNEL_HALF: usize = 4;

/// Residual synchronization errors measured from the pilots.
#[derive(Clone, Copy, Debug)]
pub struct SyncEstimate {
    pub cfo_hz: f64,
    /// Fractional sample timing offset, positive for a late signal.
    pub sto_samples: f64,
    /// False when a single DMRS symbol made CFO unobservable.
    pub cfo_estimable: bool,
}

impl SyncEstimate {
    /// No offsets; correction with it is the identity.
    pub fn zero() -> Self {
        SyncEstimate {
            cfo_hz: 0.0,
            sto_samples: 0.0,
            cfo_estimable: true,
        }
    }
}

/// First sample of a symbol's demodulation window, in slot samples.
fn window_origin(l: usize) -> f64 {
    (symbol_start(l) + cp_len(l) / 2) as f64
}

/// Dirichlet kernel D_N(x): the N-point DFT leakage of a tone offset by
/// x bins, unity at x = 0.
fn dirichlet(x: f64) -> C64 {
    let n = N_FFT as f64;
    if (x / n - (x / n).round()).abs() * n < 1e-12 {
        return C64::new(1.0, 0.0);
    }
    let mag = (PI * x).sin() / (n * (PI * x / n).sin());
    C64::from_polar(mag, PI * x * (n - 1.0) / n)
}

/// Estimates residual CFO and STO from raw least-squares pilots.
pub fn estimate_sync(pilots: &PilotEstimate) -> SyncEstimate {
    let ds = pilots.dmrs_symbols();
    let (cfo_hz, cfo_estimable) = if ds.len() < 2 {
        (0.0, false)
    } else {
        let last = ds.len() - 1;
        let mut corr = C64::new(0.0, 0.0);
        for rx in 0..pilots.n_rx() {
            for port in 0..pilots.n_ports() {
                let a = pilots.comb(rx, port, 0);
                let b = pilots.comb(rx, port, last);
                for (x, y) in a.iter().zip(b) {
                    corr += x.conj() * y;
                }
            }
        }
        let dt = (window_origin(ds[last]) - window_origin(ds[0])) / FS;
        (corr.arg() / (2.0 * PI * dt), true)
    };

    // Oversampled IDFT of each comb, power-combined noncoherently; the
    // comb spacing of two subcarriers doubles the phase slope per bin.
    let len = pilots.comb_len();
    let m = STO_OVERSAMPLE * len;
    let fft = FftPlanner::new().plan_fft_inverse(m);
    let mut acc = vec![0.0f64; m];
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for rx in 0..pilots.n_rx() {
        for port in 0..pilots.n_ports() {
            for s in 0..ds.len() {
                buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                buf[..len].copy_from_slice(pilots.comb(rx, port, s));
                fft.process(&mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += v.norm_sqr();
                }
            }
        }
    }
    let peak = acc
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let prev = acc[(peak + m - 1) % m];
    let next = acc[(peak + 1) % m];
    let curve = prev - 2.0 * acc[peak] + next;
    let frac = if curve < 0.0 {
        0.5 * (prev - next) / curve
    } else {
        0.0
    };
    let mut k = peak as f64 + frac;
    if k > m as f64 / 2.0 {
        k -= m as f64;
    }
    let sto = k * N_FFT as f64 / (2.0 * m as f64);
    let bound = CP_SHORT as f64 - 1.0;
    SyncEstimate {
        cfo_hz,
        sto_samples: sto.clamp(-bound, bound),
        cfo_estimable,
    }
}

/// Undoes estimated offsets on demodulated grids: per-subcarrier phase
/// de-rotation for the STO, then per-symbol common-phase removal and a
/// truncated-Dirichlet deconvolution for the CFO.
pub fn correct_sync(grids: &mut [Array2<C64>], est: &SyncEstimate) {
    if est.sto_samples != 0.0 {
        let phases: Vec<C64> = (0..N_SC)
            .map(|k| {
                C64::from_polar(
                    1.0,
                    2.0 * PI * signed_bin(k) as f64 * est.sto_samples / N_FFT as f64,
                )
            })
            .collect();
        for grid in grids.iter_mut() {
            for l in 0..SYMBOLS_PER_SLOT {
                for k in 0..N_SC {
                    grid[(k, l)] *= phases[k];
                }
            }
        }
    }
    if est.cfo_hz != 0.0 {
        let eps = est.cfo_hz / SCS;
        let half = CFO_KERNEL_HALF as isize;
        let mut col = vec![C64::new(0.0, 0.0); N_SC];
        for l in 0..SYMBOLS_PER_SLOT {
            let delta = (cp_len(l) - cp_len(l) / 2) as f64;
            // Adjoint taps of the leakage kernel K(q) = e^{-j2pi q d/N} D(q+eps).
            let taps: Vec<C64> = (-half..=half)
                .map(|q| {
                    let k = C64::from_polar(1.0, -2.0 * PI * q as f64 * delta / N_FFT as f64)
                        * dirichlet(q as f64 + eps);
                    k.conj()
                })
                .collect();
            let common = C64::from_polar(1.0, -2.0 * PI * eps * window_origin(l) / N_FFT as f64);
            for grid in grids.iter_mut() {
                for (m, c) in col.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for (qi, q) in (-half..=half).enumerate() {
                        let src = m as isize - q;
                        if (0..N_SC as isize).contains(&src) {
                            s += taps[qi] * grid[(src as usize, l)];
                        }
                    }
                    *c = s * common;
                }
                for (m, c) in col.iter().enumerate() {
                    grid[(m, l)] = *c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_cfo, apply_sto};
    use crate::receiver::estimate::estimate_ls;
    use crate::waveform::{build_grids, layer_map, modulate, scramble_bits, Allocation, Ofdm, FS};
    use rand::{Rng, SeedableRng};

    fn test_slot(seed: u64) -> (Vec<C64>, Array2<C64>, Allocation) {
        let alloc = Allocation::default();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..2 * alloc.data_res_per_layer())
            .map(|_| rng.gen_range(0..2u8))
            .collect();
        let syms = modulate(&scramble_bits(&bits, 55), crate::waveform::Modulation::Qpsk).unwrap();
        let layers = layer_map(&syms, 1).unwrap();
        let grids = build_grids(&layers, &alloc, 1, 30).unwrap();
        let ofdm = Ofdm::new();
        let samples = ofdm.modulate_slot(&grids[0]).unwrap();
        (samples, grids.into_iter().next().unwrap(), alloc)
    }

    fn sync_of(samples: &[C64], alloc: &Allocation) -> SyncEstimate {
        let ofdm = Ofdm::new();
        let grid = ofdm.demodulate_slot(samples).unwrap();
        let ls = estimate_ls(&[grid], 1, alloc, 1, 30).unwrap();
        estimate_sync(&ls)
    }

    #[test]
    fn clean_loopback_reads_zero_offsets() {
        let (samples, _, alloc) = test_slot(0xc1ea);
        let est = sync_of(&samples, &alloc);
        assert!(est.cfo_estimable);
        assert!(est.cfo_hz.abs() < 1.0, "cfo {}", est.cfo_hz);
        assert!(est.sto_samples.abs() < 0.1, "sto {}", est.sto_samples);
    }

    #[test]
    fn injected_cfo_is_recovered_within_two_hertz() {
        let (samples, _, alloc) = test_slot(0x0cf0);
        let impaired = apply_cfo(&samples, 200.0, FS);
        let est = sync_of(&impaired, &alloc);
        assert!((est.cfo_hz - 200.0).abs() < 2.0, "cfo {}", est.cfo_hz);
    }

    #[test]
    fn injected_sto_is_recovered_within_a_tenth_sample() {
        let (samples, _, alloc) = test_slot(0x5707);
        let impaired = apply_sto(&samples, 8);
        let est = sync_of(&impaired, &alloc);
        assert!(
            (est.sto_samples - 8.0).abs() < 0.1,
            "sto {}",
            est.sto_samples
        );
        let early = apply_sto(&samples, -5);
        let est = sync_of(&early, &alloc);
        assert!(
            (est.sto_samples + 5.0).abs() < 0.1,
            "sto {}",
            est.sto_samples
        );
    }

    #[test]
    fn single_dmrs_symbol_marks_cfo_not_estimable() {
        let combs = vec![vec![vec![C64::new(1.0, 0.0); 64]]];
        let pilots = PilotEstimate::new(1, 1, vec![2], combs).unwrap();
        let est = estimate_sync(&pilots);
        assert!(!est.cfo_estimable);
        assert_eq!(est.cfo_hz, 0.0);
    }

    #[test]
    fn zero_estimates_leave_the_grid_untouched() {
        let (samples, _, _) = test_slot(0x1d);
        let ofdm = Ofdm::new();
        let grid = ofdm.demodulate_slot(&samples).unwrap();
        let mut copy = vec![grid.clone()];
        correct_sync(&mut copy, &SyncEstimate::zero());
        assert_eq!(copy[0], grid);
    }

    #[test]
    fn integer_sto_correction_equals_the_time_domain_shift() {
        let (samples, _, _) = test_slot(0xe44);
        let ofdm = Ofdm::new();
        let clean = ofdm.demodulate_slot(&samples).unwrap();
        let shifted = apply_sto(&samples, 6);
        let mut grids = vec![ofdm.demodulate_slot(&shifted).unwrap()];
        let est = SyncEstimate {
            cfo_hz: 0.0,
            sto_samples: 6.0,
            cfo_estimable: true,
        };
        correct_sync(&mut grids, &est);
        let mut worst = 0.0f64;
        for l in 0..SYMBOLS_PER_SLOT {
            for k in 0..N_SC {
                worst = worst.max((grids[0][(k, l)] - clean[(k, l)]).norm());
            }
        }
        assert!(worst < 1e-9, "worst {worst}");
    }

    #[test]
    fn correction_flattens_a_joint_impairment() {
        let (samples, _, alloc) = test_slot(0x77);
        let impaired = apply_sto(&apply_cfo(&samples, 200.0, FS), 8);
        let ofdm = Ofdm::new();
        let mut grids = vec![ofdm.demodulate_slot(&impaired).unwrap()];
        let ls_raw = estimate_ls(&grids, 1, &alloc, 1, 30).unwrap();
        let est = estimate_sync(&ls_raw);
        correct_sync(&mut grids, &est);
        let ls = estimate_ls(&grids, 1, &alloc, 1, 30).unwrap();
        // With both offsets removed the combs must be flat in frequency
        // and agree across the two DMRS symbols, up to a common phase.
        let mut slope = C64::new(0.0, 0.0);
        let mut inter = C64::new(0.0, 0.0);
        let c0 = ls.comb(0, 0, 0);
        let c1 = ls.comb(0, 0, 1);
        for m in 0..c0.len() - 1 {
            slope += c0[m].conj() * c0[m + 1];
        }
        for m in 0..c0.len() {
            inter += c0[m].conj() * c1[m];
        }
        assert!(slope.arg().abs() < 1e-3, "slope {}", slope.arg());
        assert!(inter.arg().abs() < 1e-3, "inter-symbol {}", inter.arg());
    }
}
