//! CP-OFDM modulation with a unitary transform convention.
//!
//! 1272 active subcarriers sit centered in a 2048-bin FFT at 30 kHz
//! spacing (61.44 MHz sampling). Symbols 0 and 7 carry the long cyclic
//! prefix; one slot spans 30752 samples. Both transform directions
//! scale by `1/sqrt(N)`, so a unit-power resource element yields unit
//! signal power in the symbol body.
//!
//! Demodulation windows `cp/2` samples early and undoes the implied
//! circular shift with a per-bin phase ramp, buying margin against
//! residual timing error in either direction.

use ndarray::Array2;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::{Error, Result, C64};

/// FFT length.
pub const N_FFT: usize = 2048;
/// Active subcarriers (106 resource blocks).
pub const N_SC: usize = 1272;
/// Subcarrier spacing in Hz.
pub const SCS: f64 = 30.0e3;
/// Sample rate in Hz.
pub const FS: f64 = 61.44e6;
/// OFDM symbols per slot.
pub const SYMBOLS_PER_SLOT: usize = 14;
/// Long cyclic prefix, symbols 0 and 7.
pub const CP_LONG: usize = 176;
/// Short cyclic prefix, all other symbols.
pub const CP_SHORT: usize = 144;
/// Samples per slot.
pub const SLOT_SAMPLES: usize = 30_752;
/// Slot duration in seconds.
pub const SLOT_SECONDS: f64 = SLOT_SAMPLES as f64 / FS;

/// Cyclic prefix length of symbol `l`.
pub fn cp_len(l: usize) -> usize {
    if l == 0 || l == 7 {
        CP_LONG
    } else {
        CP_SHORT
    }
}

/// First sample of symbol `l` within the slot.
pub fn symbol_start(l: usize) -> usize {
    (0..l).map(|m| cp_len(m) + N_FFT).sum()
}

/// Signed FFT bin of subcarrier `k` (zero maps to bin -636).
pub fn signed_bin(k: usize) -> isize {
    k as isize - (N_SC as isize / 2)
}

fn bin_index(k: usize) -> usize {
    (signed_bin(k) + N_FFT as isize) as usize % N_FFT
}

/// Unitary CP-OFDM modulator/demodulator with cached FFT plans.
pub struct Ofdm {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Default for Ofdm {
    fn default() -> Self {
        Self::new()
    }
}

impl Ofdm {
    pub fn new() -> Self {
        let mut planner = FftPlanner::new();
        Ofdm {
            fwd: planner.plan_fft_forward(N_FFT),
            inv: planner.plan_fft_inverse(N_FFT),
        }
    }

    /// Slot waveform from a `N_SC x 14` resource grid.
    pub fn modulate_slot(&self, grid: &Array2<C64>) -> Result<Vec<C64>> {
        if grid.dim() != (N_SC, SYMBOLS_PER_SLOT) {
            return Err(Error::DimensionMismatch(format!(
                "grid {:?}, expected ({N_SC}, {SYMBOLS_PER_SLOT})",
                grid.dim()
            )));
        }
        let scale = 1.0 / (N_FFT as f64).sqrt();
        let mut out = Vec::with_capacity(SLOT_SAMPLES);
        let mut bins = vec![C64::default(); N_FFT];
        for l in 0..SYMBOLS_PER_SLOT {
            bins.fill(C64::default());
            for k in 0..N_SC {
                bins[bin_index(k)] = grid[(k, l)];
            }
            self.inv.process(&mut bins);
            for b in bins.iter_mut() {
                *b *= scale;
            }
            let cp = cp_len(l);
            out.extend_from_slice(&bins[N_FFT - cp..]);
            out.extend_from_slice(&bins);
        }
        debug_assert_eq!(out.len(), SLOT_SAMPLES);
        Ok(out)
    }

    /// Resource grid from one slot of samples.
    pub fn demodulate_slot(&self, samples: &[C64]) -> Result<Array2<C64>> {
        if samples.len() != SLOT_SAMPLES {
            return Err(Error::LengthMismatch {
                expected: SLOT_SAMPLES,
                actual: samples.len(),
            });
        }
        let scale = 1.0 / (N_FFT as f64).sqrt();
        let mut grid = Array2::default((N_SC, SYMBOLS_PER_SLOT));
        let mut bins = vec![C64::default(); N_FFT];
        for l in 0..SYMBOLS_PER_SLOT {
            let cp = cp_len(l);
            let start = symbol_start(l) + cp / 2;
            bins.copy_from_slice(&samples[start..start + N_FFT]);
            self.fwd.process(&mut bins);
            // windowing cp/2 early circularly delays the body by
            // delta samples; undo it bin by bin
            let delta = (cp - cp / 2) as f64;
            for k in 0..N_SC {
                let idx = bin_index(k);
                let phase = 2.0 * std::f64::consts::PI * idx as f64 * delta / N_FFT as f64;
                grid[(k, l)] = bins[idx] * scale * C64::from_polar(1.0, phase);
            }
        }
        Ok(grid)
    }
}
