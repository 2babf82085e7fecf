//! Linear-phase FIR lowpass design by unweighted least squares.
//!
//! The amplitude response `A(w) = sum_k c_k cos(k w)` minimizes the
//! squared deviation from one over the passband plus the squared
//! magnitude over the stopband, ignoring the transition gap. Band
//! integrals have closed forms, leaving a small symmetric positive
//! definite system for the half-filter coefficients.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// A real FIR filter applied by direct convolution.
#[derive(Clone, Debug)]
pub struct FirFilter {
    taps: Vec<f64>,
}

impl FirFilter {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument("empty filter".into()));
        }
        Ok(FirFilter { taps })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Delay of the symmetric filter's peak, in samples.
    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// Full convolution; output length `x.len() + taps - 1`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = x.len();
        let t = self.taps.len();
        let mut y = vec![C64::default(); n + t - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &h) in self.taps.iter().enumerate() {
                y[i + j] += xi * h;
            }
        }
        y
    }

    /// Zero-phase amplitude at frequency `f_hz` for sample rate `fs`.
    pub fn amplitude_at(&self, f_hz: f64, fs: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * f_hz / fs;
        let m = self.group_delay() as f64;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, &h)| h * (w * (n as f64 - m)).cos())
            .sum()
    }
}

/// Designs an odd-length linear-phase lowpass: unit passband up to
/// `f_pass`, zero stopband from `f_stop`, least-squares optimal.
pub fn design_lowpass(n_taps: usize, f_pass: f64, f_stop: f64, fs: f64) -> Result<FirFilter> {
    if n_taps % 2 == 0 || n_taps < 3 {
        return Err(Error::InvalidArgument(format!(
            "tap count {n_taps} must be odd and at least 3"
        )));
    }
    if !(0.0 < f_pass && f_pass < f_stop && f_stop <= fs / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "band edges {f_pass}/{f_stop} invalid for fs {fs}"
        )));
    }
    let pi = std::f64::consts::PI;
    let wp = 2.0 * pi * f_pass / fs;
    let ws = 2.0 * pi * f_stop / fs;
    let m = (n_taps - 1) / 2;

    // integral of cos(d w) over the transition gap [wp, ws]
    let gap = |d: usize| -> f64 {
        if d == 0 {
            ws - wp
        } else {
            ((d as f64 * ws).sin() - (d as f64 * wp).sin()) / d as f64
        }
    };

    let mut q = DMatrix::zeros(m + 1, m + 1);
    let mut b = DVector::zeros(m + 1);
    for k in 0..=m {
        b[k] = if k == 0 {
            wp
        } else {
            (k as f64 * wp).sin() / k as f64
        };
        for j in 0..=m {
            // cos(k w) cos(j w) integrated over [0, pi] minus the gap
            let full = if k == 0 && j == 0 {
                pi
            } else if k == j {
                pi / 2.0
            } else {
                0.0
            };
            q[(k, j)] = full - 0.5 * (gap(k.abs_diff(j)) + gap(k + j));
        }
    }
    let c = q
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("design system is not positive definite".into()))?
        .solve(&b);

    let mut taps = vec![0.0; n_taps];
    taps[m] = c[0];
    for k in 1..=m {
        taps[m + k] = c[k] / 2.0;
        taps[m - k] = c[k] / 2.0;
    }
    FirFilter::new(taps)
}

/// The transmit filter: 153 taps, passband to the edge of the occupied
/// subcarriers, stopband from half the channel bandwidth.
pub fn tx_lowpass() -> FirFilter {
    use crate::waveform::ofdm::{FS, N_SC, SCS};
    let f_pass = 0.5 * SCS * N_SC as f64;
    design_lowpass(153, f_pass, 20.0e6, FS).expect("fixed design parameters are valid")
}
