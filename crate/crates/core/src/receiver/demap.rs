//! Max-log soft demapping.
//!
//! Each bit's LLR is the scaled distance difference between the closest
//! constellation points with that bit at 0 and at 1; positive LLRs vote
//! for bit 0, matching the decoder's convention, and values saturate at
//! the decoder's clamp.

use crate::ldpc::LLR_MAX;
use crate::waveform::Modulation;
use crate::{Error, Result, C64};

/// Max-log LLRs for a run of equalized symbols with per-symbol noise
/// variances, `bits_per_symbol` LLRs per symbol.
pub fn demap_llr(symbols: &[C64], noise_var: &[f64], m: Modulation) -> Result<Vec<f64>> {
    if symbols.len() != noise_var.len() {
        return Err(Error::LengthMismatch {
            expected: symbols.len(),
            actual: noise_var.len(),
        });
    }
    if noise_var.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "noise variance must be positive".into(),
        ));
    }
    let points = m.points();
    let q = m.bits_per_symbol();
    let mut llrs = Vec::with_capacity(symbols.len() * q);
    for (x, &var) in symbols.iter().zip(noise_var) {
        let mut min0 = [f64::INFINITY; 8];
        let mut min1 = [f64::INFINITY; 8];
        for (v, p) in points.iter().enumerate() {
            let d = (x - p).norm_sqr();
            for b in 0..q {
                if (v >> (q - 1 - b)) & 1 == 0 {
                    min0[b] = min0[b].min(d);
                } else {
                    min1[b] = min1[b].min(d);
                }
            }
        }
        for b in 0..q {
            let l = (min1[b] - min0[b]) / var;
            llrs.push(l.clamp(-LLR_MAX, LLR_MAX));
        }
    }
    Ok(llrs)
}
