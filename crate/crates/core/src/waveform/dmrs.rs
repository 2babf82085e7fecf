//! Demodulation reference signals on a two-tone comb.
//!
//! Each DMRS symbol carries QPSK-like pilots on every second subcarrier;
//! port 0 owns the even comb, port 1 the odd comb. Pilot values come
//! from a Gold sequence seeded per slot and symbol.

use crate::waveform::scramble::gold_sequence;
use crate::C64;

/// Gold initializer for the pilots of `symbol` in `slot` under
/// scrambling identity `n_id`.
pub fn dmrs_c_init(slot: usize, symbol: usize, n_id: u32) -> u32 {
    let sym = (14 * slot + symbol + 1) as u64;
    (((1u64 << 17) * sym * (2 * n_id as u64 + 1) + 2 * n_id as u64) % (1 << 31)) as u32
}

/// Unit-power pilot sequence: `r(m) = ((1-2c(2m)) + j(1-2c(2m+1))) / sqrt(2)`.
pub fn dmrs_sequence(slot: usize, symbol: usize, n_id: u32, len: usize) -> Vec<C64> {
    let c = gold_sequence(dmrs_c_init(slot, symbol, n_id), 2 * len);
    let amp = 0.5f64.sqrt();
    (0..len)
        .map(|m| {
            C64::new(
                amp * (1.0 - 2.0 * c[2 * m] as f64),
                amp * (1.0 - 2.0 * c[2 * m + 1] as f64),
            )
        })
        .collect()
}

/// Subcarrier of the `m`-th pilot on `port`'s comb.
pub fn pilot_subcarrier(port: usize, m: usize) -> usize {
    2 * m + port
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn initializer_matches_the_closed_form() {
        // 2^17 * (14*0 + 2 + 1) * (2*7 + 1) + 2*7
        assert_eq!(dmrs_c_init(0, 2, 7), 5_898_254);
        assert_eq!(dmrs_c_init(0, 0, 0), 1 << 17);
        // wraps modulo 2^31
        assert!(dmrs_c_init(319, 13, 65_535) < 1 << 31);
    }

    #[test]
    fn pilots_are_unit_power_qpsk_from_the_frozen_sequence() {
        // gold(5898254) begins 1000 1101 ...
        let r = dmrs_sequence(0, 2, 7, 636);
        assert_eq!(r.len(), 636);
        let amp = 0.5f64.sqrt();
        assert_abs_diff_eq!(r[0].re, -amp, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0].im, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1].re, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1].im, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(r[2].re, -amp, epsilon = 1e-15);
        assert_abs_diff_eq!(r[2].im, -amp, epsilon = 1e-15);
        for p in &r {
            assert_abs_diff_eq!(p.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ports_interleave_on_the_comb() {
        assert_eq!(pilot_subcarrier(0, 0), 0);
        assert_eq!(pilot_subcarrier(1, 0), 1);
        assert_eq!(pilot_subcarrier(0, 635), 1270);
        assert_eq!(pilot_subcarrier(1, 635), 1271);
    }

    #[test]
    fn different_symbols_carry_different_pilots() {
        let a = dmrs_sequence(0, 2, 7, 16);
        let b = dmrs_sequence(0, 11, 7, 16);
        assert!(a.iter().zip(&b).any(|(x, y)| (x - y).norm() > 1e-9));
    }
}
