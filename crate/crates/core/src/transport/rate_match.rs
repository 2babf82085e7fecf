//! Rate matching: circular-buffer bit selection and its soft inverse.
//!
//! The encoder output minus its first `2Z` systematic bits forms a
//! circular buffer of `N_cb` bits. Transmission reads `E` bits starting
//! at the redundancy-version offset `k0`, skipping filler positions and
//! wrapping as needed, then passes them through a `Q_m`-row interleaver.
//! The receiver runs the inverse on LLRs: punctured bits are erasures,
//! filler bits are known zeros, and repeated bits accumulate.

use crate::ldpc::{BaseGraphId, LLR_MAX};
use crate::{Error, Result};

/// Starting offset into the circular buffer for redundancy version `rv`.
pub fn k0_for_rv(bg: BaseGraphId, z: usize, n_cb: usize, rv: u8) -> Result<usize> {
    let (den, fracs) = match bg {
        BaseGraphId::Bg1 => (66, [0usize, 17, 33, 56]),
        BaseGraphId::Bg2 => (50, [0, 13, 25, 43]),
    };
    let frac = *fracs
        .get(rv as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("redundancy version {rv}")))?;
    Ok((frac * n_cb / (den * z)) * z)
}

/// Splits `g` coded bits over `c` blocks in units of `n_layers * q_m`,
/// later blocks absorbing the remainder.
pub fn e_split(g: usize, c: usize, q_m: usize, n_layers: usize) -> Result<Vec<usize>> {
    let unit = n_layers * q_m;
    if c == 0 || unit == 0 || g % unit != 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot split {g} bits into {c} blocks of {unit}-bit units"
        )));
    }
    let total = g / unit;
    let base = total / c;
    let cutoff = c - 1 - (total % c);
    Ok((0..c)
        .map(|j| unit * if j <= cutoff { base } else { base + 1 })
        .collect())
}

/// Per-block geometry the selector and its inverse share.
#[derive(Clone, Copy, Debug)]
pub struct CircularBuffer {
    /// Codeword length `n`.
    pub n: usize,
    /// Lifting size; the first `2z` bits are never transmitted.
    pub z: usize,
    /// Payload+CRC bits before filler.
    pub k_prime: usize,
    /// Encoder input length (filler ends at `k`).
    pub k: usize,
}

impl CircularBuffer {
    pub fn n_cb(&self) -> usize {
        self.n - 2 * self.z
    }

    fn filler_range(&self) -> std::ops::Range<usize> {
        self.k_prime - 2 * self.z..self.k - 2 * self.z
    }

    fn validate(&self) -> Result<()> {
        if 2 * self.z >= self.n
            || self.k_prime > self.k
            || self.k > self.n
            || self.k_prime < 2 * self.z
        {
            return Err(Error::InvalidArgument(format!(
                "inconsistent buffer geometry n={} z={} k'={} k={}",
                self.n, self.z, self.k_prime, self.k
            )));
        }
        Ok(())
    }

    /// Reads `e` bits from the codeword's circular buffer starting at
    /// `k0`, skipping filler positions.
    pub fn select(&self, codeword: &[u8], e: usize, k0: usize) -> Result<Vec<u8>> {
        self.validate()?;
        if codeword.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: codeword.len(),
            });
        }
        let n_cb = self.n_cb();
        let filler = self.filler_range();
        if k0 >= n_cb {
            return Err(Error::InvalidArgument(format!(
                "k0 = {k0} >= N_cb = {n_cb}"
            )));
        }
        if n_cb == filler.len() {
            return Err(Error::InvalidArgument("buffer is all filler".into()));
        }
        let buf = &codeword[2 * self.z..];
        let mut out = Vec::with_capacity(e);
        let mut pos = k0;
        while out.len() < e {
            if !filler.contains(&pos) {
                out.push(buf[pos]);
            }
            pos += 1;
            if pos == n_cb {
                pos = 0;
            }
        }
        Ok(out)
    }

    /// Scatters received LLRs back onto codeword positions: erased
    /// prefix at zero, filler pinned to `+LLR_MAX`, repeats summed.
    pub fn accumulate(&self, llrs: &[f64], k0: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let n_cb = self.n_cb();
        let filler = self.filler_range();
        if k0 >= n_cb {
            return Err(Error::InvalidArgument(format!(
                "k0 = {k0} >= N_cb = {n_cb}"
            )));
        }
        if n_cb == filler.len() {
            return Err(Error::InvalidArgument("buffer is all filler".into()));
        }
        let mut out = vec![0.0; self.n];
        for p in filler.clone() {
            out[2 * self.z + p] = LLR_MAX;
        }
        let mut pos = k0;
        let mut taken = 0;
        while taken < llrs.len() {
            if !filler.contains(&pos) {
                out[2 * self.z + pos] += llrs[taken];
                taken += 1;
            }
            pos += 1;
            if pos == n_cb {
                pos = 0;
            }
        }
        Ok(out)
    }
}

/// Modulation interleaver: bit `i (E/Q_m) + j` lands at `i + j Q_m`.
pub fn interleave(bits: &[u8], q_m: usize) -> Result<Vec<u8>> {
    if q_m == 0 || bits.len() % q_m != 0 {
        return Err(Error::InvalidArgument(format!(
            "{} bits do not fill {q_m}-bit symbols",
            bits.len()
        )));
    }
    let cols = bits.len() / q_m;
    let mut out = vec![0u8; bits.len()];
    for i in 0..q_m {
        for j in 0..cols {
            out[i + j * q_m] = bits[i * cols + j];
        }
    }
    Ok(out)
}

/// Inverse of [`interleave`] applied to soft values.
pub fn deinterleave_llrs(llrs: &[f64], q_m: usize) -> Result<Vec<f64>> {
    if q_m == 0 || llrs.len() % q_m != 0 {
        return Err(Error::InvalidArgument(format!(
            "{} LLRs do not fill {q_m}-bit symbols",
            llrs.len()
        )));
    }
    let cols = llrs.len() / q_m;
    let mut out = vec![0.0; llrs.len()];
    for i in 0..q_m {
        for j in 0..cols {
            out[i * cols + j] = llrs[i + j * q_m];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use sha2::{Digest, Sha256};

    /// BG2 Z=16 synthetic geometry: N_cb = 800, filler over buffer
    /// positions [88, 128).
    fn synthetic() -> CircularBuffer {
        CircularBuffer {
            n: 832,
            z: 16,
            k_prime: 120,
            k: 160,
        }
    }

    fn synthetic_codeword() -> Vec<u8> {
        // first 2z bits arbitrary; buffer position i holds a hash bit
        let mut cw = vec![1u8; 32];
        cw.extend((0..800u64).map(|i| ((i * 2654435761) >> 7) as u8 & 1));
        cw
    }

    #[test]
    fn rv_offsets_scale_with_the_buffer() {
        // full buffers at the largest lifting size
        for (bg, z, n_cb, want) in [
            (
                BaseGraphId::Bg1,
                384,
                66 * 384,
                [0, 17 * 384, 33 * 384, 56 * 384],
            ),
            (
                BaseGraphId::Bg2,
                384,
                50 * 384,
                [0, 13 * 384, 25 * 384, 43 * 384],
            ),
            (BaseGraphId::Bg2, 16, 800, [0, 208, 400, 688]),
        ] {
            for rv in 0..4u8 {
                assert_eq!(k0_for_rv(bg, z, n_cb, rv).unwrap(), want[rv as usize]);
            }
        }
        assert!(k0_for_rv(BaseGraphId::Bg1, 2, 132, 4).is_err());
    }

    #[test]
    fn selection_skips_filler_and_matches_frozen_digests() {
        let cb = synthetic();
        let cw = synthetic_codeword();
        let frozen = [
            (
                0usize,
                [0u8, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1],
                "cb2ca487d99f60b1",
            ),
            (
                208,
                [1, 1, 0, 1, 1, 0, 1, 1, 0, 0, 1, 0],
                "22df46eba4b35579",
            ),
            (
                400,
                [1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0],
                "30659a3223e9452a",
            ),
            (
                688,
                [1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1, 0],
                "fd5578a9181aa9ff",
            ),
        ];
        for (k0, first12, digest16) in frozen {
            let sel = cb.select(&cw, 100, k0).unwrap();
            assert_eq!(&sel[..12], &first12, "k0={k0}");
            let hex = format!("{:x}", Sha256::digest(&sel));
            assert_eq!(&hex[..16], digest16, "k0={k0}");
        }
    }

    #[test]
    fn oversized_reads_wrap_and_accumulate_at_most_twice() {
        let cb = synthetic();
        // E = 900 over 760 usable bits: 140 positions repeat once
        let acc = cb.accumulate(&vec![1.0; 900], 0).unwrap();
        assert!(acc[..32].iter().all(|&x| x == 0.0), "erased prefix");
        let filler = &acc[32 + 88..32 + 128];
        assert!(filler.iter().all(|&x| x == LLR_MAX));
        let data: Vec<f64> = (0..800)
            .filter(|p| !(88..128).contains(p))
            .map(|p| acc[32 + p])
            .collect();
        assert_eq!(data.iter().filter(|&&x| x == 2.0).count(), 140);
        assert_eq!(data.iter().filter(|&&x| x == 1.0).count(), 760 - 140);
        let total: f64 = data.iter().sum();
        assert_eq!(total, 900.0);
    }

    #[test]
    fn select_and_accumulate_are_consistent() {
        let cb = synthetic();
        let cw = synthetic_codeword();
        let e = 820; // forces a wrap past the filler block
        for rv in 0..4u8 {
            let k0 = k0_for_rv(BaseGraphId::Bg2, cb.z, cb.n_cb(), rv).unwrap();
            let sel = cb.select(&cw, e, k0).unwrap();
            let llrs: Vec<f64> = sel.iter().map(|&b| 1.0 - 2.0 * b as f64).collect();
            let acc = cb.accumulate(&llrs, k0).unwrap();
            for p in 0..cb.n_cb() {
                let v = acc[2 * cb.z + p];
                if (88..128).contains(&p) {
                    assert_eq!(v, LLR_MAX);
                } else if v != 0.0 {
                    // every accumulated position agrees in sign with
                    // the transmitted bit
                    let want = 1.0 - 2.0 * cw[2 * cb.z + p] as f64;
                    assert_eq!(v.signum(), want, "rv={rv} p={p}");
                }
            }
        }
    }

    #[test]
    fn interleaver_writes_symbols_column_first() {
        let bits = [0, 1, 2, 3, 4, 5, 6, 7].map(|b| b as u8);
        assert_eq!(
            interleave(&bits, 4).unwrap(),
            [0, 2, 4, 6, 1, 3, 5, 7].map(|b| b as u8)
        );
        assert_eq!(interleave(&bits, 1).unwrap(), bits);
    }

    #[test]
    fn deinterleave_inverts_interleave() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        for q_m in [1usize, 2, 4, 6] {
            let bits: Vec<u8> = (0..24 * q_m).map(|_| rng.gen_range(0..2u8)).collect();
            let tx = interleave(&bits, q_m).unwrap();
            let llrs: Vec<f64> = tx.iter().map(|&b| b as f64 + 0.5).collect();
            let rx = deinterleave_llrs(&llrs, q_m).unwrap();
            for (b, l) in bits.iter().zip(&rx) {
                assert_eq!(*b as f64 + 0.5, *l);
            }
        }
    }

    #[test]
    fn degenerate_geometries_are_rejected() {
        let cb = synthetic();
        assert!(cb.select(&vec![0; 10], 5, 0).is_err());
        assert!(cb.select(&synthetic_codeword(), 5, 800).is_err());
        assert!(interleave(&[0, 1, 1], 2).is_err());
        assert!(e_split(102, 3, 2, 2).is_err());
        assert!(e_split(96, 0, 2, 2).is_err());
        let all_filler = CircularBuffer {
            n: 832,
            z: 16,
            k_prime: 32,
            k: 832,
        };
        assert!(all_filler.select(&synthetic_codeword(), 5, 0).is_err());
    }

    #[test]
    fn coded_bit_budget_splits_in_layer_symbol_units() {
        // five-block split with remainder two: later blocks take one
        // extra unit each
        assert_eq!(
            e_split(111_936, 5, 4, 2).unwrap(),
            vec![22384, 22384, 22384, 22392, 22392]
        );
        assert_eq!(e_split(55_968, 2, 2, 2).unwrap(), vec![27984, 27984]);
        assert_eq!(
            e_split(167_904, 13, 6, 2).unwrap(),
            [vec![12912; 9], vec![12924; 4]].concat()
        );
    }
}
