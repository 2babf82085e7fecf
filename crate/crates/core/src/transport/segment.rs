//! Transport block segmentation into LDPC code blocks.
//!
//! A transport block (with its CRC already attached) is cut into `C`
//! nearly equal chunks; each chunk gains a per-block CRC when `C > 1`
//! and is padded with filler zeros up to the encoder input length
//! `K = kb_full * Z`. Filler bits are never transmitted: rate matching
//! skips them and the receiver pins them to a strong known-zero LLR.

use crate::ldpc::{lifting_set_index, BaseGraphId, LIFTING_SETS};
use crate::transport::crc::{CRC24A, CRC24B};
use crate::{Error, Result};

/// Transport-block CRC length.
pub const TB_CRC_LEN: usize = 24;
/// Per-code-block CRC length, present only when `C > 1`.
pub const CB_CRC_LEN: usize = 24;

/// How one transport block maps onto LDPC code blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub bg: BaseGraphId,
    /// Lifting size shared by all blocks.
    pub z: usize,
    /// Encoder input length `kb_full * z`.
    pub k: usize,
    /// Largest per-block payload+CRC length; drives the choice of `z`.
    pub k_prime_max: usize,
    /// Whether each block carries its own CRC.
    pub cb_crc: bool,
    /// Payload bits per block (sums to `B`); sizes differ by at most one.
    pub chunks: Vec<usize>,
}

impl Segmentation {
    pub fn block_count(&self) -> usize {
        self.chunks.len()
    }

    /// Payload+CRC bits in block `r`, before filler.
    pub fn k_prime(&self, r: usize) -> usize {
        self.chunks[r] + if self.cb_crc { CB_CRC_LEN } else { 0 }
    }

    /// Filler bits in block `r`.
    pub fn filler(&self, r: usize) -> usize {
        self.k - self.k_prime(r)
    }
}

/// Base graph choice from payload size and target code rate.
pub fn select_base_graph(tbs: usize, rate: f64) -> BaseGraphId {
    if tbs <= 292 || (tbs <= 3824 && rate <= 0.67) || rate <= 0.25 {
        BaseGraphId::Bg2
    } else {
        BaseGraphId::Bg1
    }
}

/// Computes the segmentation of a `tbs`-bit payload at code rate `rate`.
pub fn segmentation(tbs: usize, rate: f64) -> Result<Segmentation> {
    if tbs == 0 {
        return Err(Error::InvalidArgument("empty transport block".into()));
    }
    let bg = select_base_graph(tbs, rate);
    let k_cb = bg.k_cb();
    let b = tbs + TB_CRC_LEN;

    let (c, cb_crc) = if b <= k_cb {
        (1, false)
    } else {
        (b.div_ceil(k_cb - CB_CRC_LEN), true)
    };
    let b_prime = b + if cb_crc { c * CB_CRC_LEN } else { 0 };
    let k_prime_max = b_prime.div_ceil(c);

    let kb = match bg {
        BaseGraphId::Bg1 => 22,
        BaseGraphId::Bg2 => {
            if b > 640 {
                10
            } else if b > 560 {
                9
            } else if b > 192 {
                8
            } else {
                6
            }
        }
    };
    let z = LIFTING_SETS
        .iter()
        .flat_map(|s| s.iter().copied())
        .filter(|&z| kb * z >= k_prime_max)
        .min()
        .ok_or_else(|| {
            Error::InvalidArgument(format!("no lifting size fits K' = {k_prime_max}"))
        })?;
    debug_assert!(lifting_set_index(z).is_some());

    let kb_full = bg.dims().2;
    let base = b / c;
    let rem = b % c;
    let chunks = (0..c).map(|r| base + usize::from(r < rem)).collect();

    Ok(Segmentation {
        bg,
        z,
        k: kb_full * z,
        k_prime_max,
        cb_crc,
        chunks,
    })
}

/// Cuts a transport block (CRC included) into encoder-ready blocks:
/// chunk, per-block CRC when present, filler zeros up to `K`.
pub fn segment(tb_with_crc: &[u8], seg: &Segmentation) -> Result<Vec<Vec<u8>>> {
    let b: usize = seg.chunks.iter().sum();
    if tb_with_crc.len() != b {
        return Err(Error::LengthMismatch {
            expected: b,
            actual: tb_with_crc.len(),
        });
    }
    let mut blocks = Vec::with_capacity(seg.block_count());
    let mut at = 0;
    for &chunk in &seg.chunks {
        let mut block = tb_with_crc[at..at + chunk].to_vec();
        at += chunk;
        if seg.cb_crc {
            CRC24B.attach(&mut block);
        }
        block.resize(seg.k, 0);
        blocks.push(block);
    }
    Ok(blocks)
}

/// Reassembles decoded blocks: strips filler and per-block CRCs, checks
/// them, and returns the transport block (still carrying its own CRC).
pub struct Desegmented {
    /// Concatenated payload chunks, `B` bits.
    pub tb_with_crc: Vec<u8>,
    /// Per-block CRC verdicts; all `true` when blocks carry no CRC.
    pub cb_crc_ok: Vec<bool>,
}

pub fn desegment(blocks: &[Vec<u8>], seg: &Segmentation) -> Result<Desegmented> {
    if blocks.len() != seg.block_count() {
        return Err(Error::LengthMismatch {
            expected: seg.block_count(),
            actual: blocks.len(),
        });
    }
    let mut tb = Vec::with_capacity(seg.chunks.iter().sum());
    let mut oks = Vec::with_capacity(blocks.len());
    for (r, block) in blocks.iter().enumerate() {
        if block.len() < seg.k_prime(r) {
            return Err(Error::LengthMismatch {
                expected: seg.k_prime(r),
                actual: block.len(),
            });
        }
        let chunk = &block[..seg.chunks[r]];
        let ok = if seg.cb_crc {
            CRC24B.check(&block[..seg.k_prime(r)])
        } else {
            true
        };
        tb.extend_from_slice(chunk);
        oks.push(ok);
    }
    Ok(Desegmented {
        tb_with_crc: tb,
        cb_crc_ok: oks,
    })
}

/// Attaches the transport-block CRC to a payload.
pub fn attach_tb_crc(payload: &[u8]) -> Vec<u8> {
    let mut tb = payload.to_vec();
    CRC24A.attach(&mut tb);
    tb
}

/// Verifies and strips the transport-block CRC.
pub fn check_tb_crc(tb_with_crc: &[u8]) -> (Vec<u8>, bool) {
    let ok = CRC24A.check(tb_with_crc);
    let cut = tb_with_crc.len().saturating_sub(TB_CRC_LEN);
    (tb_with_crc[..cut].to_vec(), ok)
}
