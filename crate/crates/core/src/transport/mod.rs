//! Transport chain: CRC attachment, segmentation, LDPC coding and rate
//! matching, plus their inverses.
//!
//! [`TransportChain`] binds the per-configuration state (segmentation,
//! lifted code, per-block bit budgets) and exposes `encode` from payload
//! bits to the slot's coded-bit stream and `decode` from soft LLRs back
//! to payload bits with per-block CRC verdicts.

pub mod crc;
pub mod rate_match;
pub mod segment;

pub use rate_match::{deinterleave_llrs, e_split, interleave, k0_for_rv, CircularBuffer};
pub use segment::{segmentation, select_base_graph, Segmentation};

use crate::ldpc::{CheckUpdate, Decoder, LdpcCode};
use crate::{Error, Result};

/// One transport block's full bit-level processing pipeline.
pub struct TransportChain {
    tbs: usize,
    q_m: usize,
    rv: u8,
    seg: Segmentation,
    code: LdpcCode,
    e_r: Vec<usize>,
    k0: usize,
}

/// Outcome of decoding one transport block.
#[derive(Clone, Debug)]
pub struct TbDecode {
    /// Recovered payload, `tbs` bits.
    pub payload: Vec<u8>,
    /// Transport-block CRC verdict.
    pub tb_crc_ok: bool,
    /// Per-block verdict used for block-error counting: the block CRC
    /// when blocks carry one, otherwise the transport-block CRC.
    pub block_ok: Vec<bool>,
    /// Decoder iterations spent on each block.
    pub iterations: Vec<usize>,
}

impl TransportChain {
    /// Plans the chain for a `tbs`-bit payload at code rate `rate`,
    /// modulation order `q_m`, over `n_layers` layers filling `g` coded
    /// bits, transmitted with redundancy version `rv`.
    pub fn new(
        tbs: usize,
        rate: f64,
        q_m: usize,
        n_layers: usize,
        g: usize,
        rv: u8,
    ) -> Result<Self> {
        let seg = segmentation(tbs, rate)?;
        let code = LdpcCode::from_bundled(seg.bg, seg.z)?;
        let e_r = e_split(g, seg.block_count(), q_m, n_layers)?;
        let k0 = k0_for_rv(seg.bg, seg.z, code.n() - 2 * seg.z, rv)?;
        Ok(TransportChain {
            tbs,
            q_m,
            rv,
            seg,
            code,
            e_r,
            k0,
        })
    }

    pub fn tbs(&self) -> usize {
        self.tbs
    }

    pub fn rv(&self) -> u8 {
        self.rv
    }

    pub fn segmentation(&self) -> &Segmentation {
        &self.seg
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    /// Per-block coded-bit budgets, summing to `g`.
    pub fn bit_budgets(&self) -> &[usize] {
        &self.e_r
    }

    fn buffer_for(&self, r: usize) -> CircularBuffer {
        CircularBuffer {
            n: self.code.n(),
            z: self.seg.z,
            k_prime: self.seg.k_prime(r),
            k: self.seg.k,
        }
    }

    /// Payload bits to the concatenated coded-bit stream (`g` bits).
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.tbs {
            return Err(Error::LengthMismatch {
                expected: self.tbs,
                actual: payload.len(),
            });
        }
        let tb = segment::attach_tb_crc(payload);
        let blocks = segment::segment(&tb, &self.seg)?;
        let mut out = Vec::with_capacity(self.e_r.iter().sum());
        for (r, block) in blocks.iter().enumerate() {
            let cw = self.code.encode(block)?;
            let sel = self.buffer_for(r).select(&cw, self.e_r[r], self.k0)?;
            out.extend(interleave(&sel, self.q_m)?);
        }
        Ok(out)
    }

    /// Soft LLRs (`g` values, positive means bit 0) back to payload bits.
    pub fn decode(&self, llrs: &[f64], max_iters: usize, update: CheckUpdate) -> Result<TbDecode> {
        self.decode_with(&mut Decoder::new(), llrs, max_iters, update)
    }

    /// As [`decode`](Self::decode), reusing caller-owned scratch space.
    pub fn decode_with(
        &self,
        decoder: &mut Decoder,
        llrs: &[f64],
        max_iters: usize,
        update: CheckUpdate,
    ) -> Result<TbDecode> {
        let g: usize = self.e_r.iter().sum();
        if llrs.len() != g {
            return Err(Error::LengthMismatch {
                expected: g,
                actual: llrs.len(),
            });
        }
        let mut blocks = Vec::with_capacity(self.seg.block_count());
        let mut iterations = Vec::with_capacity(self.seg.block_count());
        let mut converged = Vec::with_capacity(self.seg.block_count());
        let mut at = 0;
        for (r, &e) in self.e_r.iter().enumerate() {
            let soft = deinterleave_llrs(&llrs[at..at + e], self.q_m)?;
            at += e;
            let acc = self.buffer_for(r).accumulate(&soft, self.k0)?;
            let out = decoder.decode(&self.code, &acc, max_iters, update)?;
            iterations.push(out.iterations);
            converged.push(out.converged);
            blocks.push(out.info_bits);
        }
        let deseg = segment::desegment(&blocks, &self.seg)?;
        let (payload, tb_crc_ok) = segment::check_tb_crc(&deseg.tb_with_crc);
        let block_ok = if self.seg.cb_crc {
            deseg.cb_crc_ok
        } else {
            vec![tb_crc_ok]
        };
        Ok(TbDecode {
            payload,
            tb_crc_ok,
            block_ok,
            iterations,
        })
    }
}
