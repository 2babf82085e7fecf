//! Flooding sum-product decoder over the expanded check adjacency.
//!
//! Every iteration recomputes all check-to-variable messages from the
//! posterior of the previous iteration (`v2c = posterior - old c2v`),
//! folds each check row with a forward/backward pass of the pairwise
//! rule, accumulates the new posterior, hard-decides and stops as soon
//! as the syndrome clears. Messages and channel inputs are clamped to
//! `[-LLR_MAX, LLR_MAX]`.

use crate::ldpc::code::{LdpcCode, MAX_ROW_DEGREE};
use crate::ldpc::{boxplus, CheckUpdate, LLR_MAX};
use crate::{Error, Result};

/// Outcome of one decode attempt.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    /// Hard decisions on the first `k` variables.
    pub info_bits: Vec<u8>,
    /// Hard decisions on all `n` variables.
    pub hard_bits: Vec<u8>,
    /// True when the syndrome cleared within the iteration budget.
    pub converged: bool,
    /// Iterations performed (equals the budget when not converged).
    pub iterations: usize,
}

/// Reusable decoder scratch space; one instance per worker thread.
#[derive(Default)]
pub struct Decoder {
    chan: Vec<f64>,
    lambda: Vec<f64>,
    acc: Vec<f64>,
    c2v: Vec<f64>,
    hard: Vec<u8>,
}

impl Decoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs up to `max_iters` flooding iterations on `llrs` (positive
    /// means bit 0). Zero LLRs are treated as erasures.
    pub fn decode(
        &mut self,
        code: &LdpcCode,
        llrs: &[f64],
        max_iters: usize,
        update: CheckUpdate,
    ) -> Result<DecodeResult> {
        let n = code.n();
        if llrs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: llrs.len(),
            });
        }
        let row_ptr = code.row_ptr();
        let col_idx = code.col_idx();

        self.chan.clear();
        self.chan
            .extend(llrs.iter().map(|&x| x.clamp(-LLR_MAX, LLR_MAX)));
        self.lambda.clear();
        self.lambda.extend_from_slice(&self.chan);
        self.c2v.clear();
        self.c2v.resize(col_idx.len(), 0.0);
        self.acc.resize(n, 0.0);
        self.hard.resize(n, 0);

        let mut converged = false;
        let mut iterations = 0;
        let mut v2c = [0.0f64; MAX_ROW_DEGREE];
        let mut fwd = [0.0f64; MAX_ROW_DEGREE];
        let mut bwd = [0.0f64; MAX_ROW_DEGREE];

        for it in 1..=max_iters {
            self.acc.copy_from_slice(&self.chan);
            for r in 0..code.m() {
                let lo = row_ptr[r] as usize;
                let hi = row_ptr[r + 1] as usize;
                let deg = hi - lo;
                let cols = &col_idx[lo..hi];
                let msgs = &mut self.c2v[lo..hi];

                for t in 0..deg {
                    v2c[t] = self.lambda[cols[t] as usize] - msgs[t];
                }
                match deg {
                    0 => continue,
                    1 => {
                        msgs[0] = LLR_MAX;
                        self.acc[cols[0] as usize] += LLR_MAX;
                        continue;
                    }
                    _ => {}
                }
                fwd[0] = v2c[0];
                for t in 1..deg {
                    fwd[t] = boxplus(fwd[t - 1], v2c[t], update);
                }
                bwd[deg - 1] = v2c[deg - 1];
                for t in (0..deg - 1).rev() {
                    bwd[t] = boxplus(bwd[t + 1], v2c[t], update);
                }
                for t in 0..deg {
                    let m = if t == 0 {
                        bwd[1]
                    } else if t == deg - 1 {
                        fwd[deg - 2]
                    } else {
                        boxplus(fwd[t - 1], bwd[t + 1], update)
                    };
                    let m = m.clamp(-LLR_MAX, LLR_MAX);
                    msgs[t] = m;
                    self.acc[cols[t] as usize] += m;
                }
            }
            std::mem::swap(&mut self.lambda, &mut self.acc);
            for (h, &l) in self.hard.iter_mut().zip(&self.lambda) {
                *h = (l < 0.0) as u8;
            }
            iterations = it;
            if code.syndrome_ok(&self.hard) {
                converged = true;
                break;
            }
        }
        if max_iters == 0 {
            for (h, &l) in self.hard.iter_mut().zip(&self.lambda) {
                *h = (l < 0.0) as u8;
            }
            converged = code.syndrome_ok(&self.hard);
        }

        Ok(DecodeResult {
            info_bits: self.hard[..code.k()].to_vec(),
            hard_bits: self.hard.clone(),
            converged,
            iterations,
        })
    }
}

/// One-shot decode with fresh scratch space.
pub fn decode(
    code: &LdpcCode,
    llrs: &[f64],
    max_iters: usize,
    update: CheckUpdate,
) -> Result<DecodeResult> {
    Decoder::new().decode(code, llrs, max_iters, update)
}
