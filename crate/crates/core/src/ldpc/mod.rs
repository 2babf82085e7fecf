//! Quasi-cyclic LDPC codec: base graph assets, lifted code construction,
//! systematic encoding via the partitioned parity structure, and a
//! flooding sum-product decoder with exact or two-piece-linear check
//! updates.

pub(crate) mod base_graph;
mod boxplus;
mod code;
mod decode;

pub use base_graph::{lifting_set_index, BaseGraph, BaseGraphId, BgEntry, LIFTING_SETS};
pub use boxplus::{boxplus, ln1p_exp_neg, ln1p_exp_neg_two_piece, CheckUpdate};
pub use code::LdpcCode;
pub use decode::{decode, DecodeResult, Decoder};

/// Saturation bound for LLRs, messages and posteriors.
pub const LLR_MAX: f64 = 64.0;
