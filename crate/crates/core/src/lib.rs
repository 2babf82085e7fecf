//! Link-level simulator for a 5G NR uplink shared channel.
//!
//! The crate covers the full transmit chain (CRC attachment, code block
//! segmentation, quasi-cyclic LDPC encoding, rate matching, scrambling,
//! QAM mapping, DMRS insertion, CP-OFDM modulation, transmit filtering),
//! statistical channel models (AWGN, tapped-delay-line Rayleigh fading
//! with sum-of-sinusoids Doppler, CFO/STO impairments) and the receive
//! chain (synchronization, LS/MMSE channel estimation, MMSE equalization,
//! max-log soft demapping, sum-product decoding), plus a deterministic
//! Monte-Carlo harness that sweeps SNR and reports BLER/BER/EVM.
//!
//! # Example
//!
//! ```
//! use nrsim_core::ldpc::{BaseGraphId, LdpcCode, decode, CheckUpdate};
//!
//! let code = LdpcCode::from_bundled(BaseGraphId::Bg2, 16).unwrap();
//! let info: Vec<u8> = (0..code.k()).map(|i| (i % 3 == 0) as u8).collect();
//! let cw = code.encode(&info).unwrap();
//! assert!(code.syndrome_ok(&cw));
//!
//! // noiseless LLRs decode back on the first iteration
//! let llrs: Vec<f64> = cw.iter().map(|&b| if b == 0 { 10.0 } else { -10.0 }).collect();
//! let out = decode(&code, &llrs, 20, CheckUpdate::TwoPiece).unwrap();
//! assert!(out.converged);
//! assert_eq!(&out.info_bits, &info);
//! ```

pub mod channel;
pub mod gf2;
pub mod ldpc;
pub mod receiver;
pub mod sim;
pub mod transport;
pub mod waveform;

mod error;

pub use error::{Error, Result};

/// Complex baseband sample type used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
