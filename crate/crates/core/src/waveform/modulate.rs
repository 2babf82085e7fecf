//! Gray-coded QAM constellations and bit-to-symbol mapping.
//!
//! All constellations are unit mean power. Bits map most significant
//! first: the first bit of each group picks the real sign, the second
//! the imaginary sign, and later bits refine the amplitudes.

use crate::{Error, Result, C64};

/// Modulation order of the data channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Modulation::Qpsk),
            "16qam" | "qam16" => Ok(Modulation::Qam16),
            "64qam" | "qam64" => Ok(Modulation::Qam64),
            other => Err(Error::InvalidArgument(format!("modulation {other}"))),
        }
    }

    /// Maps one group of `bits_per_symbol` bits.
    pub fn map(self, b: &[u8]) -> C64 {
        let s = |i: usize| 1.0 - 2.0 * b[i] as f64;
        match self {
            Modulation::Qpsk => C64::new(s(0), s(1)) / 2.0f64.sqrt(),
            Modulation::Qam16 => {
                C64::new(s(0) * (2.0 - s(2)), s(1) * (2.0 - s(3))) / 10.0f64.sqrt()
            }
            Modulation::Qam64 => {
                C64::new(
                    s(0) * (4.0 - s(2) * (2.0 - s(4))),
                    s(1) * (4.0 - s(3) * (2.0 - s(5))),
                ) / 42.0f64.sqrt()
            }
        }
    }

    /// The full constellation, indexed by the bit group read as a
    /// big-endian integer.
    pub fn points(self) -> Vec<C64> {
        let q = self.bits_per_symbol();
        (0..1usize << q)
            .map(|v| {
                let bits: Vec<u8> = (0..q).map(|i| ((v >> (q - 1 - i)) & 1) as u8).collect();
                self.map(&bits)
            })
            .collect()
    }
}

/// Maps a bit stream to symbols; the length must fill whole symbols.
pub fn modulate(bits: &[u8], m: Modulation) -> Result<Vec<C64>> {
    let q = m.bits_per_symbol();
    if bits.len() % q != 0 {
        return Err(Error::InvalidArgument(format!(
            "{} bits do not fill {q}-bit symbols",
            bits.len()
        )));
    }
    Ok(bits.chunks_exact(q).map(|g| m.map(g)).collect())
}
