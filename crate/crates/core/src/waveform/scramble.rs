//! Gold-sequence generation and bit scrambling.
//!
//! The length-31 Gold generator combines two LFSRs after a 1600-step
//! fast-forward: `x1` is fixed-seeded, `x2` is seeded with the 31-bit
//! initializer. Data bits are XORed with the sequence; the receiver
//! applies the same sequence to LLR signs.

const NC: usize = 1600;

/// First `len` Gold bits for the 31-bit initializer `c_init`.
pub fn gold_sequence(c_init: u32, len: usize) -> Vec<u8> {
    let total = NC + len;
    let mut x1 = vec![0u8; total + 31];
    let mut x2 = vec![0u8; total + 31];
    x1[0] = 1;
    for i in 0..31 {
        x2[i] = ((c_init >> i) & 1) as u8;
    }
    for i in 0..total {
        x1[i + 31] = x1[i + 3] ^ x1[i];
        x2[i + 31] = x2[i + 3] ^ x2[i + 2] ^ x2[i + 1] ^ x2[i];
    }
    (0..len).map(|i| x1[i + NC] ^ x2[i + NC]).collect()
}

/// XORs `bits` with the Gold sequence for `c_init`.
pub fn scramble_bits(bits: &[u8], c_init: u32) -> Vec<u8> {
    gold_sequence(c_init, bits.len())
        .iter()
        .zip(bits)
        .map(|(c, b)| c ^ b)
        .collect()
}

/// Descrambles soft values: flips the sign of each LLR whose
/// scrambling bit was one.
pub fn descramble_llrs(llrs: &[f64], c_init: u32) -> Vec<f64> {
    gold_sequence(c_init, llrs.len())
        .iter()
        .zip(llrs)
        .map(|(&c, &l)| if c == 1 { -l } else { l })
        .collect()
}
