//! Cyclic redundancy checks over bit sequences.
//!
//! Parity is the remainder of `a(x) x^L` divided by the generator
//! polynomial, appended most-significant bit first, so a valid sequence
//! leaves a zero register when shifted through again.

/// A CRC generator: `poly` holds the coefficients below the leading term.
#[derive(Clone, Copy, Debug)]
pub struct Crc {
    poly: u32,
    width: usize,
}

/// Transport-block CRC, `0x864CFB`.
pub const CRC24A: Crc = Crc {
    poly: 0x86_4CFB,
    width: 24,
};
/// Per-code-block CRC, `0x800063`.
pub const CRC24B: Crc = Crc {
    poly: 0x80_0063,
    width: 24,
};
/// Short-block CRC, `0x1021`.
pub const CRC16: Crc = Crc {
    poly: 0x1021,
    width: 16,
};

impl Crc {
    pub fn width(&self) -> usize {
        self.width
    }

    /// Parity bits for `bits`, MSB first.
    pub fn parity(&self, bits: &[u8]) -> Vec<u8> {
        let mask = (1u32 << self.width) - 1;
        let mut reg = 0u32;
        for &b in bits {
            let fb = ((reg >> (self.width - 1)) as u8 ^ b) & 1;
            reg = (reg << 1) & mask;
            if fb == 1 {
                reg ^= self.poly;
            }
        }
        (0..self.width)
            .map(|i| ((reg >> (self.width - 1 - i)) & 1) as u8)
            .collect()
    }

    /// Appends the parity of `bits` in place.
    pub fn attach(&self, bits: &mut Vec<u8>) {
        let p = self.parity(bits);
        bits.extend_from_slice(&p);
    }

    /// True when `bits` ends in a parity consistent with its payload.
    pub fn check(&self, bits: &[u8]) -> bool {
        bits.len() >= self.width && self.parity(bits).iter().all(|&b| b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    fn hex(bits: &[u8]) -> u32 {
        bits.iter().fold(0, |v, &b| (v << 1) | b as u32)
    }

    #[test]
    fn single_one_bit_yields_the_generator_coefficients() {
        // x^L mod g(x) is g minus its leading term
        assert_eq!(hex(&CRC24A.parity(&[1])), 0x864CFB);
        assert_eq!(hex(&CRC24B.parity(&[1])), 0x800063);
        assert_eq!(hex(&CRC16.parity(&[1])), 0x1021);
    }

    #[test]
    fn forty_bit_message_matches_polynomial_division() {
        let m = bits("0011110100110011111000111011000100110110");
        assert_eq!(hex(&CRC24A.parity(&m)), 0x225AE2);
        assert_eq!(hex(&CRC24B.parity(&m)), 0xF8E5D4);
        assert_eq!(hex(&CRC16.parity(&m)), 0x1869);
    }

    #[test]
    fn zero_message_has_zero_parity() {
        assert!(CRC24A.parity(&[0; 100]).iter().all(|&b| b == 0));
    }

    #[test]
    fn attach_then_check_roundtrips_and_flags_any_single_flip() {
        let mut v = bits("1101001110001011");
        CRC16.attach(&mut v);
        assert_eq!(v.len(), 16 + 16);
        assert!(CRC16.check(&v));
        for i in 0..v.len() {
            v[i] ^= 1;
            assert!(!CRC16.check(&v), "flip at {i} went unnoticed");
            v[i] ^= 1;
        }
    }

    #[test]
    fn too_short_input_never_checks() {
        assert!(!CRC24A.check(&[0; 23]));
    }

    #[test]
    fn parity_is_linear_over_gf2() {
        let a = bits("10011100101001011100");
        let b = bits("01010111001110010001");
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        for crc in [CRC24A, CRC24B, CRC16] {
            let pa = crc.parity(&a);
            let pb = crc.parity(&b);
            let ps = crc.parity(&sum);
            let xor: Vec<u8> = pa.iter().zip(&pb).map(|(x, y)| x ^ y).collect();
            assert_eq!(ps, xor);
        }
    }
}
