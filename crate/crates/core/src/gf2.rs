//! Dense GF(2) matrices packed 64 columns per word.
//!
//! Used to precompute the encoder's core parity solve: the 4Z x 4Z core
//! block is inverted once per code with Gauss-Jordan elimination and the
//! product with the systematic part is cached as a dense bit matrix, so
//! each encode is a row-wise AND + popcount-parity pass.

use crate::{Error, Result};

/// Row-major bit matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        let w = self.data[r * self.words_per_row + c / 64];
        (w >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (a, b) = (src * self.words_per_row, dst * self.words_per_row);
        for w in 0..self.words_per_row {
            let v = self.data[a + w];
            self.data[b + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.data
                .swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }

    /// Gauss-Jordan inverse. Errors if the matrix is singular.
    pub fn inverse(&self) -> Result<BitMatrix> {
        assert_eq!(self.rows, self.cols, "inverse requires a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col))
                .ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Ok(inv)
    }

    /// `self * rhs` over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in GF(2) multiply");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c_word in 0..self.words_per_row {
                let mut w = self.data[r * self.words_per_row + c_word];
                while w != 0 {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    let k = c_word * 64 + bit;
                    let src = k * rhs.words_per_row;
                    let dst = r * out.words_per_row;
                    for i in 0..rhs.words_per_row {
                        out.data[dst + i] ^= rhs.data[src + i];
                    }
                }
            }
        }
        out
    }

    /// `self * v` over GF(2) for a 0/1 vector.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in GF(2) mat-vec");
        let mut packed = vec![0u64; self.words_per_row];
        for (i, &b) in v.iter().enumerate() {
            if b != 0 {
                packed[i / 64] |= 1 << (i % 64);
            }
        }
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut acc = 0u64;
                for (a, b) in row.iter().zip(&packed) {
                    acc ^= a & b;
                }
                (acc.count_ones() & 1) as u8
            })
            .collect()
    }
}
