//! Lifted QC-LDPC code: circulant expansion, partition checks and the
//! systematic encoder.
//!
//! The parity-check matrix splits as
//!
//! ```text
//!     H = [ C  D  E ]      g = 4 Z rows (core)
//!         [ A  B  T ]      m - g rows (extension)
//! ```
//!
//! with `E = 0`, `T = I` and `D` non-singular. Parity is computed in two
//! steps: `p1 = (D^-1 C) s` with the dense GF(2) product precomputed at
//! construction, then `p2 = A s + B p1` row by row through the sparse
//! extension.

use crate::gf2::BitMatrix;
use crate::ldpc::base_graph::{BaseGraph, BaseGraphId, BgEntry};
use crate::{Error, Result};

/// Maximum expanded check-row degree the decoder supports.
pub(crate) const MAX_ROW_DEGREE: usize = 32;

/// A base graph expanded by a lifting size `Z`.
#[derive(Clone, Debug)]
pub struct LdpcCode {
    z: usize,
    kb: usize,
    block_rows: usize,
    block_cols: usize,
    /// expanded check adjacency, CSR over variable indices
    row_ptr: Vec<u32>,
    col_idx: Vec<u32>,
    /// dense `D^-1 C`, g x k
    dinv_c: BitMatrix,
    /// extension entries (rows >= 4, cols < kb + 4), for the p2 solve
    ext_entries: Vec<BgEntry>,
}

impl LdpcCode {
    /// Expands `bg` by lifting size `z`, validating the encoder partition.
    pub fn new(bg: &BaseGraph, z: usize) -> Result<Self> {
        if !bg.lifting().contains(&z) {
            return Err(Error::InvalidLiftingSize { z });
        }
        let (rows, cols, kb) = (bg.rows(), bg.cols(), bg.kb());

        // partition checks: E empty, T an identity, one parity column per
        // extension row, no extension column touched by the core
        let mut ext_diag = vec![0usize; rows.saturating_sub(4)];
        let mut ext_entries = Vec::new();
        for &e in bg.entries() {
            let (r, c) = (e.row as usize, e.col as usize);
            if c >= kb + 4 {
                if r < 4 {
                    return Err(Error::PartitionInvalid(format!(
                        "core row {r} touches extension column {c}"
                    )));
                }
                if c != kb + 4 + (r - 4) {
                    return Err(Error::PartitionInvalid(format!(
                        "extension row {r} touches foreign parity column {c}"
                    )));
                }
                if e.shift as usize % z != 0 {
                    return Err(Error::PartitionInvalid(format!(
                        "extension diagonal at row {r} has shift {}",
                        e.shift
                    )));
                }
                ext_diag[r - 4] += 1;
            } else if r >= 4 {
                ext_entries.push(e);
            }
        }
        if ext_diag.iter().any(|&n| n != 1) {
            return Err(Error::PartitionInvalid(
                "extension diagonal is not an identity".into(),
            ));
        }

        // expand the adjacency
        let mut rows_adj: Vec<Vec<u32>> = vec![Vec::new(); rows * z];
        for &e in bg.entries() {
            let (i, j, v) = (e.row as usize, e.col as usize, e.shift as usize % z);
            for k in 0..z {
                rows_adj[i * z + k].push((j * z + (k + v) % z) as u32);
            }
        }
        let mut row_ptr = Vec::with_capacity(rows * z + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0u32);
        for mut adj in rows_adj {
            adj.sort_unstable();
            if adj.len() > MAX_ROW_DEGREE {
                return Err(Error::PartitionInvalid(format!(
                    "check degree {} exceeds the supported maximum",
                    adj.len()
                )));
            }
            col_idx.extend_from_slice(&adj);
            row_ptr.push(col_idx.len() as u32);
        }

        // dense D over the core, then D^-1 C
        let g = 4 * z;
        let k = kb * z;
        let mut d = BitMatrix::zeros(g, g);
        let mut c = BitMatrix::zeros(g, k);
        for &e in bg.entries() {
            let (i, j, v) = (e.row as usize, e.col as usize, e.shift as usize % z);
            if i >= 4 {
                continue;
            }
            for kk in 0..z {
                let r = i * z + kk;
                let cc = (kk + v) % z;
                if j < kb {
                    c.set(r, j * z + cc, true);
                } else {
                    d.set(r, (j - kb) * z + cc, true);
                }
            }
        }
        let dinv = d.inverse()?;
        let dinv_c = dinv.mul(&c);

        Ok(LdpcCode {
            z,
            kb,
            block_rows: rows,
            block_cols: cols,
            row_ptr,
            col_idx,
            dinv_c,
            ext_entries,
        })
    }

    /// Builds the code from the bundled table covering `z`.
    pub fn from_bundled(id: BaseGraphId, z: usize) -> Result<Self> {
        let bg = BaseGraph::bundled_for_z(id, z)?;
        Self::new(&bg, z)
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Info length `kb * Z` (includes any filler the transport layer adds).
    pub fn k(&self) -> usize {
        self.kb * self.z
    }

    /// Codeword length `cols * Z`.
    pub fn n(&self) -> usize {
        self.block_cols * self.z
    }

    /// Check count `rows * Z`.
    pub fn m(&self) -> usize {
        self.block_rows * self.z
    }

    /// Core parity length `4 Z`.
    pub fn g(&self) -> usize {
        4 * self.z
    }

    pub(crate) fn row_ptr(&self) -> &[u32] {
        &self.row_ptr
    }

    pub(crate) fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    /// Dense core parity solve matrix, exposed for oracle tests.
    pub fn dinv_c(&self) -> &BitMatrix {
        &self.dinv_c
    }

    /// Systematic encode: returns `[s | p1 | p2]` of length `n`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info.len(),
            });
        }
        let z = self.z;
        let mut cw = Vec::with_capacity(self.n());
        cw.extend_from_slice(info);
        cw.extend(self.dinv_c.mul_vec(info)); // p1

        // p2 row by row: T = I makes each extension parity bit the XOR of
        // its row's systematic and core-parity contributions
        let p2_base = self.kb * z + 4 * z;
        cw.resize(self.n(), 0);
        for &e in &self.ext_entries {
            let (i, j, v) = (e.row as usize, e.col as usize, e.shift as usize % z);
            for kk in 0..z {
                let src = cw[j * z + (kk + v) % z];
                cw[p2_base + (i - 4) * z + kk] ^= src;
            }
        }
        Ok(cw)
    }

    /// True when `H d = 0` over GF(2).
    pub fn syndrome_ok(&self, codeword: &[u8]) -> bool {
        if codeword.len() != self.n() {
            return false;
        }
        for r in 0..self.m() {
            let mut acc = 0u8;
            for &v in &self.col_idx[self.row_ptr[r] as usize..self.row_ptr[r + 1] as usize] {
                acc ^= codeword[v as usize];
            }
            if acc != 0 {
                return false;
            }
        }
        true
    }
}

/// 4x8 test fixture: H = [J+I | I], the row-regular (8,4) code with
/// minimum distance 4. D = I, so D^-1 C = J+I.
#[cfg(test)]
pub(crate) fn toy_graph() -> BaseGraph {
    let mut entries = Vec::new();
    for r in 0..4u16 {
        for c in 0..4u16 {
            if r != c {
                entries.push(BgEntry {
                    row: r,
                    col: c,
                    shift: 0,
                });
            }
        }
        entries.push(BgEntry {
            row: r,
            col: 4 + r,
            shift: 0,
        });
    }
    BaseGraph::from_entries(4, 8, 4, vec![1], entries).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::base_graph::BgEntry;
    use rand::{Rng, SeedableRng};

    #[test]
    fn toy_partition_and_core_solve_match_hand_computation() {
        let code = LdpcCode::new(&toy_graph(), 1).unwrap();
        assert_eq!((code.k(), code.n(), code.g(), code.m()), (4, 8, 4, 4));
        // D = I, C = J+I: D^-1 C has ones everywhere off the diagonal
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(code.dinv_c().get(r, c), r != c);
            }
        }
    }

    #[test]
    fn toy_encode_matches_exhaustive_nullspace_enumeration() {
        let code = LdpcCode::new(&toy_graph(), 1).unwrap();
        let s = [1u8, 0, 1, 1];
        let cw = code.encode(&s).unwrap();
        // oracle: the unique H-nullspace member whose systematic part is s
        let mut matches = Vec::new();
        for cand in 0..256u16 {
            let d: Vec<u8> = (0..8).map(|i| ((cand >> i) & 1) as u8).collect();
            if code.syndrome_ok(&d) && d[..4] == s {
                matches.push(d);
            }
        }
        assert_eq!(matches.len(), 1, "systematic encoder must be unique");
        assert_eq!(cw, matches[0]);
    }

    #[test]
    fn all_zero_info_encodes_to_all_zero() {
        let code = LdpcCode::from_bundled(BaseGraphId::Bg2, 8).unwrap();
        let cw = code.encode(&vec![0; code.k()]).unwrap();
        assert!(cw.iter().all(|&b| b == 0));
    }

    #[test]
    fn bundled_expansion_dimensions() {
        let code = LdpcCode::from_bundled(BaseGraphId::Bg2, 2).unwrap();
        assert_eq!((code.g(), code.m(), code.n()), (8, 84, 104));
        let code = LdpcCode::from_bundled(BaseGraphId::Bg1, 384).unwrap();
        assert_eq!(
            (code.g(), code.m(), code.n(), code.k()),
            (1536, 17664, 26112, 8448)
        );
    }

    #[test]
    fn random_info_satisfies_parity_on_both_graphs() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for (id, z) in [
            (BaseGraphId::Bg1, 16),
            (BaseGraphId::Bg1, 48),
            (BaseGraphId::Bg2, 13),
            (BaseGraphId::Bg2, 52),
        ] {
            let code = LdpcCode::from_bundled(id, z).unwrap();
            for _ in 0..20 {
                let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
                let cw = code.encode(&info).unwrap();
                assert!(code.syndrome_ok(&cw), "{id:?} Z={z}");
                assert_eq!(&cw[..code.k()], &info[..], "encoder must be systematic");
            }
        }
    }

    #[test]
    fn encoder_is_linear() {
        let code = LdpcCode::from_bundled(BaseGraphId::Bg2, 16).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let a: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
        let b: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = code.encode(&a).unwrap();
        let cb = code.encode(&b).unwrap();
        let csum = code.encode(&sum).unwrap();
        let xor: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        assert_eq!(csum, xor);
    }

    #[test]
    fn foreign_lifting_size_is_rejected() {
        let bg = BaseGraph::bundled(BaseGraphId::Bg1, 0).unwrap();
        assert!(matches!(
            LdpcCode::new(&bg, 3),
            Err(Error::InvalidLiftingSize { z: 3 })
        ));
    }

    #[test]
    fn core_touching_extension_column_is_rejected() {
        let mut entries = vec![
            BgEntry {
                row: 0,
                col: 0,
                shift: 0,
            },
            BgEntry {
                row: 0,
                col: 5,
                shift: 0,
            }, // core row in extension column
        ];
        for r in 0..4u16 {
            entries.push(BgEntry {
                row: r,
                col: 1 + r,
                shift: 0,
            });
        }
        entries.push(BgEntry {
            row: 4,
            col: 0,
            shift: 0,
        });
        entries.push(BgEntry {
            row: 4,
            col: 5,
            shift: 0,
        });
        let bg = BaseGraph::from_entries(5, 6, 1, vec![1], entries).unwrap();
        assert!(matches!(
            LdpcCode::new(&bg, 1),
            Err(Error::PartitionInvalid(_))
        ));
    }
}
