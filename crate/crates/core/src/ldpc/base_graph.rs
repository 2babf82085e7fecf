//! Base graph tables and their CSV asset loader.
//!
//! A base graph is a list of `(block row, block column, shift)` entries
//! plus its dimensions and the lifting-size table it supports. The two
//! bundled graphs follow the NR architecture: 46x68 with 22 systematic
//! block columns and 42x52 with 10, a dense four-row core whose parity
//! block is dual-diagonal (invertible for every lifting size), and one
//! identity extension column per additional row. Shift coefficients are
//! stored per lifting-size set; expansion reduces them modulo `Z`.

use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Lifting sizes grouped into the eight shift-coefficient sets.
pub const LIFTING_SETS: [&[usize]; 8] = [
    &[2, 4, 8, 16, 32, 64, 128, 256],
    &[3, 6, 12, 24, 48, 96, 192, 384],
    &[5, 10, 20, 40, 80, 160, 320],
    &[7, 14, 28, 56, 112, 224],
    &[9, 18, 36, 72, 144, 288],
    &[11, 22, 44, 88, 176, 352],
    &[13, 26, 52, 104, 208],
    &[15, 30, 60, 120, 240],
];

/// Index of the shift set containing `z`, if any.
pub fn lifting_set_index(z: usize) -> Option<usize> {
    LIFTING_SETS.iter().position(|set| set.contains(&z))
}

/// Identifier of a bundled base graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseGraphId {
    /// 46x68, 22 systematic block columns; for long blocks / high rates.
    Bg1,
    /// 42x52, 10 systematic block columns; for short blocks / low rates.
    Bg2,
}

impl BaseGraphId {
    pub fn dims(self) -> (usize, usize, usize) {
        match self {
            BaseGraphId::Bg1 => (46, 68, 22),
            BaseGraphId::Bg2 => (42, 52, 10),
        }
    }

    /// Info block length cap used by the segmentation rules.
    pub fn k_cb(self) -> usize {
        match self {
            BaseGraphId::Bg1 => 8448,
            BaseGraphId::Bg2 => 3840,
        }
    }
}

/// One non-null circulant position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BgEntry {
    pub row: u16,
    pub col: u16,
    pub shift: u16,
}

/// A base graph for one shift-coefficient set.
#[derive(Clone, Debug)]
pub struct BaseGraph {
    rows: usize,
    cols: usize,
    /// Systematic block columns (22 or 10 for the bundled graphs).
    kb: usize,
    /// Shift set this table belongs to; expansion accepts only its sizes.
    lifting: Vec<usize>,
    entries: Vec<BgEntry>,
}

impl BaseGraph {
    /// Builds a base graph from explicit entries, validating dimensions
    /// and rejecting duplicate positions.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        kb: usize,
        lifting: Vec<usize>,
        mut entries: Vec<BgEntry>,
    ) -> Result<Self> {
        // one parity column per check row: cols = kb + rows, with a 4-row core
        if cols != kb + rows || rows < 4 {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} with {kb} systematic columns"
            )));
        }
        entries.sort_by_key(|e| (e.row, e.col));
        for w in entries.windows(2) {
            if w[0].row == w[1].row && w[0].col == w[1].col {
                return Err(Error::DuplicateEntry {
                    row: w[0].row as usize,
                    col: w[0].col as usize,
                });
            }
        }
        for e in &entries {
            if e.row as usize >= rows || e.col as usize >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({}, {}) outside {rows}x{cols}",
                    e.row, e.col
                )));
            }
        }
        if lifting.is_empty() {
            return Err(Error::InvalidArgument("empty lifting table".into()));
        }
        Ok(BaseGraph {
            rows,
            cols,
            kb,
            lifting,
            entries,
        })
    }

    /// Parses one `i,j,V` CSV asset after verifying its sha256 sidecar.
    pub fn from_asset(
        id: BaseGraphId,
        set_index: usize,
        csv: &str,
        sha256_sidecar: &str,
    ) -> Result<Self> {
        let name = format!(
            "bg{}_s{set_index}",
            if id == BaseGraphId::Bg1 { 1 } else { 2 }
        );
        let expected = sha256_sidecar
            .split_whitespace()
            .next()
            .ok_or_else(|| Error::MalformedAsset {
                name: name.clone(),
                reason: "empty checksum sidecar".into(),
            })?
            .to_ascii_lowercase();
        let actual = hex_digest(csv.as_bytes());
        if actual != expected {
            return Err(Error::ChecksumMismatch {
                name,
                expected,
                actual,
            });
        }

        let (rows, cols, kb) = id.dims();
        let lifting = LIFTING_SETS
            .get(set_index)
            .ok_or_else(|| Error::InvalidArgument(format!("shift set {set_index}")))?;
        let mut entries = Vec::new();
        for (ln, line) in csv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<u16> {
                s.and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| Error::MalformedAsset {
                        name: name.clone(),
                        reason: format!("line {}: expected i,j,V", ln + 1),
                    })
            };
            entries.push(BgEntry {
                row: parse(it.next())?,
                col: parse(it.next())?,
                shift: parse(it.next())?,
            });
            if it.next().is_some() {
                return Err(Error::MalformedAsset {
                    name,
                    reason: format!("line {}: trailing fields", ln + 1),
                });
            }
        }
        let expected_entries = match id {
            BaseGraphId::Bg1 => 316,
            BaseGraphId::Bg2 => 197,
        };
        if entries.len() != expected_entries {
            return Err(Error::DimensionMismatch(format!(
                "expected {expected_entries} entries, asset has {}",
                entries.len()
            )));
        }
        Self::from_entries(rows, cols, kb, lifting.to_vec(), entries)
    }

    /// Loads the bundled table for the shift set containing `z`.
    pub fn bundled_for_z(id: BaseGraphId, z: usize) -> Result<Self> {
        let set = lifting_set_index(z).ok_or(Error::InvalidLiftingSize { z })?;
        Self::bundled(id, set)
    }

    /// Loads one bundled per-set table.
    pub fn bundled(id: BaseGraphId, set_index: usize) -> Result<Self> {
        let (csv, sidecar) = bundled_asset(id, set_index)
            .ok_or_else(|| Error::InvalidArgument(format!("shift set {set_index}")))?;
        Self::from_asset(id, set_index, csv, sidecar)
    }

    /// Checksum sidecar line (`<sha256 hex>  <file>`) of a bundled table.
    pub fn bundled_checksum(id: BaseGraphId, set_index: usize) -> Option<&'static str> {
        bundled_asset(id, set_index).map(|(_, sidecar)| sidecar.trim())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kb(&self) -> usize {
        self.kb
    }

    pub fn lifting(&self) -> &[usize] {
        &self.lifting
    }

    pub fn entries(&self) -> &[BgEntry] {
        &self.entries
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write;
        let _ = write!(s, "{b:02x}");
    }
    s
}

macro_rules! asset_pair {
    ($name:literal) => {
        (
            include_str!(concat!("../../data/ldpc/", $name, ".csv")),
            include_str!(concat!("../../data/ldpc/", $name, ".csv.sha256")),
        )
    };
}

fn bundled_asset(id: BaseGraphId, set_index: usize) -> Option<(&'static str, &'static str)> {
    const BG1: [(&str, &str); 8] = [
        asset_pair!("bg1_s0"),
        asset_pair!("bg1_s1"),
        asset_pair!("bg1_s2"),
        asset_pair!("bg1_s3"),
        asset_pair!("bg1_s4"),
        asset_pair!("bg1_s5"),
        asset_pair!("bg1_s6"),
        asset_pair!("bg1_s7"),
    ];
    const BG2: [(&str, &str); 8] = [
        asset_pair!("bg2_s0"),
        asset_pair!("bg2_s1"),
        asset_pair!("bg2_s2"),
        asset_pair!("bg2_s3"),
        asset_pair!("bg2_s4"),
        asset_pair!("bg2_s5"),
        asset_pair!("bg2_s6"),
        asset_pair!("bg2_s7"),
    ];
    let table = match id {
        BaseGraphId::Bg1 => &BG1,
        BaseGraphId::Bg2 => &BG2,
    };
    table.get(set_index).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_bg1_has_expected_dimensions() {
        for set in 0..8 {
            let bg = BaseGraph::bundled(BaseGraphId::Bg1, set).unwrap();
            assert_eq!((bg.rows(), bg.cols(), bg.kb()), (46, 68, 22));
            assert_eq!(bg.entries().len(), 316);
        }
    }

    #[test]
    fn bundled_bg2_has_expected_dimensions() {
        for set in 0..8 {
            let bg = BaseGraph::bundled(BaseGraphId::Bg2, set).unwrap();
            assert_eq!((bg.rows(), bg.cols(), bg.kb()), (42, 52, 10));
            assert_eq!(bg.entries().len(), 197);
        }
    }

    #[test]
    fn every_lifting_size_maps_to_exactly_one_set() {
        let mut all: Vec<usize> = LIFTING_SETS
            .iter()
            .flat_map(|s| s.iter().copied())
            .collect();
        all.sort_unstable();
        let n = all.len();
        all.dedup();
        assert_eq!(all.len(), n, "lifting sizes must not repeat across sets");
        assert_eq!(lifting_set_index(384), Some(1));
        assert_eq!(lifting_set_index(7), Some(3));
        assert_eq!(lifting_set_index(17), None);
    }

    #[test]
    fn truncated_asset_is_rejected_as_dimension_mismatch() {
        let (csv, _) = bundled_asset(BaseGraphId::Bg2, 0).unwrap();
        let truncated: String = csv.lines().take(100).collect::<Vec<_>>().join("\n");
        let digest = hex_digest(truncated.as_bytes());
        let err = BaseGraph::from_asset(BaseGraphId::Bg2, 0, &truncated, &digest).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
    }

    #[test]
    fn corrupted_asset_fails_the_checksum() {
        let (csv, sidecar) = bundled_asset(BaseGraphId::Bg1, 0).unwrap();
        let mut corrupted = csv.to_string();
        corrupted.push_str("0,0,0\n");
        let err = BaseGraph::from_asset(BaseGraphId::Bg1, 0, &corrupted, sidecar).unwrap_err();
        assert!(matches!(err, Error::ChecksumMismatch { .. }), "{err}");
    }

    #[test]
    fn duplicate_entries_are_rejected() {
        let entries = vec![
            BgEntry {
                row: 0,
                col: 0,
                shift: 1,
            },
            BgEntry {
                row: 0,
                col: 0,
                shift: 2,
            },
        ];
        let err = BaseGraph::from_entries(4, 8, 4, vec![2], entries).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { row: 0, col: 0 }));
    }
}
