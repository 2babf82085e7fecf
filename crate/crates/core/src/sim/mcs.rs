//! Evaluation MCS table: the five reference modulation-and-coding
//! schemes with their target rates and transport block sizes.

use crate::waveform::Modulation;
use crate::{Error, Result};

/// One row of the evaluation MCS table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McsEntry {
    pub index: u8,
    pub modulation: Modulation,
    /// Target code rate, information bits over coded bits.
    pub rate: f64,
    /// Transport block size in bits.
    pub tbs: usize,
}

const TABLE: [McsEntry; 5] = [
    McsEntry {
        index: 0,
        modulation: Modulation::Qpsk,
        rate: 0.117,
        tbs: 7176,
    },
    McsEntry {
        index: 5,
        modulation: Modulation::Qpsk,
        rate: 0.370,
        tbs: 22536,
    },
    McsEntry {
        index: 10,
        modulation: Modulation::Qam16,
        rate: 0.332,
        tbs: 40976,
    },
    McsEntry {
        index: 15,
        modulation: Modulation::Qam16,
        rate: 0.602,
        tbs: 73776,
    },
    McsEntry {
        index: 20,
        modulation: Modulation::Qam64,
        rate: 0.554,
        tbs: 102416,
    },
];

/// All table rows, in index order.
pub fn mcs_table() -> &'static [McsEntry] {
    &TABLE
}

/// Looks up an evaluation MCS by its index.
pub fn lookup_mcs(index: u8) -> Result<McsEntry> {
    TABLE
        .iter()
        .find(|e| e.index == index)
        .copied()
        .ok_or(Error::UnknownMcs(index))
}
