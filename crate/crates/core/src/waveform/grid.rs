//! Slot resource mapping: symbol allocation, pilot placement and layer
//! handling.
//!
//! Data symbols fill every allocated symbol that carries no pilots,
//! subcarrier-first in time order. With two layers the modulated
//! symbol stream deals out round-robin, and each layer's pilots occupy
//! that port's comb while the other comb stays silent.

use ndarray::Array2;

use crate::waveform::dmrs::{dmrs_sequence, pilot_subcarrier};
use crate::waveform::ofdm::{N_SC, SYMBOLS_PER_SLOT};
use crate::{Error, Result, C64};

/// Which slot symbols a transmission occupies and which carry pilots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub start_symbol: usize,
    pub num_symbols: usize,
    pub dmrs_symbols: Vec<usize>,
}

impl Default for Allocation {
    fn default() -> Self {
        Allocation {
            start_symbol: 1,
            num_symbols: 13,
            dmrs_symbols: vec![2, 11],
        }
    }
}

impl Allocation {
    pub fn validate(&self) -> Result<()> {
        if self.num_symbols == 0 || self.start_symbol + self.num_symbols > SYMBOLS_PER_SLOT {
            return Err(Error::InvalidArgument(format!(
                "allocation start {} length {} leaves the slot",
                self.start_symbol, self.num_symbols
            )));
        }
        if self.dmrs_symbols.is_empty() {
            return Err(Error::InvalidArgument(
                "allocation carries no pilot symbol".into(),
            ));
        }
        let end = self.start_symbol + self.num_symbols;
        for w in self.dmrs_symbols.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(
                    "pilot symbols must be strictly increasing".into(),
                ));
            }
        }
        for &l in &self.dmrs_symbols {
            if l < self.start_symbol || l >= end {
                return Err(Error::InvalidArgument(format!(
                    "pilot symbol {l} outside the allocation"
                )));
            }
        }
        if self.dmrs_symbols.len() >= self.num_symbols {
            return Err(Error::InvalidArgument("no data symbols remain".into()));
        }
        Ok(())
    }

    /// Allocated symbols that carry data, in time order.
    pub fn data_symbols(&self) -> Vec<usize> {
        (self.start_symbol..self.start_symbol + self.num_symbols)
            .filter(|l| !self.dmrs_symbols.contains(l))
            .collect()
    }

    /// Data resource elements per layer.
    pub fn data_res_per_layer(&self) -> usize {
        self.data_symbols().len() * N_SC
    }
}

/// Deals the symbol stream out to layers round-robin.
pub fn layer_map(syms: &[C64], n_layers: usize) -> Result<Vec<Vec<C64>>> {
    if n_layers == 0 || syms.len() % n_layers != 0 {
        return Err(Error::InvalidArgument(format!(
            "{} symbols do not split over {n_layers} layers",
            syms.len()
        )));
    }
    let mut layers = vec![Vec::with_capacity(syms.len() / n_layers); n_layers];
    for (i, &s) in syms.iter().enumerate() {
        layers[i % n_layers].push(s);
    }
    Ok(layers)
}

/// Inverse of [`layer_map`] on per-layer LLR streams: reassembles the
/// coded-bit order, `q_m` bits per symbol.
pub fn layer_demap_llrs(per_layer: &[Vec<f64>], q_m: usize) -> Result<Vec<f64>> {
    let n = per_layer.len();
    if n == 0 || q_m == 0 {
        return Err(Error::InvalidArgument("nothing to demap".into()));
    }
    let per = per_layer[0].len();
    if per_layer.iter().any(|l| l.len() != per) || per % q_m != 0 {
        return Err(Error::InvalidArgument(
            "layer LLR streams must have equal whole-symbol lengths".into(),
        ));
    }
    let mut out = Vec::with_capacity(per * n);
    for i in 0..per / q_m * n {
        let (layer, idx) = (i % n, i / n);
        out.extend_from_slice(&per_layer[layer][idx * q_m..(idx + 1) * q_m]);
    }
    Ok(out)
}

/// Builds one grid per layer: data on the allocation's data symbols,
/// pilots on the layer's comb of each pilot symbol.
pub fn build_grids(
    data: &[Vec<C64>],
    alloc: &Allocation,
    slot: usize,
    n_id: u32,
) -> Result<Vec<Array2<C64>>> {
    alloc.validate()?;
    let want = alloc.data_res_per_layer();
    let mut grids = Vec::with_capacity(data.len());
    for (port, layer_data) in data.iter().enumerate() {
        if layer_data.len() != want {
            return Err(Error::LengthMismatch {
                expected: want,
                actual: layer_data.len(),
            });
        }
        let mut grid = Array2::default((N_SC, SYMBOLS_PER_SLOT));
        let mut at = 0;
        for &l in &alloc.data_symbols() {
            for k in 0..N_SC {
                grid[(k, l)] = layer_data[at];
                at += 1;
            }
        }
        for &l in &alloc.dmrs_symbols {
            let pilots = dmrs_sequence(slot, l, n_id, N_SC / 2);
            for (m, &p) in pilots.iter().enumerate() {
                grid[(pilot_subcarrier(port, m), l)] = p;
            }
        }
        grids.push(grid);
    }
    Ok(grids)
}

/// Reads the data resource elements back in mapping order.
pub fn extract_data(grid: &Array2<C64>, alloc: &Allocation) -> Vec<C64> {
    let mut out = Vec::with_capacity(alloc.data_res_per_layer());
    for &l in &alloc.data_symbols() {
        for k in 0..N_SC {
            out.push(grid[(k, l)]);
        }
    }
    out
}

/// Reads the pilot resource elements of `port`'s comb on `symbol`.
pub fn extract_pilots(grid: &Array2<C64>, port: usize, symbol: usize) -> Vec<C64> {
    (0..N_SC / 2)
        .map(|m| grid[(pilot_subcarrier(port, m), symbol)])
        .collect()
}
