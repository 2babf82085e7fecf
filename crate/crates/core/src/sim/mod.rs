//! Monte-Carlo experiment harness.
//!
//! Ties the transport, waveform, channel, and receiver layers into a
//! reproducible BLER/BER/EVM campaign: a flat-file configuration, the
//! evaluation MCS table, deterministic parallel trial execution, and
//! CSV/summary reporting.

mod config;
mod mcs;
mod report;
mod run;

pub use config::{parse_config, ChannelKind, SimConfig, CFO_LIMIT_HZ};
pub use mcs::{lookup_mcs, mcs_table, McsEntry};
pub use report::{emit_report, Asset, PointReport, SimReport, CSV_HEADER};
pub use run::{probe_estimate, run_point, run_sweep, SLOT_SECONDS};
