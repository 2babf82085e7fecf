//! Tapped-delay-line power profiles.
//!
//! A profile lists taps as (delay, mean power). Profiles ship as CSV
//! assets with a checksum sidecar; [`TdlProfile::tdla30`] loads the
//! bundled 30 ns delay-spread profile.

use crate::ldpc::base_graph::hex_digest;
use crate::{Error, Result};

/// One multipath component: excess delay and mean power.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TdlTap {
    pub delay_s: f64,
    pub power_db: f64,
}

/// A named tapped-delay-line profile, delays sorted ascending.
#[derive(Clone, Debug)]
pub struct TdlProfile {
    name: String,
    taps: Vec<TdlTap>,
}

impl TdlProfile {
    /// Parses a `delay_ns,power_db` CSV after verifying its checksum
    /// against the sidecar content.
    pub fn from_asset(name: &str, csv: &str, sha256_sidecar: &str) -> Result<Self> {
        let expected = sha256_sidecar
            .split_whitespace()
            .next()
            .ok_or_else(|| Error::MalformedAsset {
                name: name.into(),
                reason: "empty checksum sidecar".into(),
            })?
            .to_ascii_lowercase();
        let actual = hex_digest(csv.as_bytes());
        if actual != expected {
            return Err(Error::ChecksumMismatch {
                name: name.into(),
                expected,
                actual,
            });
        }

        let mut taps = Vec::new();
        for (ln, line) in csv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let bad = |reason: String| Error::MalformedAsset {
                name: name.into(),
                reason,
            };
            let delay_ns: f64 = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| bad(format!("line {}: bad delay", ln + 1)))?;
            let power_db: f64 = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| bad(format!("line {}: bad power", ln + 1)))?;
            if fields.next().is_some() {
                return Err(bad(format!("line {}: extra fields", ln + 1)));
            }
            taps.push(TdlTap {
                delay_s: delay_ns * 1e-9,
                power_db,
            });
        }
        Self::new(name, taps)
    }

    /// Builds a profile from explicit taps, enforcing sorted
    /// non-negative delays.
    pub fn new(name: &str, taps: Vec<TdlTap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument("profile has no taps".into()));
        }
        for pair in taps.windows(2) {
            if pair[1].delay_s < pair[0].delay_s {
                return Err(Error::InvalidArgument("tap delays not sorted".into()));
            }
        }
        if taps[0].delay_s < 0.0 {
            return Err(Error::InvalidArgument("negative tap delay".into()));
        }
        Ok(Self {
            name: name.into(),
            taps,
        })
    }

    /// The bundled TDLA30 profile (TS 38.104 Annex G tap table).
    pub fn tdla30() -> Self {
        Self::from_asset(
            "tdla30",
            include_str!("../../data/channel/tdla30.csv"),
            include_str!("../../data/channel/tdla30.csv.sha256"),
        )
        .expect("bundled profile is valid")
    }

    /// A single tap at zero delay and 0 dB: a flat Rayleigh channel.
    pub fn flat() -> Self {
        Self::new(
            "flat",
            vec![TdlTap {
                delay_s: 0.0,
                power_db: 0.0,
            }],
        )
        .expect("static profile is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn taps(&self) -> &[TdlTap] {
        &self.taps
    }

    /// Linear tap powers scaled to sum to exactly 1.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self
            .taps
            .iter()
            .map(|t| 10f64.powf(t.power_db / 10.0))
            .collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    /// Tap delays rounded to the nearest sample at rate `fs`.
    pub fn delays_samples(&self, fs: f64) -> Vec<usize> {
        self.taps
            .iter()
            .map(|t| (t.delay_s * fs).round() as usize)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::FS;

    #[test]
    fn bundled_tdla30_matches_the_annex_table() {
        let p = TdlProfile::tdla30();
        assert_eq!(p.name(), "tdla30");
        assert_eq!(p.taps().len(), 12);
        assert_eq!(p.taps()[0].power_db, -15.5);
        assert_eq!(p.taps()[1].power_db, 0.0);
        assert!((p.taps()[11].delay_s - 290e-9).abs() < 1e-15);
    }

    #[test]
    fn powers_normalize_to_unit_sum() {
        let p = TdlProfile::tdla30();
        let powers = p.normalized_powers();
        let total: f64 = powers.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((powers[0] - 0.013080061245511886).abs() < 1e-12);
        assert!((powers[1] - 0.4640980861902815).abs() < 1e-12);
    }

    #[test]
    fn delays_quantize_to_working_rate_samples() {
        let p = TdlProfile::tdla30();
        assert_eq!(
            p.delays_samples(FS),
            vec![0, 1, 1, 1, 2, 3, 4, 5, 6, 8, 9, 18]
        );
    }

    #[test]
    fn corrupted_asset_is_rejected() {
        let err = TdlProfile::from_asset(
            "x",
            "0,-1.0\n10,0.0\n",
            "51875f467753945916a0c7581d8b646e4a5a50fd9443d609b0a9bbd323dc49df x",
        )
        .unwrap_err();
        assert!(matches!(err, Error::ChecksumMismatch { .. }));
    }

    #[test]
    fn unsorted_or_empty_taps_are_rejected() {
        assert!(TdlProfile::new("x", vec![]).is_err());
        let unsorted = vec![
            TdlTap {
                delay_s: 1e-8,
                power_db: 0.0,
            },
            TdlTap {
                delay_s: 0.0,
                power_db: 0.0,
            },
        ];
        assert!(TdlProfile::new("x", unsorted).is_err());
    }
}
