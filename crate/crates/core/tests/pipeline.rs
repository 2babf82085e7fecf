//! End-to-end invariants of the slot pipeline: impairment recovery,
//! metric consistency, and the early-stop estimator contract.

use nrsim_core::sim::{run_point, ChannelKind, SimConfig};

fn base() -> SimConfig {
    SimConfig {
        trials: 3,
        ..SimConfig::default()
    }
}

#[test]
fn sync_impairments_are_corrected_end_to_end() {
    let cfg = SimConfig {
        cfo_hz: 200.0,
        sto_samples: 20,
        trials: 2,
        ..base()
    };
    let report = run_point(&cfg, 30.0).unwrap();
    assert_eq!(report.block_errors, 0, "bler {}", report.bler);
    assert_eq!(report.ber_post, 0.0);
}

#[test]
fn coding_gain_shows_above_the_waterfall() {
    // -2 dB is decodable for the lowest MCS, yet the raw channel still
    // flips over 5% of bits: the decoder must close that gap entirely.
    let cfg = SimConfig {
        trials: 5,
        ..base()
    };
    let report = run_point(&cfg, -2.0).unwrap();
    assert!(report.ber_pre > 0.05, "ber_pre {}", report.ber_pre);
    assert_eq!(report.ber_post, 0.0);
    assert_eq!(report.bler, 0.0);
}

#[test]
fn total_block_failure_implies_residual_bit_errors() {
    let cfg = SimConfig {
        trials: 2,
        max_iters: 1,
        ..base()
    };
    let report = run_point(&cfg, -20.0).unwrap();
    assert_eq!(report.bler, 1.0);
    assert!(report.ber_post > 0.0);
    assert!(report.ber_post <= report.ber_pre);
}

#[test]
fn evm_decreases_with_snr_in_awgn() {
    let evm: Vec<f64> = [0.0, 10.0, 20.0, 30.0]
        .iter()
        .map(|&snr| run_point(&base(), snr).unwrap().evm_pct)
        .collect();
    for w in evm.windows(2) {
        assert!(w[1] < 0.9 * w[0], "evm did not drop: {evm:?}");
    }
}

#[test]
fn fading_evm_sits_above_awgn_evm_at_matched_snr() {
    // Estimation over a frequency-selective channel is harder than over
    // the identity channel, and the pinned per-slot SNR keeps the noise
    // contribution comparable.
    let awgn = run_point(&base(), 15.0).unwrap();
    let faded = run_point(
        &SimConfig {
            channel: ChannelKind::Tdla30,
            ..base()
        },
        15.0,
    )
    .unwrap();
    assert!(
        faded.evm_pct > awgn.evm_pct,
        "faded {} vs awgn {}",
        faded.evm_pct,
        awgn.evm_pct
    );
}

#[test]
fn early_stopping_matches_the_full_run_within_confidence() {
    // Both runs draw the same per-trial streams; the stopped run's
    // estimate must sit inside the binomial 95% interval around the
    // full run's estimate, so stopping early never biases the metric.
    let full_cfg = SimConfig {
        trials: 100,
        max_block_errors: 0,
        max_iters: 8,
        ..base()
    };
    let stop_cfg = SimConfig {
        max_block_errors: 10,
        ..full_cfg.clone()
    };
    for snr_db in [-7.0, -5.0] {
        let full = run_point(&full_cfg, snr_db).unwrap();
        let stop = run_point(&stop_cfg, snr_db).unwrap();
        assert!(stop.trials <= full.trials);
        let margin = 1.96 * (full.bler * (1.0 - full.bler) / stop.blocks as f64).sqrt();
        assert!(
            (stop.bler - full.bler).abs() <= margin + 1e-12,
            "{snr_db} dB: stopped {} vs full {} (margin {margin})",
            stop.bler,
            full.bler
        );
    }
}
