//! The `ldpc selftest` subcommand: a fast health check that encodes and
//! decodes random blocks on both base graphs across the lifting-size
//! range, and bounds the two-piece check-update approximation error.

use std::error::Error;
use std::time::Instant;

use nrsim_core::ldpc::{
    decode, ln1p_exp_neg, ln1p_exp_neg_two_piece, BaseGraphId, CheckUpdate, LdpcCode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// One size from each lifting set, smallest to largest.
const LIFTS: [usize; 5] = [8, 36, 64, 160, 384];
const TRIPS: usize = 10;
const MAX_TWO_PIECE_DEV: f64 = 0.094;

pub fn run() -> Result<(), Box<dyn Error>> {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5e1f);
    for id in [BaseGraphId::Bg1, BaseGraphId::Bg2] {
        for &z in &LIFTS {
            roundtrip(id, z, &mut rng)?;
        }
    }
    two_piece_bound()?;
    println!("ok: selftest passed in {:.2?}", start.elapsed());
    Ok(())
}

fn name(id: BaseGraphId) -> &'static str {
    match id {
        BaseGraphId::Bg1 => "BG1",
        BaseGraphId::Bg2 => "BG2",
    }
}

fn roundtrip(id: BaseGraphId, z: usize, rng: &mut ChaCha12Rng) -> Result<(), Box<dyn Error>> {
    let code = LdpcCode::from_bundled(id, z)?;
    for trip in 0..TRIPS {
        let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2)).collect();
        let cw = code.encode(&info)?;
        if !code.syndrome_ok(&cw) {
            return Err(format!("{} z={z} trip {trip}: parity violated", name(id)).into());
        }
        let llrs: Vec<f64> = cw
            .iter()
            .map(|&b| if b == 0 { 10.0 } else { -10.0 })
            .collect();
        let out = decode(&code, &llrs, 20, CheckUpdate::TwoPiece)?;
        if !out.converged || out.info_bits != info {
            return Err(format!("{} z={z} trip {trip}: decode mismatch", name(id)).into());
        }
    }
    println!("ok: {} z={z} ({TRIPS} round-trips)", name(id));
    Ok(())
}

/// Scans `ln(1 + e^-x)` against its two-piece linear surrogate on a fine
/// grid and enforces the documented worst-case deviation.
fn two_piece_bound() -> Result<(), Box<dyn Error>> {
    let mut worst: f64 = 0.0;
    let mut x = 0.0;
    while x <= 25.0 {
        worst = worst.max((ln1p_exp_neg(x) - ln1p_exp_neg_two_piece(x)).abs());
        x += 1e-4;
    }
    if worst > MAX_TWO_PIECE_DEV {
        return Err(format!("two-piece deviation {worst} exceeds {MAX_TWO_PIECE_DEV}").into());
    }
    println!("ok: two-piece check update within {MAX_TWO_PIECE_DEV} (max dev {worst:.4})");
    Ok(())
}
