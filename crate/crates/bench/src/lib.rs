//! Deterministic fixtures shared by the criterion benches, so measured
//! workloads are identical from run to run.

use nrsim_core::ldpc::{BaseGraphId, LdpcCode};
use nrsim_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// The code the decoder benches exercise: BG2 at its largest lifting.
pub fn bench_code() -> LdpcCode {
    LdpcCode::from_bundled(BaseGraphId::Bg2, 384).unwrap()
}

/// A random codeword observed through BPSK over AWGN at `snr_db`,
/// returned as channel LLRs.
pub fn noisy_llrs(code: &LdpcCode, snr_db: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2)).collect();
    let cw = code.encode(&info).unwrap();
    let sigma2 = 10f64.powf(-snr_db / 10.0);
    cw.iter()
        .map(|&b| {
            let x = 1.0 - 2.0 * f64::from(b);
            let n: f64 = rng.sample(StandardNormal);
            2.0 * (x + n * sigma2.sqrt()) / sigma2
        })
        .collect()
}

/// Unit-variance complex Gaussian samples.
pub fn random_symbols(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) / 2f64.sqrt()
        })
        .collect()
}

/// A random bit vector.
pub fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..2)).collect()
}
