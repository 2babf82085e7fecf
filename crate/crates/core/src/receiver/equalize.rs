//! Linear MMSE equalization with bias removal.
//!
//! Each data resource element is equalized through the regularized
//! spatial inverse B = (I + ρ̂ 𝔊ᴴ𝔊)⁻¹. The biased MMSE output shrinks
//! the symbol by 1 - B_tt, so the estimate is rescaled and its residual
//! error variance read off the same diagonal: σ²_t = B_tt / (1 - B_tt),
//! the classic MMSE SINR identity covering noise and inter-layer
//! leakage alike. Variances are then averaged over each data symbol to
//! steady the demapper.

use ndarray::Array2;

use crate::receiver::estimate::ChannelEstimate;
use crate::waveform::ofdm::{N_SC, SYMBOLS_PER_SLOT};
use crate::waveform::Allocation;
use crate::{Error, Result, C64};

/// Variance assigned where a layer's channel column vanishes and no
/// symbol information survives equalization.
const DEAD_LAYER_VAR: f64 = 1e12;

/// Per-layer equalized data symbols with matching noise variances.
#[derive(Clone, Debug)]
pub struct EqualizedSymbols {
    /// Bias-normalized symbol estimates, data REs in grid order.
    pub symbols: Vec<Vec<C64>>,
    /// Post-equalization error variance per RE, averaged per symbol.
    pub noise_var: Vec<Vec<f64>>,
}

/// One resource element's equalization products, exposed for oracle
/// comparison; `biased` is the raw MMSE output before bias removal.
#[derive(Clone, Debug)]
pub struct ReEqualization {
    pub biased: Vec<C64>,
    pub bias: Vec<f64>,
    pub noise_var: Vec<f64>,
}

/// Core per-RE solve. `h` is column-major: h[t * n_rx + r] is layer t's
/// gain at antenna r. Writes the biased estimate and the diagonal of B.
fn mmse_re(
    h: &[C64],
    n_rx: usize,
    n_t: usize,
    y: &[C64],
    rho: f64,
    s: &mut [C64],
    bdiag: &mut [f64],
) {
    match n_t {
        1 => {
            let mut ghg = 0.0;
            let mut t = C64::new(0.0, 0.0);
            for r in 0..n_rx {
                ghg += h[r].norm_sqr();
                t += h[r].conj() * y[r];
            }
            let b = 1.0 / (1.0 + rho * ghg);
            s[0] = t * (rho * b);
            bdiag[0] = b;
        }
        2 => {
            let mut g00 = 0.0;
            let mut g11 = 0.0;
            let mut g01 = C64::new(0.0, 0.0);
            let mut t0 = C64::new(0.0, 0.0);
            let mut t1 = C64::new(0.0, 0.0);
            for r in 0..n_rx {
                let (h0, h1) = (h[r], h[n_rx + r]);
                g00 += h0.norm_sqr();
                g11 += h1.norm_sqr();
                g01 += h0.conj() * h1;
                t0 += h0.conj() * y[r];
                t1 += h1.conj() * y[r];
            }
            let a = 1.0 + rho * g00;
            let d = 1.0 + rho * g11;
            let c = g01 * rho;
            let det = a * d - c.norm_sqr();
            s[0] = (t0 * d - c * t1) * (rho / det);
            s[1] = (t1 * a - c.conj() * t0) * (rho / det);
            bdiag[0] = d / det;
            bdiag[1] = a / det;
        }
        _ => unreachable!("layer count validated upstream"),
    }
}

/// Equalizes one resource element and reports the raw MMSE output, its
/// bias factors and the normalized error variances.
pub fn equalize_re(h: &[Vec<C64>], y: &[C64], rho: f64) -> Result<ReEqualization> {
    let n_t = h.len();
    if !(1..=2).contains(&n_t) {
        return Err(Error::InvalidArgument(format!("{n_t} layers unsupported")));
    }
    if h.iter().any(|col| col.len() != y.len()) {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: h.iter().map(|c| c.len()).find(|&l| l != y.len()).unwrap(),
        });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SNR {rho} outside (0, inf)"
        )));
    }
    let n_rx = y.len();
    let mut flat = Vec::with_capacity(n_t * n_rx);
    for col in h {
        flat.extend_from_slice(col);
    }
    let mut s = vec![C64::new(0.0, 0.0); n_t];
    let mut bdiag = vec![0.0; n_t];
    mmse_re(&flat, n_rx, n_t, y, rho, &mut s, &mut bdiag);
    let bias: Vec<f64> = bdiag.iter().map(|b| 1.0 - b).collect();
    let noise_var: Vec<f64> = bdiag
        .iter()
        .zip(&bias)
        .map(|(&b, &beta)| {
            if beta > 1e-12 {
                b / beta
            } else {
                DEAD_LAYER_VAR
            }
        })
        .collect();
    Ok(ReEqualization {
        biased: s,
        bias,
        noise_var,
    })
}

/// Equalizes every data RE of the slot against a full-grid channel
/// estimate, returning bias-normalized symbols and symbol-averaged
/// noise variances per layer.
pub fn equalize_mmse(
    grids: &[Array2<C64>],
    est: &ChannelEstimate,
    rho: f64,
    alloc: &Allocation,
) -> Result<EqualizedSymbols> {
    if grids.len() != est.n_rx() {
        return Err(Error::LengthMismatch {
            expected: est.n_rx(),
            actual: grids.len(),
        });
    }
    if grids.iter().any(|g| g.dim() != (N_SC, SYMBOLS_PER_SLOT)) {
        return Err(Error::InvalidArgument("grid has the wrong shape".into()));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SNR {rho} outside (0, inf)"
        )));
    }
    let n_rx = grids.len();
    let n_t = est.n_ports();
    if !(1..=2).contains(&n_t) {
        return Err(Error::InvalidArgument(format!("{n_t} layers unsupported")));
    }
    let data_symbols = alloc.data_symbols();
    let per_layer = data_symbols.len() * N_SC;
    let mut symbols = vec![Vec::with_capacity(per_layer); n_t];
    let mut noise_var = vec![Vec::with_capacity(per_layer); n_t];
    let mut h = [C64::new(0.0, 0.0); 4];
    let mut y = [C64::new(0.0, 0.0); 2];
    let mut s = [C64::new(0.0, 0.0); 2];
    let mut bdiag = [0.0f64; 2];
    for &l in &data_symbols {
        let mut var_sum = [0.0f64; 2];
        for k in 0..N_SC {
            for r in 0..n_rx {
                y[r] = grids[r][(k, l)];
                for t in 0..n_t {
                    h[t * n_rx + r] = est.at(r, t, k, l);
                }
            }
            mmse_re(
                &h[..n_t * n_rx],
                n_rx,
                n_t,
                &y[..n_rx],
                rho,
                &mut s[..n_t],
                &mut bdiag[..n_t],
            );
            for t in 0..n_t {
                let beta = 1.0 - bdiag[t];
                let (z, var) = if beta > 1e-12 {
                    (s[t] / beta, bdiag[t] / beta)
                } else {
                    (C64::new(0.0, 0.0), DEAD_LAYER_VAR)
                };
                symbols[t].push(z);
                var_sum[t] += var;
            }
        }
        for t in 0..n_t {
            let mean = var_sum[t] / N_SC as f64;
            noise_var[t].extend(std::iter::repeat(mean).take(N_SC));
        }
    }
    Ok(EqualizedSymbols { symbols, noise_var })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::receiver::estimate::EstimatorKind;
    use nalgebra::DMatrix;

    #[test]
    fn unit_scalar_channel_halves_the_observation() {
        let y = C64::new(0.62, -0.31);
        let out = equalize_re(&[vec![C64::new(1.0, 0.0)]], &[y], 1.0).unwrap();
        assert!((out.biased[0] - y * 0.5).norm() < 1e-15);
        assert!((out.bias[0] - 0.5).abs() < 1e-15);
        assert!((out.noise_var[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_channel_at_high_snr_acts_as_a_matched_filter() {
        // Columns of a scaled rotation are orthogonal with unit norm.
        let h = vec![
            vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)],
            vec![C64::new(-0.8, 0.0), C64::new(0.6, 0.0)],
        ];
        let y = [C64::new(0.9, 0.4), C64::new(-0.2, 0.7)];
        let out = equalize_re(&h, &y, 1e9).unwrap();
        for t in 0..2 {
            let mf: C64 = (0..2).map(|r| h[t][r].conj() * y[r]).sum();
            let z = out.biased[t] / out.bias[t];
            assert!((z - mf).norm() < 1e-6, "layer {t}");
        }
    }

    #[test]
    fn matches_a_dense_solver_oracle() {
        let h = vec![
            vec![C64::new(0.7, -0.3), C64::new(-0.2, 0.5)],
            vec![C64::new(0.1, 0.9), C64::new(0.6, 0.2)],
        ];
        let y = [C64::new(0.25, -0.8), C64::new(-0.4, 0.15)];
        let rho = 3.7;
        let out = equalize_re(&h, &y, rho).unwrap();
        let g = DMatrix::from_fn(2, 2, |r, t| h[t][r]);
        let m = DMatrix::<C64>::identity(2, 2) + g.adjoint() * &g * C64::new(rho, 0.0);
        let inv = m.try_inverse().unwrap();
        let yv = nalgebra::DVector::from_column_slice(&y);
        let s = &inv * g.adjoint() * yv * C64::new(rho, 0.0);
        for t in 0..2 {
            assert!((out.biased[t] - s[t]).norm() < 1e-10, "layer {t}");
            assert!((out.bias[t] - (1.0 - inv[(t, t)].re)).abs() < 1e-10);
        }
    }

    #[test]
    fn dead_layer_reports_a_huge_variance() {
        let h = vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.5, 0.1), C64::new(-0.3, 0.4)],
        ];
        let y = [C64::new(0.2, 0.1), C64::new(0.3, -0.2)];
        let out = equalize_re(&h, &y, 10.0).unwrap();
        assert_eq!(out.biased[0], C64::new(0.0, 0.0));
        assert!(out.noise_var[0] >= 1e12);
        assert!(out.noise_var[1] < 1.0);
    }

    #[test]
    fn slot_equalizer_averages_variance_within_each_symbol() {
        let alloc = Allocation::default();
        let mut hgrid = Array2::from_elem((N_SC, SYMBOLS_PER_SLOT), C64::new(1.0, 0.0));
        for k in (1..N_SC).step_by(2) {
            for l in 0..SYMBOLS_PER_SLOT {
                hgrid[(k, l)] = C64::new(2.0, 0.0);
            }
        }
        let est =
            ChannelEstimate::from_grids(vec![hgrid.clone()], 1, 1, EstimatorKind::Ls).unwrap();
        let rho = 5.0;
        let ygrid = Array2::from_elem((N_SC, SYMBOLS_PER_SLOT), C64::new(0.3, 0.3));
        let eq = equalize_mmse(&[ygrid], &est, rho, &alloc).unwrap();
        let v_even = equalize_re(&[vec![C64::new(1.0, 0.0)]], &[C64::new(0.3, 0.3)], rho)
            .unwrap()
            .noise_var[0];
        let v_odd = equalize_re(&[vec![C64::new(2.0, 0.0)]], &[C64::new(0.3, 0.3)], rho)
            .unwrap()
            .noise_var[0];
        let expect = (v_even + v_odd) / 2.0;
        assert!(eq.noise_var[0].iter().all(|v| (v - expect).abs() < 1e-12));
        assert_eq!(eq.noise_var[0].len(), alloc.data_res_per_layer());
        assert_eq!(eq.symbols[0].len(), alloc.data_res_per_layer());
        // Symbols themselves stay per-RE: even and odd bins differ.
        assert!((eq.symbols[0][0] - eq.symbols[0][1]).norm() > 1e-3);
    }

    #[test]
    fn rejects_bad_snr_and_shapes() {
        let h = vec![vec![C64::new(1.0, 0.0)]];
        let y = [C64::new(1.0, 0.0)];
        assert!(equalize_re(&h, &y, 0.0).is_err());
        assert!(equalize_re(&h, &y, f64::INFINITY).is_err());
        let ragged = vec![vec![C64::new(1.0, 0.0); 2]];
        assert!(equalize_re(&ragged, &y, 1.0).is_err());
    }
}
