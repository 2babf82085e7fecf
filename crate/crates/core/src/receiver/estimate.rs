//! Channel and SNR estimation on the pilot lattice.
//!
//! Least-squares pilot division, moving-average SNR estimation, MMSE
//! frequency-domain denoising against a uniform delay profile, and
//! spline interpolation from the pilot lattice to the full grid.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use ndarray::Array2;

use crate::receiver::spline::CubicSpline;
use crate::waveform::dmrs::{dmrs_sequence, pilot_subcarrier};
use crate::waveform::ofdm::{signed_bin, CP_SHORT, N_FFT, N_SC, SYMBOLS_PER_SLOT};
use crate::waveform::Allocation;
use crate::{Error, Result, C64};

/// Which frequency estimator produced a channel estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    Ls,
    Mmse,
}

/// Moving-average window of the SNR estimator, in pilots.
pub const SNR_WINDOW: usize = 7;
/// Lower SNR clamp.
pub const RHO_MIN_DB: f64 = -10.0;
/// Upper SNR clamp, also the saturation value.
pub const RHO_MAX_DB: f64 = 40.0;
/// Delay span of the uniform-profile MMSE smoother, in samples.
pub const DELAY_SPAN: usize = CP_SHORT;

/// Raw channel estimates on the pilot lattice, one comb per receive
/// antenna, port and DMRS symbol.
#[derive(Clone, Debug)]
pub struct PilotEstimate {
    n_rx: usize,
    n_ports: usize,
    dmrs_symbols: Vec<usize>,
    /// combs[rx * n_ports + port][s], each `comb_len` long.
    combs: Vec<Vec<Vec<C64>>>,
}

impl PilotEstimate {
    /// Wraps per-comb estimates; every comb must have the same length.
    pub fn new(
        n_rx: usize,
        n_ports: usize,
        dmrs_symbols: Vec<usize>,
        combs: Vec<Vec<Vec<C64>>>,
    ) -> Result<Self> {
        if n_rx == 0 || n_ports == 0 || dmrs_symbols.is_empty() {
            return Err(Error::InvalidArgument(
                "pilot estimate needs antennas, ports and pilot symbols".into(),
            ));
        }
        if combs.len() != n_rx * n_ports {
            return Err(Error::LengthMismatch {
                expected: n_rx * n_ports,
                actual: combs.len(),
            });
        }
        let len = combs
            .first()
            .and_then(|c| c.first())
            .map(|v| v.len())
            .unwrap_or(0);
        if len == 0 {
            return Err(Error::InvalidArgument("empty pilot comb".into()));
        }
        for per_pair in &combs {
            if per_pair.len() != dmrs_symbols.len() {
                return Err(Error::LengthMismatch {
                    expected: dmrs_symbols.len(),
                    actual: per_pair.len(),
                });
            }
            if per_pair.iter().any(|v| v.len() != len) {
                return Err(Error::InvalidArgument(
                    "pilot combs differ in length".into(),
                ));
            }
        }
        Ok(PilotEstimate {
            n_rx,
            n_ports,
            dmrs_symbols,
            combs,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn dmrs_symbols(&self) -> &[usize] {
        &self.dmrs_symbols
    }

    /// Pilots per comb.
    pub fn comb_len(&self) -> usize {
        self.combs[0][0].len()
    }

    /// The estimate over `port`'s comb at `rx`, DMRS symbol index `s`.
    pub fn comb(&self, rx: usize, port: usize, s: usize) -> &[C64] {
        &self.combs[rx * self.n_ports + port][s]
    }

    /// Applies a comb-to-comb transform, e.g. an MMSE smoother.
    pub fn map_combs(&self, mut f: impl FnMut(&[C64]) -> Vec<C64>) -> Result<Self> {
        let len = self.comb_len();
        let mut combs = Vec::with_capacity(self.combs.len());
        for per_pair in &self.combs {
            let mut mapped = Vec::with_capacity(per_pair.len());
            for comb in per_pair {
                let out = f(comb);
                if out.len() != len {
                    return Err(Error::LengthMismatch {
                        expected: len,
                        actual: out.len(),
                    });
                }
                mapped.push(out);
            }
            combs.push(mapped);
        }
        Ok(PilotEstimate {
            n_rx: self.n_rx,
            n_ports: self.n_ports,
            dmrs_symbols: self.dmrs_symbols.clone(),
            combs,
        })
    }
}

/// Least-squares estimates at every pilot: the received value times the
/// conjugate pilot, exact for the unit-modulus DMRS.
pub fn estimate_ls(
    grids: &[Array2<C64>],
    n_ports: usize,
    alloc: &Allocation,
    slot: usize,
    n_id: u32,
) -> Result<PilotEstimate> {
    if grids.is_empty() {
        return Err(Error::InvalidArgument("no receive grids".into()));
    }
    if !(1..=2).contains(&n_ports) {
        return Err(Error::InvalidArgument(format!(
            "{n_ports} ports unsupported"
        )));
    }
    for g in grids {
        if g.dim() != (N_SC, SYMBOLS_PER_SLOT) {
            return Err(Error::InvalidArgument("grid has the wrong shape".into()));
        }
    }
    let n_rx = grids.len();
    let mut combs = vec![Vec::with_capacity(alloc.dmrs_symbols.len()); n_rx * n_ports];
    for &l in &alloc.dmrs_symbols {
        let r = dmrs_sequence(slot, l, n_id, N_SC / 2);
        for (rx, grid) in grids.iter().enumerate() {
            for port in 0..n_ports {
                let comb: Vec<C64> = (0..N_SC / 2)
                    .map(|m| grid[(pilot_subcarrier(port, m), l)] * r[m].conj())
                    .collect();
                combs[rx * n_ports + port].push(comb);
            }
        }
    }
    PilotEstimate::new(n_rx, n_ports, alloc.dmrs_symbols.clone(), combs)
}

/// SNR estimated from pilot smoothness, per (rx, port) and pooled.
#[derive(Clone, Debug)]
pub struct SnrEstimate {
    n_rx: usize,
    n_ports: usize,
    /// De-biased linear ratio per (rx, port), rx-major, unclamped.
    pub per_pair: Vec<f64>,
    /// Pair average clamped to the supported range, linear.
    pub linear: f64,
    /// A comb was noise-free to working precision.
    pub saturated: bool,
}

impl SnrEstimate {
    /// A uniform known SNR, e.g. genie-aided.
    pub fn uniform(n_rx: usize, n_ports: usize, rho_linear: f64) -> Self {
        SnrEstimate {
            n_rx,
            n_ports,
            per_pair: vec![rho_linear; n_rx * n_ports],
            linear: rho_linear,
            saturated: false,
        }
    }

    pub fn pair(&self, rx: usize, port: usize) -> f64 {
        self.per_pair[rx * self.n_ports + port]
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn db(&self) -> f64 {
        10.0 * self.linear.log10()
    }
}

fn moving_average(v: &[C64], w: usize) -> Vec<C64> {
    let half = w / 2;
    (0..v.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(v.len());
            let sum: C64 = v[lo..hi].iter().sum();
            sum / (hi - lo) as f64
        })
        .collect()
}

/// Splits each pilot comb into a smooth part and a residual and reads
/// the SNR off their power ratio, de-biased for the smoother's noise
/// leakage and clamped to [`RHO_MIN_DB`, `RHO_MAX_DB`].
pub fn estimate_snr(ls: &PilotEstimate) -> Result<SnrEstimate> {
    if ls.comb_len() < SNR_WINDOW {
        return Err(Error::TooFewPilots(ls.comb_len()));
    }
    let rho_max = 10f64.powf(RHO_MAX_DB / 10.0);
    let rho_min = 10f64.powf(RHO_MIN_DB / 10.0);
    let w = SNR_WINDOW as f64;
    let mut per_pair = Vec::with_capacity(ls.n_rx() * ls.n_ports());
    let mut saturated = false;
    for rx in 0..ls.n_rx() {
        for port in 0..ls.n_ports() {
            let mut num = 0.0;
            let mut den = 0.0;
            for s in 0..ls.dmrs_symbols().len() {
                let comb = ls.comb(rx, port, s);
                let smooth = moving_average(comb, SNR_WINDOW);
                for (c, m) in comb.iter().zip(&smooth) {
                    num += m.norm_sqr();
                    den += (c - m).norm_sqr();
                }
            }
            if den == 0.0 {
                saturated = true;
                per_pair.push(rho_max);
            } else {
                // On a flat channel the smoother keeps 1/W of the noise
                // and the residual carries the remaining (W-1)/W, which
                // this inversion removes exactly.
                per_pair.push((num / den) * (w - 1.0) / w - 1.0 / w);
            }
        }
    }
    let mean = per_pair.iter().sum::<f64>() / per_pair.len() as f64;
    Ok(SnrEstimate {
        n_rx: ls.n_rx(),
        n_ports: ls.n_ports(),
        per_pair,
        linear: mean.clamp(rho_min, rho_max),
        saturated,
    })
}

/// Frequency-domain MMSE smoother for pilot combs, matched to a uniform
/// power delay profile spanning the short cyclic prefix.
///
/// The smoother works in the delay basis: with steering matrix G the
/// filter G(GᴴG + ρ̂⁻¹I)⁻¹Gᴴ equals the covariance form R(R + ρ̂⁻¹I)⁻¹
/// for R = GGᴴ, but factors a 144-point system instead of a 636-point
/// one. The comb offset only rotates G's columns, so one smoother
/// serves both ports.
pub struct MmseDenoiser {
    g: DMatrix<C64>,
    gh: DMatrix<C64>,
    ghg: DMatrix<C64>,
}

impl MmseDenoiser {
    pub fn new() -> Self {
        let rows = N_SC / 2;
        let scale = 1.0 / (DELAY_SPAN as f64).sqrt();
        let g = DMatrix::from_fn(rows, DELAY_SPAN, |m, d| {
            let bin = signed_bin(2 * m) as f64;
            C64::from_polar(
                scale,
                -2.0 * std::f64::consts::PI * bin * d as f64 / N_FFT as f64,
            )
        });
        let gh = g.adjoint();
        let ghg = &gh * &g;
        MmseDenoiser { g, gh, ghg }
    }

    /// Factors the filter for one SNR; reuse it across every comb of
    /// the slot.
    pub fn filter(&self, rho_linear: f64) -> Result<MmseFilter<'_>> {
        if !(rho_linear.is_finite() && rho_linear > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "SNR {rho_linear} outside (0, inf)"
            )));
        }
        let mut a = self.ghg.clone();
        for i in 0..DELAY_SPAN {
            a[(i, i)] += C64::new(1.0 / rho_linear, 0.0);
        }
        let chol = Cholesky::new(a).ok_or(Error::SingularMatrix)?;
        Ok(MmseFilter { den: self, chol })
    }
}

impl Default for MmseDenoiser {
    fn default() -> Self {
        Self::new()
    }
}

/// A factored uniform-profile MMSE filter at one SNR.
pub struct MmseFilter<'a> {
    den: &'a MmseDenoiser,
    chol: Cholesky<C64, Dyn>,
}

impl MmseFilter<'_> {
    /// Smooths one pilot comb.
    pub fn apply(&self, comb: &[C64]) -> Vec<C64> {
        assert_eq!(comb.len(), self.den.g.nrows(), "comb length");
        let v = DVector::from_column_slice(comb);
        let u = &self.den.gh * v;
        let w = self.chol.solve(&u);
        let out = &self.den.g * w;
        out.as_slice().to_vec()
    }
}

/// Dense MMSE denoising against an explicit channel autocovariance:
/// returns Rhh(Rhh + ρ̂⁻¹I)⁻¹ · ls.
pub fn mmse_denoise(ls: &[C64], rho_linear: f64, rhh: &DMatrix<C64>) -> Result<Vec<C64>> {
    if rhh.nrows() != rhh.ncols() || rhh.nrows() != ls.len() {
        return Err(Error::LengthMismatch {
            expected: ls.len(),
            actual: rhh.nrows(),
        });
    }
    if !(rho_linear.is_finite() && rho_linear > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SNR {rho_linear} outside (0, inf)"
        )));
    }
    let n = rhh.nrows();
    for i in 0..n {
        for j in i..n {
            if (rhh[(i, j)] - rhh[(j, i)].conj()).norm() > 1e-9 {
                return Err(Error::NotHermitian);
            }
        }
    }
    let mut a = rhh.clone();
    for i in 0..n {
        a[(i, i)] += C64::new(1.0 / rho_linear, 0.0);
    }
    let chol = Cholesky::new(a).ok_or(Error::SingularMatrix)?;
    let y = chol.solve(&DVector::from_column_slice(ls));
    let out = rhh * y;
    Ok(out.as_slice().to_vec())
}

/// A channel estimate covering the full resource grid per (rx, port).
#[derive(Clone, Debug)]
pub struct ChannelEstimate {
    n_rx: usize,
    n_ports: usize,
    /// grids[rx * n_ports + port], each N_SC x SYMBOLS_PER_SLOT.
    grids: Vec<Array2<C64>>,
    pub kind: EstimatorKind,
    /// Too few pilots for a spline; linear interpolation was used.
    pub linear_fallback: bool,
}

impl ChannelEstimate {
    /// Wraps externally computed grids, e.g. genie-aided truth.
    pub fn from_grids(
        grids: Vec<Array2<C64>>,
        n_rx: usize,
        n_ports: usize,
        kind: EstimatorKind,
    ) -> Result<Self> {
        if grids.len() != n_rx * n_ports {
            return Err(Error::LengthMismatch {
                expected: n_rx * n_ports,
                actual: grids.len(),
            });
        }
        if grids.iter().any(|g| g.dim() != (N_SC, SYMBOLS_PER_SLOT)) {
            return Err(Error::InvalidArgument(
                "estimate grid has the wrong shape".into(),
            ));
        }
        Ok(ChannelEstimate {
            n_rx,
            n_ports,
            grids,
            kind,
            linear_fallback: false,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn at(&self, rx: usize, port: usize, k: usize, l: usize) -> C64 {
        self.grids[rx * self.n_ports + port][(k, l)]
    }

    pub fn grid(&self, rx: usize, port: usize) -> &Array2<C64> {
        &self.grids[rx * self.n_ports + port]
    }
}

fn linear_eval(xs: &[f64], ys: &[C64], x: f64) -> C64 {
    if xs.len() == 1 {
        return ys[0];
    }
    let i = match xs.partition_point(|&k| k <= x) {
        0 => 0,
        p => (p - 1).min(xs.len() - 2),
    };
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

/// Expands a pilot-lattice estimate to every resource element: natural
/// cubic spline across frequency, linear across time between DMRS
/// symbols with constant extension outside them. Fewer than four pilots
/// per comb fall back to linear interpolation with a flag.
pub fn interpolate_estimate(
    pilots: &PilotEstimate,
    kind: EstimatorKind,
) -> Result<ChannelEstimate> {
    let fallback = pilots.comb_len() < 4;
    let ds = pilots.dmrs_symbols();
    let mut grids = Vec::with_capacity(pilots.n_rx() * pilots.n_ports());
    for rx in 0..pilots.n_rx() {
        for port in 0..pilots.n_ports() {
            let xs: Vec<f64> = (0..pilots.comb_len())
                .map(|m| pilot_subcarrier(port, m) as f64)
                .collect();
            let mut cols: Vec<Vec<C64>> = Vec::with_capacity(ds.len());
            for s in 0..ds.len() {
                let ys = pilots.comb(rx, port, s);
                let col: Vec<C64> = if fallback {
                    (0..N_SC).map(|k| linear_eval(&xs, ys, k as f64)).collect()
                } else {
                    let sp = CubicSpline::natural(&xs, ys)?;
                    (0..N_SC).map(|k| sp.eval(k as f64)).collect()
                };
                cols.push(col);
            }
            let mut grid = Array2::zeros((N_SC, SYMBOLS_PER_SLOT));
            for l in 0..SYMBOLS_PER_SLOT {
                let j = ds.partition_point(|&d| d < l);
                let (i0, i1, w) = if j == 0 {
                    (0, 0, 0.0)
                } else if j == ds.len() {
                    (ds.len() - 1, ds.len() - 1, 0.0)
                } else if ds[j] == l {
                    (j, j, 0.0)
                } else {
                    let w = (l - ds[j - 1]) as f64 / (ds[j] - ds[j - 1]) as f64;
                    (j - 1, j, w)
                };
                for k in 0..N_SC {
                    grid[(k, l)] = cols[i0][k] * (1.0 - w) + cols[i1][k] * w;
                }
            }
            grids.push(grid);
        }
    }
    let mut est = ChannelEstimate::from_grids(grids, pilots.n_rx(), pilots.n_ports(), kind)?;
    est.linear_fallback = fallback;
    Ok(est)
}
