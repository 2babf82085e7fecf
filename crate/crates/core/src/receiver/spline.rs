//! Natural cubic spline over complex samples.
//!
//! The channel interpolator fits one spline per DMRS symbol across the
//! pilot comb and evaluates it on every subcarrier. Natural boundary
//! conditions (zero curvature at both ends) keep edge extrapolation
//! tame for the half-bin overhang past the last pilot.

use crate::{Error, Result, C64};

/// Natural cubic spline through complex values on increasing knots.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<C64>,
    /// Second derivatives at the knots, zero at both ends.
    m: Vec<C64>,
}

impl CubicSpline {
    /// Fits the spline; knots must be strictly increasing, at least two.
    pub fn natural(xs: &[f64], ys: &[C64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument(
                "spline needs at least two knots".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let mut m = vec![C64::new(0.0, 0.0); n];
        let k = n - 2;
        if k > 0 {
            // Tridiagonal system for the interior second derivatives,
            // solved with the Thomas algorithm; the boundary rows stay
            // zero by the natural end conditions.
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![C64::new(0.0, 0.0); k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0) * 6.0;
                if i > 0 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * upper[i - 1];
                    rhs[i] = rhs[i] - rhs[i - 1] * w;
                }
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - m[i + 2] * upper[i]) / diag[i];
            }
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    /// Evaluates the spline; outside the knot range the end segments
    /// extend as cubics.
    pub fn eval(&self, x: f64) -> C64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let w = h * h / 6.0;
        self.ys[i] * a
            + self.ys[i + 1] * b
            + self.m[i] * ((a * a * a - a) * w)
            + self.m[i + 1] * ((b * b * b - b) * w)
    }
}
