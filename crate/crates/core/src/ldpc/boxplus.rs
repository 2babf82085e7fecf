//! Pairwise check-node combine for sum-product decoding.
//!
//! Two incoming log-likelihood ratios fold as
//!
//! ```text
//! chi(x1, x2) = sign(x1) sign(x2) min(|x1|, |x2|)
//!             + ln(1 + e^-|x1 + x2|) - ln(1 + e^-|x1 - x2|)
//! ```
//!
//! and longer checks apply the rule associatively. The correction term
//! `ln(1 + e^-x)` is evaluated either exactly or by a two-piece linear
//! fit; the fit's worst-case error is 0.0932, reached at `x = 0`.

/// `ln(1 + e^-x)` for `x >= 0`.
#[inline]
pub fn ln1p_exp_neg(x: f64) -> f64 {
    (-x).exp().ln_1p()
}

/// Two-piece linear fit of [`ln1p_exp_neg`]: `0.6 - 0.24 x` below 2.5,
/// zero above. The pieces meet continuously at 2.5.
#[inline]
pub fn ln1p_exp_neg_two_piece(x: f64) -> f64 {
    if x < 2.5 {
        0.6 - 0.24 * x
    } else {
        0.0
    }
}

/// Which correction term the check-node update evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckUpdate {
    /// Exact `ln(1 + e^-x)` correction.
    Exact,
    /// Two-piece linear fit, trading up to 0.0932 per term for speed.
    TwoPiece,
}

impl CheckUpdate {
    #[inline]
    pub(crate) fn correction(self, x: f64) -> f64 {
        match self {
            CheckUpdate::Exact => ln1p_exp_neg(x),
            CheckUpdate::TwoPiece => ln1p_exp_neg_two_piece(x),
        }
    }
}

/// Folds two LLR messages through one check node.
#[inline]
pub fn boxplus(x1: f64, x2: f64, update: CheckUpdate) -> f64 {
    let sign = if (x1 < 0.0) != (x2 < 0.0) { -1.0 } else { 1.0 };
    let mag = x1.abs().min(x2.abs());
    sign * mag + update.correction((x1 + x2).abs()) - update.correction((x1 - x2).abs())
}
