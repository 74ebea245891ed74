//! Kelly mathematics for a repeated biased-coin wager.
//!
//! A [`BetSpec`] wins with probability `p` and pays `d` per unit staked;
//! a loss forfeits the stake. Betting a fixed fraction `f` of wealth grows
//! capital at the asymptotic rate
//!
//! ```text
//! G(f) = p·ln(1 + d·f) + (1 − p)·ln(1 − f)
//! ```
//!
//! nats per bet. `G` is strictly concave on `[0, 1)`, maximized at the Kelly
//! fraction `f* = p − q/d`, and crosses zero again at the critical fraction
//! beyond which wealth decays to ruin.
//!
//! Some printed derivations carry a minus sign before the loss term. That
//! form contradicts the stated maximizer `p − q/d`; the loss term enters
//! with a plus sign here.

use serde::Serialize;

use crate::error::{Error, Result};

/// A biased-coin wager: win probability and odds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetSpec {
    p: f64,
    d: f64,
}

impl BetSpec {
    pub fn new(p: f64, d: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "0 <= p <= 1"));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain("d", d, "d > 0"));
        }
        Ok(Self { p, d })
    }

    /// Even-money bet (`d = 1`).
    pub fn even(p: f64) -> Result<Self> {
        Self::new(p, 1.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Expected gain per unit staked, `p·d − q`.
    pub fn edge(&self) -> f64 {
        self.p * self.d - self.q()
    }

    /// Per-bet log-wealth increments `(win, loss)` when betting `f`.
    pub fn log_increments(&self, f: f64) -> (f64, f64) {
        ((self.d * f).ln_1p(), (-f).ln_1p())
    }
}

/// Growth-rate samples over a grid of fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub fractions: Vec<f64>,
    pub rates: Vec<f64>,
}

impl GrowthCurve {
    /// Evaluates [`asymptotic_growth`] at each of `fractions`, which must be
    /// strictly increasing and lie in `[0, 1)`.
    pub fn evaluate(bet: &BetSpec, fractions: &[f64]) -> Result<Self> {
        if fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "growth-curve fractions must be strictly increasing".into(),
            ));
        }
        let rates = fractions
            .iter()
            .map(|&f| asymptotic_growth(bet, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            fractions: fractions.to_vec(),
            rates,
        })
    }

    /// Uniform grid `{0, step, 2·step, ...}` strictly below 1.
    pub fn on_grid(bet: &BetSpec, step: f64) -> Result<Self> {
        Self::evaluate(bet, &fraction_grid(step, 1.0 - 1e-12)?)
    }

    /// Fraction with the largest rate; first one wins ties.
    pub fn argmax(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for (&f, &g) in self.fractions.iter().zip(&self.rates) {
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((f, g));
            }
        }
        best.map(|(f, _)| f)
    }
}

/// `{0, step, 2·step, ...}` up to and including `max` (within rounding).
///
/// Points are computed as `i·step` rather than by accumulation so that the
/// same grid is reproduced exactly for every caller.
pub fn fraction_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain("grid_step", step, "grid_step > 0"));
    }
    let count = ((max / step) + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| i as f64 * step)
        .filter(|&f| f <= max)
        .collect())
}

/// Optimal fixed fraction `max(p − q/d, 0)`.
pub fn kelly_fraction(bet: &BetSpec) -> f64 {
    (bet.p - bet.q() / bet.d).max(0.0)
}

/// Asymptotic growth rate in nats per bet when betting fraction `f`.
pub fn asymptotic_growth(bet: &BetSpec, f: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::domain("f", f, "0 <= f < 1"));
    }
    let (win, loss) = bet.log_increments(f);
    // Avoid 0·(-inf)-style surprises when p is exactly 0 or 1.
    let mut g = 0.0;
    if bet.p > 0.0 {
        g += bet.p * win;
    }
    if bet.q() > 0.0 {
        g += bet.q() * loss;
    }
    Ok(g)
}

/// Derivative of [`asymptotic_growth`] with respect to `f`.
pub fn growth_slope(bet: &BetSpec, f: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::domain("f", f, "0 <= f < 1"));
    }
    Ok(bet.d * bet.p / (1.0 + bet.d * f) - bet.q() / (1.0 - f))
}

/// The fraction `f_c > f*` at which asymptotic growth returns to zero.
///
/// The root is bracketed in loss coordinates `y = −ln(1 − f)` and bisected
/// to full `f64` resolution in `y`. Working in `y` keeps the
/// bracket well conditioned when the root sits extremely close to 1 (large
/// edges). When the true root is closer to 1 than `f64` can resolve the
/// result rounds to `1.0`; a certain winner (`p = 1`) also reports `1.0`.
pub fn critical_fraction(bet: &BetSpec) -> Result<f64> {
    let kelly = kelly_fraction(bet);
    if kelly <= 0.0 {
        return Err(Error::NoPositiveRoot);
    }
    let (p, q, d) = (bet.p, bet.q(), bet.d);
    if q == 0.0 {
        return Ok(1.0);
    }
    // h(y) = G(f(y)) with f = 1 − e^{−y}; h > 0 just above Kelly, and
    // h(y) <= p·ln(1 + d) − q·y < 0 once y exceeds p·ln(1 + d)/q.
    let h = |y: f64| p * (d * -(-y).exp_m1()).ln_1p() - q * y;
    let to_f = |y: f64| -(-y).exp_m1();

    let mut lo = -(-kelly).ln_1p();
    let mut hi = p * d.ln_1p() / q + 1.0;
    debug_assert!(h(hi) < 0.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = if h(lo).abs() <= h(hi).abs() { lo } else { hi };
    Ok(to_f(y))
}

/// Kelly fraction when the win probability is itself random with mean
/// `p_mean`: bet as if the mean were the known probability.
pub fn stochastic_p_fraction(p_mean: f64, d: f64) -> Result<f64> {
    Ok(kelly_fraction(&BetSpec::new(p_mean, d)?))
}

/// Element-wise Kelly fractions for a sequence of `(p, d)` wagers; zero where
/// the edge is nonpositive.
pub fn mixed_sequence_fractions(bets: &[(f64, f64)]) -> Result<Vec<f64>> {
    bets.iter()
        .enumerate()
        .map(|(index, &(p, d))| {
            BetSpec::new(p, d)
                .map(|b| kelly_fraction(&b))
                .map_err(|e| Error::AtIndex {
                    index,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// `alpha × f*` for `alpha ∈ (0, 1]`.
pub fn fractional_kelly(bet: &BetSpec, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha", alpha, "0 < alpha <= 1"));
    }
    Ok(alpha * kelly_fraction(bet))
}
