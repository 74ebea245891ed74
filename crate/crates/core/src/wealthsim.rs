//! Fixed-fraction wealth processes.
//!
//! Wealth evolves as `W_k = W_{k-1}·(1 + d·f)` on a win and
//! `W_k = W_{k-1}·(1 − f)` on a loss. Paths are stored in log space. Path
//! `k` of a simulation draws from [`rng::stream(root_seed, k)`](crate::rng::stream),
//! so it is reproducible on its own and independent of thread count.
//!
//! Two loss functionals are provided, both in nats:
//!
//! - [`worst_loss`]: `ln W_0 − min_s ln W_s`, the largest fall below the
//!   starting capital.
//! - [`drawdown`]: `max_s (max_{u<=s} ln W_u − ln W_s)`, the largest fall
//!   from any previous high.
//!
//! Since the running peak is never below `W_0`, `drawdown >= worst_loss >= 0`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::betmath::BetSpec;
use crate::error::{Error, Result};
use crate::rng::{self, ns};

/// Wealth below `RUIN_FLOOR × W_0` marks a path as ruined.
pub const RUIN_FLOOR: f64 = 1e-9;

/// Largest fraction the adaptive policy will bet.
pub const ADAPTIVE_MAX_FRACTION: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub bet: BetSpec,
    pub f: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub root_seed: u64,
    pub w0: f64,
}

impl SimConfig {
    pub fn new(
        bet: BetSpec,
        f: f64,
        n_steps: usize,
        n_paths: usize,
        root_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            bet,
            f,
            n_steps,
            n_paths,
            root_seed,
            w0: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial_wealth(mut self, w0: f64) -> Result<Self> {
        self.w0 = w0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.f) {
            return Err(Error::domain("f", self.f, "0 <= f < 1"));
        }
        if self.n_steps == 0 {
            return Err(Error::domain("n_steps", 0.0, "n_steps >= 1"));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths", 0.0, "n_paths >= 1"));
        }
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(Error::domain("w0", self.w0, "w0 > 0"));
        }
        Ok(())
    }
}

/// One realized wealth trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthPath {
    /// `n_steps + 1` values starting at `ln W_0`.
    pub log_wealth: Vec<f64>,
    /// `true` for a win at each step.
    pub outcomes: Vec<bool>,
}

impl WealthPath {
    /// Replays `outcomes` from `ln w0` at fraction `f`.
    pub fn from_outcomes(bet: &BetSpec, f: f64, w0: f64, outcomes: Vec<bool>) -> Self {
        let (win, loss) = bet.log_increments(f);
        let mut log_wealth = Vec::with_capacity(outcomes.len() + 1);
        let mut lw = w0.ln();
        log_wealth.push(lw);
        for &won in &outcomes {
            lw += if won { win } else { loss };
            log_wealth.push(lw);
        }
        Self {
            log_wealth,
            outcomes,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.log_wealth.len() - 1
    }

    pub fn growth_rate(&self) -> f64 {
        growth_rate(&self.log_wealth)
    }

    pub fn worst_loss(&self) -> f64 {
        worst_loss(&self.log_wealth)
    }

    pub fn drawdown(&self) -> f64 {
        drawdown(&self.log_wealth)
    }

    pub fn stats(&self) -> PathStats {
        PathStats::from_log_wealth(&self.log_wealth)
    }
}

/// Summary functionals of a single path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStats {
    pub growth_rate: f64,
    pub worst_loss: f64,
    pub drawdown: f64,
    pub ruined: bool,
}

impl PathStats {
    pub fn from_log_wealth(log_wealth: &[f64]) -> Self {
        let mut acc = LossTracker::new(log_wealth[0]);
        for &lw in &log_wealth[1..] {
            acc.push(lw);
        }
        acc.finish(log_wealth.len() - 1)
    }
}

/// Single-pass accumulator for the path functionals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LossTracker {
    start: f64,
    last: f64,
    min: f64,
    peak: f64,
    drawdown: f64,
}

impl LossTracker {
    pub(crate) fn new(start: f64) -> Self {
        Self {
            start,
            last: start,
            min: start,
            peak: start,
            drawdown: 0.0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, lw: f64) {
        self.last = lw;
        if lw < self.min {
            self.min = lw;
        }
        if lw > self.peak {
            self.peak = lw;
        } else if self.peak - lw > self.drawdown {
            self.drawdown = self.peak - lw;
        }
    }

    pub(crate) fn worst_loss(&self) -> f64 {
        self.start - self.min
    }

    pub(crate) fn drawdown(&self) -> f64 {
        self.drawdown
    }

    pub(crate) fn finish(self, n_steps: usize) -> PathStats {
        PathStats {
            growth_rate: if n_steps == 0 {
                0.0
            } else {
                (self.last - self.start) / n_steps as f64
            },
            worst_loss: self.worst_loss(),
            drawdown: self.drawdown,
            ruined: self.min < self.start + RUIN_FLOOR.ln(),
        }
    }
}

/// `(ln W_n − ln W_0) / n`.
pub fn growth_rate(log_wealth: &[f64]) -> f64 {
    let n = log_wealth.len().saturating_sub(1);
    if n == 0 {
        return 0.0;
    }
    (log_wealth[n] - log_wealth[0]) / n as f64
}

/// `ln W_0 − min_s ln W_s`; zero for an empty path.
pub fn worst_loss(log_wealth: &[f64]) -> f64 {
    let Some(&start) = log_wealth.first() else {
        return 0.0;
    };
    let min = log_wealth.iter().copied().fold(start, f64::min);
    start - min
}

/// Largest decline from a running peak, in log space; zero for an empty path.
pub fn drawdown(log_wealth: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &lw in log_wealth {
        peak = peak.max(lw);
        worst = worst.max(peak - lw);
    }
    worst
}

/// Draws the win/loss sequence of path `path_index`.
pub fn draw_outcomes(bet: &BetSpec, n_steps: usize, root_seed: u64, path_index: u64) -> Vec<bool> {
    let mut rng = rng::stream(root_seed, path_index);
    let p = bet.p();
    (0..n_steps).map(|_| rng.random::<f64>() < p).collect()
}

/// Simulates path `path_index` of `config`.
pub fn simulate_path(config: &SimConfig, path_index: usize) -> WealthPath {
    let outcomes = draw_outcomes(
        &config.bet,
        config.n_steps,
        config.root_seed,
        path_index as u64,
    );
    WealthPath::from_outcomes(&config.bet, config.f, config.w0, outcomes)
}

/// Simulates all `n_paths` paths, ordered by path index.
pub fn simulate_paths(config: &SimConfig) -> Result<Vec<WealthPath>> {
    config.validate()?;
    Ok((0..config.n_paths)
        .into_par_iter()
        .map(|k| simulate_path(config, k))
        .collect())
}

/// Per-path statistics without materializing the paths.
pub fn simulate_path_stats(config: &SimConfig) -> Result<Vec<PathStats>> {
    config.validate()?;
    let (win, loss) = config.bet.log_increments(config.f);
    let p = config.bet.p();
    Ok((0..config.n_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(config.root_seed, k as u64);
            let mut acc = LossTracker::new(config.w0.ln());
            let mut lw = config.w0.ln();
            for _ in 0..config.n_steps {
                lw += if rng.random::<f64>() < p { win } else { loss };
                acc.push(lw);
            }
            acc.finish(config.n_steps)
        })
        .collect())
}

/// Mean and standard error of a sample, summed in index order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self { mean, se: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            se: (var / n as f64).sqrt(),
        }
    }

    /// Binomial proportion `hits / n` with standard error `sqrt(p(1-p)/n)`.
    pub fn proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            se: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

/// Aggregate of [`PathStats`] over a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSummary {
    pub growth: Estimate,
    pub worst_loss: Estimate,
    pub drawdown: Estimate,
    pub ruined: usize,
    pub n_paths: usize,
}

impl SimSummary {
    pub fn from_stats(stats: &[PathStats]) -> Self {
        let col = |g: fn(&PathStats) -> f64| stats.iter().map(g).collect::<Vec<_>>();
        Self {
            growth: Estimate::from_samples(&col(|s| s.growth_rate)),
            worst_loss: Estimate::from_samples(&col(|s| s.worst_loss)),
            drawdown: Estimate::from_samples(&col(|s| s.drawdown)),
            ruined: stats.iter().filter(|s| s.ruined).count(),
            n_paths: stats.len(),
        }
    }
}

/// Probability of ruin within `n` all-in bets: `1 − p^n`.
pub fn ruin_probability_all_in(bet: &BetSpec, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    Ok(1.0 - bet.p().powi(n as i32))
}

/// Realized growth of the plug-in policy that bets
/// `f_k = clamp(X̄_k − (1 − X̄_k)/d, 0, 0.999)` at step `k + 1`, where `X̄_k`
/// is the win frequency of the first `k` outcomes. Nothing is bet before the
/// first outcome is observed.
pub fn adaptive_policy_growth(bet: &BetSpec, n_steps: usize, root_seed: u64) -> Result<f64> {
    Ok(adaptive_policy_path(bet, n_steps, root_seed)?.growth_rate())
}

/// The full adaptive-policy path; see [`adaptive_policy_growth`].
pub fn adaptive_policy_path(bet: &BetSpec, n_steps: usize, root_seed: u64) -> Result<WealthPath> {
    if n_steps == 0 {
        return Err(Error::domain("n_steps", 0.0, "n_steps >= 1"));
    }
    let mut rng = rng::stream(root_seed, ns::ADAPTIVE);
    let (p, d) = (bet.p(), bet.d());
    let mut wins = 0usize;
    let mut lw = 0.0;
    let mut log_wealth = Vec::with_capacity(n_steps + 1);
    let mut outcomes = Vec::with_capacity(n_steps);
    log_wealth.push(lw);
    for k in 0..n_steps {
        let f = if k == 0 {
            0.0
        } else {
            let xbar = wins as f64 / k as f64;
            (xbar - (1.0 - xbar) / d).clamp(0.0, ADAPTIVE_MAX_FRACTION)
        };
        let won = rng.random::<f64>() < p;
        lw += if won { (d * f).ln_1p() } else { (-f).ln_1p() };
        wins += won as usize;
        log_wealth.push(lw);
        outcomes.push(won);
    }
    Ok(WealthPath {
        log_wealth,
        outcomes,
    })
}

/// Writes paths as CSV with columns `path_id,step,log_wealth,outcome`.
///
/// `outcome` is `1` for a win, `0` for a loss and empty at step 0.
pub fn write_paths_csv<W: Write>(paths: &[WealthPath], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["path_id", "step", "log_wealth", "outcome"])?;
    for (id, path) in paths.iter().enumerate() {
        for (step, &lw) in path.log_wealth.iter().enumerate() {
            let outcome = match step.checked_sub(1).map(|i| path.outcomes[i]) {
                None => "",
                Some(true) => "1",
                Some(false) => "0",
            };
            wtr.write_record([
                id.to_string(),
                step.to_string(),
                crate::fmt::sig(lw),
                outcome.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
