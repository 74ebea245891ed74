//! Growth maximization under a loss-probability cap.
//!
//! Given a wager, a horizon of `n` bets and a loss functional `L`, choose the
//! fraction `f ∈ [0, 1)` that maximizes expected growth `E[G(f)]` subject to
//! `P[L(W(f), n) >= threshold] <= u`.
//!
//! The solver evaluates a uniform grid of fractions against one fixed set of
//! simulated outcome sequences (common random numbers). Per outcome sequence
//! both loss functionals are nondecreasing in `f`, and the sample mean of
//! `G(f)` is concave in `f`, so the feasible set is a prefix of the grid and
//! the solution moves monotonically with `u` and with the threshold.
//!
//! Horizons stand in for the asymptotic problem: a long horizon (the CLI
//! default is 10^4 bets) approximates `n → ∞`.

use rayon::prelude::*;
use serde::Serialize;

use crate::betmath::{fraction_grid, BetSpec};
use crate::error::{Error, Result};
use crate::wealthsim::{draw_outcomes, Estimate, LossTracker};

/// Minimum number of Monte Carlo paths accepted by [`solve`].
pub const MIN_PATHS: usize = 1000;

/// Largest fraction placed on the grid.
pub const DEFAULT_F_MAX: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Fall below the starting capital.
    WorstLoss,
    /// Fall from a previous high.
    Drawdown,
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "worst" | "worst_loss" | "worstloss" => Ok(Self::WorstLoss),
            "drawdown" | "dd" => Ok(Self::Drawdown),
            other => Err(Error::Parse(format!("unknown loss kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrationalProblem {
    pub bet: BetSpec,
    pub n_steps: usize,
    pub loss_kind: LossKind,
    /// Loss level in nats that counts as a violation.
    pub loss_threshold: f64,
    /// Cap `u` on the violation probability.
    pub max_prob: f64,
}

impl GrationalProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.loss_threshold > 0.0) {
            return Err(Error::InfeasibleThreshold(self.loss_threshold));
        }
        if !(0.0..=1.0).contains(&self.max_prob) {
            return Err(Error::domain("max_prob", self.max_prob, "0 <= u <= 1"));
        }
        if self.n_steps == 0 {
            return Err(Error::domain("n_steps", 0.0, "n_steps >= 1"));
        }
        Ok(())
    }
}

/// Monte Carlo budget shared by every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McBudget {
    pub n_paths: usize,
    pub root_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub f: f64,
    pub growth: Estimate,
    pub violation: Estimate,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrationalSolution {
    pub f_star: f64,
    pub expected_growth: Estimate,
    pub violation_prob: Estimate,
    pub feasible: bool,
    pub grid: Vec<GridPoint>,
}

impl GrationalSolution {
    /// Writes the grid as CSV:
    /// `f,e_growth,se_growth,p_violation,se_violation,feasible`.
    pub fn write_grid_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::fmt::sig;
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record([
            "f",
            "e_growth",
            "se_growth",
            "p_violation",
            "se_violation",
            "feasible",
        ])?;
        for pt in &self.grid {
            wtr.write_record([
                sig(pt.f),
                sig(pt.growth.mean),
                sig(pt.growth.se),
                sig(pt.violation.mean),
                sig(pt.violation.se),
                pt.feasible.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Outcome sequences shared across fractions, stored as win counts at each
/// step so the per-fraction replay is a pair of multiply-adds.
struct Scenarios {
    /// `wins[k][s]` = wins among the first `s` bets of path `k`.
    wins: Vec<Vec<u32>>,
    n_steps: usize,
}

impl Scenarios {
    fn draw(bet: &BetSpec, n_steps: usize, budget: &McBudget) -> Self {
        let wins = (0..budget.n_paths)
            .into_par_iter()
            .map(|k| {
                let outcomes = draw_outcomes(bet, n_steps, budget.root_seed, k as u64);
                let mut acc = Vec::with_capacity(n_steps + 1);
                let mut w = 0u32;
                acc.push(0);
                for won in outcomes {
                    w += won as u32;
                    acc.push(w);
                }
                acc
            })
            .collect();
        Self { wins, n_steps }
    }

    /// Growth estimate and violation estimate at fraction `f`.
    fn evaluate(
        &self,
        bet: &BetSpec,
        f: f64,
        kind: LossKind,
        threshold: f64,
    ) -> (Estimate, Estimate) {
        let (win, loss) = bet.log_increments(f);
        let n = self.n_steps;
        let per_path: Vec<(f64, bool)> = self
            .wins
            .par_iter()
            .map(|wins| {
                let total = wins[n] as f64;
                let growth = if f == 0.0 {
                    0.0
                } else {
                    (total * win + (n as f64 - total) * loss) / n as f64
                };
                if f == 0.0 {
                    return (growth, false);
                }
                let mut tracker = LossTracker::new(0.0);
                for (s, &w) in wins.iter().enumerate().skip(1) {
                    let w = w as f64;
                    tracker.push(w * win + (s as f64 - w) * loss);
                }
                let level = match kind {
                    LossKind::WorstLoss => tracker.worst_loss(),
                    LossKind::Drawdown => tracker.drawdown(),
                };
                (growth, level >= threshold)
            })
            .collect();
        let growths: Vec<f64> = per_path.iter().map(|p| p.0).collect();
        let hits = per_path.iter().filter(|p| p.1).count();
        (
            Estimate::from_samples(&growths),
            Estimate::proportion(hits, per_path.len()),
        )
    }
}

/// Monte Carlo estimate of `P[L(W(f), n) >= threshold]`.
///
/// Uses the same path streams as [`solve`], so estimates for different `f`
/// under one budget are directly comparable.
pub fn violation_probability(
    bet: &BetSpec,
    f: f64,
    n_steps: usize,
    loss_kind: LossKind,
    loss_threshold: f64,
    budget: &McBudget,
) -> Result<Estimate> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::domain("f", f, "0 <= f < 1"));
    }
    if n_steps == 0 {
        return Err(Error::domain("n_steps", 0.0, "n_steps >= 1"));
    }
    if budget.n_paths == 0 {
        return Err(Error::BudgetTooSmall { got: 0, min: 1 });
    }
    if !(loss_threshold > 0.0) {
        return Err(Error::InfeasibleThreshold(loss_threshold));
    }
    let scenarios = Scenarios::draw(bet, n_steps, budget);
    Ok(scenarios.evaluate(bet, f, loss_kind, loss_threshold).1)
}

/// Grid-search solution of the constrained growth problem.
///
/// Evaluates `f ∈ {0, grid_step, ...} ∩ [0, f_max]` and returns the feasible
/// point with the largest estimated growth. Feasibility compares the point
/// estimate to `u`; the standard errors are reported alongside. `f = 0` never
/// loses, so the solution is always feasible for a positive threshold.
pub fn solve(
    problem: &GrationalProblem,
    budget: &McBudget,
    grid_step: f64,
) -> Result<GrationalSolution> {
    solve_with_max(problem, budget, grid_step, DEFAULT_F_MAX)
}

/// [`solve`] with an explicit upper end for the grid.
pub fn solve_with_max(
    problem: &GrationalProblem,
    budget: &McBudget,
    grid_step: f64,
    f_max: f64,
) -> Result<GrationalSolution> {
    problem.validate()?;
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::domain(
            "grid_step",
            grid_step,
            "0 < grid_step <= 0.1",
        ));
    }
    if budget.n_paths < MIN_PATHS {
        return Err(Error::BudgetTooSmall {
            got: budget.n_paths,
            min: MIN_PATHS,
        });
    }
    let f_max = f_max.min(DEFAULT_F_MAX);
    if !(f_max >= 0.0) {
        return Err(Error::domain("f_max", f_max, "0 <= f_max"));
    }

    let scenarios = Scenarios::draw(&problem.bet, problem.n_steps, budget);
    let grid: Vec<GridPoint> = fraction_grid(grid_step, f_max)?
        .into_iter()
        .map(|f| {
            let (growth, violation) =
                scenarios.evaluate(&problem.bet, f, problem.loss_kind, problem.loss_threshold);
            GridPoint {
                f,
                growth,
                violation,
                feasible: violation.mean <= problem.max_prob,
            }
        })
        .collect();

    let best =
        grid.iter()
            .filter(|pt| pt.feasible)
            .fold(None::<&GridPoint>, |best, pt| match best {
                Some(b) if b.growth.mean >= pt.growth.mean => Some(b),
                _ => Some(pt),
            });

    Ok(match best {
        Some(pt) => GrationalSolution {
            f_star: pt.f,
            expected_growth: pt.growth,
            violation_prob: pt.violation,
            feasible: true,
            grid,
        },
        None => GrationalSolution {
            f_star: 0.0,
            expected_growth: Estimate { mean: 0.0, se: 0.0 },
            violation_prob: Estimate { mean: 0.0, se: 0.0 },
            feasible: false,
            grid,
        },
    })
}
