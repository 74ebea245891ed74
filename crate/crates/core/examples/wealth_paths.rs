//! Simulated wealth paths at several fractions of Kelly, plus the adaptive
//! plug-in bettor that has to learn `p` as it goes.
//!
//! ```bash
//! cargo run -p safm --example wealth_paths
//! cargo run -p safm --example wealth_paths -- paths.csv   # also write paths
//! ```

use safm::betmath::{self, BetSpec};
use safm::fmt::sig;
use safm::wealthsim::{self, SimConfig, SimSummary};

fn main() -> safm::Result<()> {
    let bet = BetSpec::even(0.6)?;
    let kelly = betmath::kelly_fraction(&bet);
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>6}",
        "xKelly", "growth", "theory", "worst", "drawdown", "ruin"
    );
    for mult in [0.25, 0.5, 1.0, 1.5, 2.0, 2.5] {
        let f = mult * kelly;
        let cfg = SimConfig::new(bet, f, 1000, 2000, 42)?;
        let summary = SimSummary::from_stats(&wealthsim::simulate_path_stats(&cfg)?);
        println!(
            "{mult:>6} {:>10.5} {:>10.5} {:>10.3} {:>10.3} {:>6}",
            summary.growth.mean,
            betmath::asymptotic_growth(&bet, f)?,
            summary.worst_loss.mean,
            summary.drawdown.mean,
            summary.ruined
        );
    }

    println!(
        "\nall-in ruin after 10 bets: {}",
        sig(wealthsim::ruin_probability_all_in(&bet, 10)?)
    );
    println!(
        "adaptive bettor growth over 10^4 bets: {} (Kelly {})",
        sig(wealthsim::adaptive_policy_growth(&bet, 10_000, 42)?),
        sig(betmath::asymptotic_growth(&bet, kelly)?)
    );

    if let Some(path) = std::env::args().nth(1) {
        let cfg = SimConfig::new(bet, kelly, 250, 10, 42)?;
        let file = std::fs::File::create(&path)?;
        wealthsim::write_paths_csv(&wealthsim::simulate_paths(&cfg)?, file)?;
        println!("wrote {path}");
    }
    Ok(())
}
