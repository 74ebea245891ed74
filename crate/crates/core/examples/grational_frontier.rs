//! The growth-optimal fraction once a cap is placed on the chance of a large
//! drawdown, traced across caps and loss levels.
//!
//! ```bash
//! cargo run --release -p safm --example grational_frontier
//! ```

use safm::betmath::{self, BetSpec};
use safm::fmt::sig;
use safm::grational::{self, GrationalProblem, LossKind, McBudget};

fn main() -> safm::Result<()> {
    let bet = BetSpec::even(0.6)?;
    let budget = McBudget {
        n_paths: 2000,
        root_seed: 7,
    };
    println!("Kelly fraction {}", sig(betmath::kelly_fraction(&bet)));
    println!(
        "\n{:>9} {:>6} {:>8} {:>10} {:>10}",
        "loss", "cap", "f_star", "growth", "P[loss]"
    );
    for kind in [LossKind::WorstLoss, LossKind::Drawdown] {
        for u in [0.01, 0.05, 0.1, 0.25, 1.0] {
            let problem = GrationalProblem {
                bet,
                n_steps: 1000,
                loss_kind: kind,
                loss_threshold: 1.0,
                max_prob: u,
            };
            let sol = grational::solve(&problem, &budget, 0.01)?;
            println!(
                "{:>9} {u:>6} {:>8.2} {:>10.5} {:>10.4}",
                format!("{kind:?}"),
                sol.f_star,
                sol.expected_growth.mean,
                sol.violation_prob.mean
            );
        }
    }
    Ok(())
}
