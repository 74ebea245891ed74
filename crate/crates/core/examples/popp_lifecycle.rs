//! Strategy lifecycle phases: the sign table, the transition graph and
//! Kelly sizing by phase.
//!
//! ```bash
//! cargo run -p safm --example popp_lifecycle
//! ```

use safm::betmath::BetSpec;
use safm::fmt::sig;
use safm::popp::{self, SizingSchedule, StateVars};

fn main() -> safm::Result<()> {
    println!("{:<14} {}", "phase", StateVars::NAMES.join(","));
    for (phase, vars) in popp::phase_table() {
        println!("{:<14} {vars}", phase.to_string());
    }

    println!("\ntransitions:");
    for t in popp::all_transitions() {
        println!("  {} -> {:?} ({:?})", t.from, t.to, t.kind);
    }

    let bet = BetSpec::even(0.6)?;
    let schedule = SizingSchedule::default();
    for observed in ["+,=,+,=,=,=,+,+,+", "-,-,-,+,++,++,-,+,-"] {
        let vars: StateVars = observed.parse()?;
        let ranked = popp::classify_phase(&vars);
        let best = ranked[0];
        println!(
            "\n{observed}: {} with {}/9 matches; bet {} of wealth",
            best.phase,
            best.score,
            sig(schedule.effective_fraction(best.phase, &bet))
        );
    }
    Ok(())
}
