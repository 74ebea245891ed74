//! Kelly fraction, critical fraction and the growth curve for a few bets.
//!
//! ```bash
//! cargo run -p safm --example kelly_basics
//! ```

use safm::betmath::{self, BetSpec, GrowthCurve};
use safm::fmt::sig;

fn main() -> safm::Result<()> {
    println!(
        "{:>5} {:>5} {:>8} {:>14} {:>14}",
        "p", "d", "kelly", "growth", "f_c"
    );
    for (p, d) in [
        (0.51, 1.0),
        (0.55, 1.0),
        (0.6, 1.0),
        (0.6, 2.0),
        (0.4, 2.0),
        (0.9, 1.0),
    ] {
        let bet = BetSpec::new(p, d)?;
        let f = betmath::kelly_fraction(&bet);
        let g = betmath::asymptotic_growth(&bet, f)?;
        let fc = betmath::critical_fraction(&bet)?;
        println!("{p:>5} {d:>5} {:>8} {:>14} {:>14}", sig(f), sig(g), sig(fc));
    }

    // Betting twice Kelly lands near zero growth for small edges.
    let bet = BetSpec::even(0.55)?;
    let curve = GrowthCurve::on_grid(&bet, 0.05)?;
    println!("\ngrowth curve for an even-money bet at p = 0.55");
    for (f, g) in curve.fractions.iter().zip(&curve.rates).take(8) {
        println!("  f = {:<5} G = {}", sig(*f), sig(*g));
    }

    // Half Kelly keeps three quarters of the growth.
    let half = betmath::fractional_kelly(&bet, 0.5)?;
    let full = betmath::kelly_fraction(&bet);
    println!(
        "\nhalf Kelly {} keeps {:.1}% of the growth",
        sig(half),
        100.0 * betmath::asymptotic_growth(&bet, half)? / betmath::asymptotic_growth(&bet, full)?
    );

    let mixed = betmath::mixed_sequence_fractions(&[(0.6, 1.0), (0.55, 2.0), (0.45, 1.0)])?;
    let mixed: Vec<String> = mixed.into_iter().map(sig).collect();
    println!(
        "fractions for a mixed sequence of bets: {}",
        mixed.join(", ")
    );
    Ok(())
}
