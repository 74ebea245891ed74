//! Matching pennies: biased players, a context-model exploiter, a spy and
//! the closed-form value of knowing the opponent's bias.
//!
//! ```bash
//! cargo run -p safm --example matching_pennies
//! ```

use safm::games::{self, Stakes};

fn main() -> safm::Result<()> {
    let matchups = [
        ("coin", "exploiter:k=2"),
        ("biased:0.6", "exploiter:k=2"),
        ("pattern:HHT", "exploiter:k=3"),
        ("biased:0.6", "mixed:0.6"),
        ("biased:0.75", "disclosed:0.75"),
    ];
    println!(
        "{:<14} {:<16} {:>10} {:>8}",
        "player 1", "player 2", "p2/round", "se"
    );
    for (a, b) in matchups {
        let mut s1 = games::parse_strategy(a)?;
        let mut s2 = games::parse_strategy(b)?;
        let t = games::play_match(s1.as_mut(), s2.as_mut(), 20_000, 1)?;
        let (m, se) = t.player2_mean();
        println!("{a:<14} {b:<16} {m:>10.4} {se:>8.4}");
    }

    let mut coin = games::parse_strategy("coin")?;
    let spy = games::spy_match(coin.as_mut(), 100, 1)?;
    println!("\nspy over 100 rounds: {}", spy.total2());

    println!("\nexpected gain over 100 games for $200 against 60% heads:");
    for x in [0.0, 0.5, 0.6, 0.8, 1.0] {
        println!(
            "  writing T with prob {x}: ${:.2}",
            games::responder_expected_gain(0.6, x, 100, 200.0)?
        );
    }

    let stakes = Stakes {
        stake: 1.0,
        rake: 0.05,
    };
    let mut a = games::parse_strategy("coin")?;
    let mut b = games::parse_strategy("coin")?;
    let t = games::play_match_with(a.as_mut(), b.as_mut(), 10_000, 1, stakes)?;
    println!(
        "\nwith a 5% rake both players lose: {:.2} and {:.2}",
        t.total1(),
        t.total2()
    );
    Ok(())
}
