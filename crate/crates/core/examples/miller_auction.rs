//! Clearing prices when buyers disagree: more dispersion raises the price
//! the marginal optimist pays, short sales pull it back.
//!
//! ```bash
//! cargo run -p safm --example miller_auction
//! ```

use safm::millerclear::{self, AuctionSpec, OpinionDistribution};

fn main() -> safm::Result<()> {
    let auction = AuctionSpec::new(50, 1000);
    let sds = [0.0, 5.0, 10.0, 15.0, 20.0];
    println!("50 shares, 1000 buyers, mean estimate 50");
    for (sd, p) in sds
        .iter()
        .zip(millerclear::dispersion_sweep(50.0, &sds, &auction)?)
    {
        let se = millerclear::order_statistic_se(50.0, *sd, &auction)?;
        println!("  sd {sd:>4}: price {p:>8.3} (sampling se {se:.3})");
    }

    let dist = OpinionDistribution::normal(50.0, 10.0)?;
    let shorts = [0, 50, 150, 450];
    println!("\nshort sellers adding supply:");
    for (s, p) in shorts
        .iter()
        .zip(millerclear::short_selling_effect(&dist, &auction, &shorts)?)
    {
        println!("  +{s:>3} shares: price {p:.3}");
    }

    if let OpinionDistribution::Empirical(xs) =
        OpinionDistribution::sample_normal(50.0, 10.0, 1000, 3)?
    {
        let first =
            millerclear::clearing_price(&OpinionDistribution::Empirical(xs.clone()), &auction)?;
        let second = millerclear::reauction_price(&xs, &auction)?;
        println!("\nsampled buyers: first auction {first:.3}, repeat auction {second:.3}");
    }
    Ok(())
}
