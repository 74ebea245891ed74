//! Summary table, yearly totals and edge classification for a trade file.
//!
//! ```bash
//! cargo run -p safm --example trade_summary                  # bundled fixture
//! cargo run -p safm --example trade_summary -- my_trades.csv
//! ```

use safm::fmt::sig;
use safm::sysstats::{self, Filter, TradeSeries};

fn main() -> safm::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/trades.csv").to_string()
    });
    let series = TradeSeries::read_csv(std::fs::File::open(&path)?)?;

    let rows: Vec<_> = [Filter::Long, Filter::Short, Filter::All]
        .into_iter()
        .filter_map(|f| sysstats::summarize(&series, f).ok().map(|r| (f.label(), r)))
        .collect();
    print!("{}", sysstats::render_table(&rows));

    println!();
    for y in sysstats::yearly_totals(&series, 4)? {
        println!(
            "year {:>2}: {:>8} over {} periods",
            y.year + 1,
            sig(y.pnl),
            y.periods
        );
    }
    println!(
        "average per year: {}",
        sig(sysstats::average_per_year(&series, 4)?)
    );

    let verdict = sysstats::ppgs_classify(&series, 0.05)?;
    let show = |x: Option<f64>| x.map(sig).unwrap_or_else(|| "NA".into());
    println!(
        "edge: {:?} (t = {}, p = {})",
        verdict.class,
        show(verdict.t_stat),
        show(verdict.p_value)
    );
    Ok(())
}
