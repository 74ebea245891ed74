//! Trading-system P&L summaries.
//!
//! A [`TradeSeries`] holds one record per period with the position side and
//! the period P&L. [`summarize`] produces a [`SummaryRow`] with the columns
//!
//! | column  | meaning                                                   |
//! |---------|-----------------------------------------------------------|
//! | np      | periods in the filter's universe                          |
//! | npi     | periods with a position                                   |
//! | maxdd   | largest peak-to-trough fall of cumulative P&L (magnitude) |
//! | pnlpp   | mean P&L per in-market period                             |
//! | ir      | pnlpp / sdpnl                                             |
//! | pnltot  | total P&L, not compounded                                 |
//! | sdpnl   | sample standard deviation of in-market P&L                |
//! | winpct  | percentage of in-market periods with P&L > 0              |
//! | runs    | number of win/loss runs                                   |
//! | runspvu | left-tail p-value for too few runs                        |
//!
//! Drawdown here is additive (P&L units), unlike the log-space functionals
//! in [`crate::wealthsim`].

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::fmt::{json_num, sig};

/// Exact runs distribution is used up to this many outcomes.
pub const EXACT_RUNS_MAX: usize = 30;

/// Minimum in-market periods for [`ppgs_classify`].
pub const PPGS_MIN_OBS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Long,
    Short,
    Flat,
}

impl Side {
    pub fn code(self) -> &'static str {
        match self {
            Side::Long => "L",
            Side::Short => "S",
            Side::Flat => "F",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" | "l" | "long" | "Long" => Ok(Side::Long),
            "S" | "s" | "short" | "Short" => Ok(Side::Short),
            "F" | "f" | "flat" | "Flat" => Ok(Side::Flat),
            other => Err(Error::Parse(format!("unknown side '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeRecord {
    pub period_id: i64,
    pub side: Side,
    pub pnl: f64,
}

/// Period-ordered P&L records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeSeries {
    records: Vec<TradeRecord>,
}

impl TradeSeries {
    /// Validates that period ids strictly increase, P&L values are finite
    /// and flat periods carry zero P&L.
    pub fn new(records: Vec<TradeRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !r.pnl.is_finite() {
                return Err(Error::Parse(format!(
                    "period {}: pnl must be finite",
                    r.period_id
                )));
            }
            if r.side == Side::Flat && r.pnl != 0.0 {
                return Err(Error::Parse(format!(
                    "period {}: flat period with nonzero pnl {}",
                    r.period_id, r.pnl
                )));
            }
            if i > 0 && records[i - 1].period_id >= r.period_id {
                return Err(Error::Parse(format!(
                    "period ids must strictly increase ({} after {})",
                    r.period_id,
                    records[i - 1].period_id
                )));
            }
        }
        Ok(Self { records })
    }

    /// Builds a series from `(side, pnl)` pairs numbered from 1.
    pub fn from_sides(rows: impl IntoIterator<Item = (Side, f64)>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .enumerate()
                .map(|(i, (side, pnl))| TradeRecord {
                    period_id: i as i64 + 1,
                    side,
                    pnl,
                })
                .collect(),
        )
    }

    pub fn records(&self) -> &[TradeRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Reads CSV with header `period_id,side,pnl` and sides `L`, `S`, `F`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            period_id: i64,
            side: String,
            pnl: f64,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["period_id", "side", "pnl"] {
            return Err(Error::Parse(format!(
                "expected header period_id,side,pnl, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut records = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row?;
            records.push(TradeRecord {
                period_id: row.period_id,
                side: row.side.parse()?,
                pnl: row.pnl,
            });
        }
        Self::new(records)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["period_id", "side", "pnl"])?;
        for r in &self.records {
            wtr.write_record([r.period_id.to_string(), r.side.code().into(), sig(r.pnl)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Filter {
    Long,
    Short,
    All,
}

impl Filter {
    pub fn label(self) -> &'static str {
        match self {
            Filter::Long => "Long",
            Filter::Short => "Short",
            Filter::All => "All",
        }
    }

    fn admits(self, side: Side) -> bool {
        match self {
            Filter::All => true,
            Filter::Long => side == Side::Long,
            Filter::Short => side == Side::Short,
        }
    }
}

impl std::str::FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "long" => Ok(Filter::Long),
            "short" => Ok(Filter::Short),
            "all" => Ok(Filter::All),
            other => Err(Error::Parse(format!("unknown filter '{other}'"))),
        }
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub np: usize,
    pub npi: usize,
    /// Magnitude of the worst peak-to-trough fall; displayed negated.
    pub maxdd: f64,
    pub pnlpp: f64,
    /// `None` when `sdpnl` is zero or undefined.
    pub ir: Option<f64>,
    pub pnltot: f64,
    pub sdpnl: f64,
    pub winpct: f64,
    pub runs: usize,
    pub runspvu: f64,
}

impl SummaryRow {
    pub const COLUMNS: [&'static str; 10] = [
        "np", "npi", "maxdd", "pnlpp", "ir", "pnltot", "sdpnl", "winpct", "runs", "runspvu",
    ];

    /// Display cells in column order, maxdd negated.
    pub fn cells(&self) -> [String; 10] {
        [
            self.np.to_string(),
            self.npi.to_string(),
            sig(-self.maxdd),
            sig(self.pnlpp),
            self.ir.map(sig).unwrap_or_else(|| "NA".into()),
            sig(self.pnltot),
            sig(self.sdpnl),
            sig(self.winpct),
            self.runs.to_string(),
            sig(self.runspvu),
        ]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "np": self.np,
            "npi": self.npi,
            "maxdd": json_num(-self.maxdd),
            "pnlpp": json_num(self.pnlpp),
            "ir": self.ir.map(json_num).unwrap_or(serde_json::Value::Null),
            "pnltot": json_num(self.pnltot),
            "sdpnl": json_num(self.sdpnl),
            "winpct": json_num(self.winpct),
            "runs": self.runs,
            "runspvu": json_num(self.runspvu),
        })
    }
}

/// Renders labelled rows as a right-aligned text table in column order.
pub fn render_table(rows: &[(&str, SummaryRow)]) -> String {
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let cells: Vec<[String; 10]> = rows.iter().map(|(_, r)| r.cells()).collect();
    let widths: Vec<usize> = (0..10)
        .map(|c| {
            cells
                .iter()
                .map(|row| row[c].len())
                .chain(std::iter::once(SummaryRow::COLUMNS[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    out.push_str(&" ".repeat(label_w));
    for (c, name) in SummaryRow::COLUMNS.iter().enumerate() {
        out.push_str(&format!(" {:>w$}", name, w = widths[c]));
    }
    out.push('\n');
    for ((label, _), row) in rows.iter().zip(&cells) {
        out.push_str(&format!("{:<w$}", label, w = label_w));
        for (c, cell) in row.iter().enumerate() {
            out.push_str(&format!(" {:>w$}", cell, w = widths[c]));
        }
        out.push('\n');
    }
    out
}

/// Summary statistics for the periods admitted by `filter`.
pub fn summarize(series: &TradeSeries, filter: Filter) -> Result<SummaryRow> {
    let universe: Vec<&TradeRecord> = series
        .records
        .iter()
        .filter(|r| filter.admits(r.side))
        .collect();
    if universe.is_empty() {
        return Err(Error::EmptySelection(filter.label()));
    }
    let active: Vec<f64> = universe
        .iter()
        .filter(|r| r.side != Side::Flat)
        .map(|r| r.pnl)
        .collect();
    let np = universe.len();
    let npi = active.len();
    if npi == 0 {
        return Err(Error::EmptySelection(filter.label()));
    }

    let pnltot: f64 = active.iter().sum();
    let pnlpp = pnltot / npi as f64;
    let sdpnl = if npi > 1 {
        (active.iter().map(|x| (x - pnlpp).powi(2)).sum::<f64>() / (npi - 1) as f64).sqrt()
    } else {
        0.0
    };
    let ir = (sdpnl > 0.0).then(|| pnlpp / sdpnl);
    let wins = active.iter().filter(|&&x| x > 0.0).count();
    let winpct = 100.0 * wins as f64 / npi as f64;
    let maxdd = max_drawdown(&active);
    let rt = runs_test(&run_outcomes(&active));

    Ok(SummaryRow {
        np,
        npi,
        maxdd,
        pnlpp,
        ir,
        pnltot,
        sdpnl,
        winpct,
        runs: rt.runs,
        runspvu: rt.p_value_too_few,
    })
}

/// Largest fall of the running sum of `pnl` from its running peak, where the
/// curve starts at 0 before the first period. Returned as a magnitude.
pub fn max_drawdown(pnl: &[f64]) -> f64 {
    let mut cum = 0.0;
    let mut peak = 0.0f64;
    let mut worst = 0.0f64;
    for &x in pnl {
        cum += x;
        peak = peak.max(cum);
        worst = worst.max(peak - cum);
    }
    worst
}

/// Win/loss indicators for the runs test. Zero-P&L periods extend the
/// current run; leading zeros take the first decided outcome, and an
/// all-zero sequence is all losses.
pub fn run_outcomes(pnl: &[f64]) -> Vec<bool> {
    let first = pnl
        .iter()
        .find(|&&x| x != 0.0)
        .map(|&x| x > 0.0)
        .unwrap_or(false);
    let mut current = first;
    pnl.iter()
        .map(|&x| {
            if x != 0.0 {
                current = x > 0.0;
            }
            current
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunsMethod {
    Exact,
    Normal,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunsTest {
    pub runs: usize,
    /// `P[R <= runs]` with the win and loss counts held fixed.
    pub p_value_too_few: f64,
    pub method: RunsMethod,
}

impl RunsTest {
    pub fn degenerate(&self) -> bool {
        self.method == RunsMethod::Degenerate
    }
}

/// Number of maximal blocks of equal outcomes.
pub fn count_runs(outcomes: &[bool]) -> usize {
    if outcomes.is_empty() {
        return 0;
    }
    1 + outcomes.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Runs test for too few runs (positive serial dependence).
///
/// Under the null every arrangement of the observed wins and losses is
/// equally likely. Up to [`EXACT_RUNS_MAX`] outcomes the left tail is summed
/// from the exact runs distribution; beyond that a normal approximation with
/// continuity correction is used. Sequences without both outcomes report a
/// p-value of 1 and [`RunsMethod::Degenerate`].
pub fn runs_test(outcomes: &[bool]) -> RunsTest {
    let runs = count_runs(outcomes);
    let n1 = outcomes.iter().filter(|&&w| w).count();
    let n2 = outcomes.len() - n1;
    if n1 == 0 || n2 == 0 {
        return RunsTest {
            runs,
            p_value_too_few: 1.0,
            method: RunsMethod::Degenerate,
        };
    }
    if outcomes.len() <= EXACT_RUNS_MAX {
        let p: f64 = (2..=runs).map(|r| runs_pmf(n1, n2, r)).sum();
        RunsTest {
            runs,
            p_value_too_few: p.min(1.0),
            method: RunsMethod::Exact,
        }
    } else {
        let (n1f, n2f) = (n1 as f64, n2 as f64);
        let n = n1f + n2f;
        let mean = 2.0 * n1f * n2f / n + 1.0;
        let var = 2.0 * n1f * n2f * (2.0 * n1f * n2f - n) / (n * n * (n - 1.0));
        let z = (runs as f64 + 0.5 - mean) / var.sqrt();
        let p = Normal::standard().cdf(z);
        RunsTest {
            runs,
            p_value_too_few: p,
            method: RunsMethod::Normal,
        }
    }
}

/// `P[R = r]` for `n1` wins and `n2` losses in uniformly random order.
pub fn runs_pmf(n1: usize, n2: usize, r: usize) -> f64 {
    if r < 2 {
        return 0.0;
    }
    let total = binomial(n1 + n2, n1);
    let ways = if r % 2 == 0 {
        let k = r / 2;
        2.0 * binomial_sub1(n1, k) * binomial_sub1(n2, k)
    } else {
        let k = (r - 1) / 2;
        binomial_sub1(n1, k + 1) * binomial_sub1(n2, k)
            + binomial_sub1(n1, k) * binomial_sub1(n2, k + 1)
    };
    ways / total
}

/// `C(n − 1, k − 1)`: ways to split `n` items into `k` nonempty blocks.
fn binomial_sub1(n: usize, k: usize) -> f64 {
    if k == 0 || n == 0 {
        return if k == 0 && n == 0 { 1.0 } else { 0.0 };
    }
    binomial(n - 1, k - 1)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    // Exact in u128 for the sizes used here.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumPoint {
    pub period_id: i64,
    pub cum_pnl: f64,
}

/// Running sum of P&L over every period.
pub fn cumulative_pnl(series: &TradeSeries) -> Vec<CumPoint> {
    let mut cum = 0.0;
    series
        .records
        .iter()
        .map(|r| {
            cum += r.pnl;
            CumPoint {
                period_id: r.period_id,
                cum_pnl: cum,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearTotal {
    pub year: i64,
    pub pnl: f64,
    pub periods: usize,
}

/// Groups P&L into years of `periods_per_year` consecutive period ids,
/// year `y` covering ids `[first + y·ppy, first + (y+1)·ppy)` where `first`
/// is the series' first id.
pub fn yearly_totals(series: &TradeSeries, periods_per_year: usize) -> Result<Vec<YearTotal>> {
    if periods_per_year == 0 {
        return Err(Error::domain(
            "periods_per_year",
            0.0,
            "periods_per_year >= 1",
        ));
    }
    let Some(first) = series.records.first().map(|r| r.period_id) else {
        return Ok(Vec::new());
    };
    let mut out: Vec<YearTotal> = Vec::new();
    for r in &series.records {
        let year = (r.period_id - first).div_euclid(periods_per_year as i64);
        match out.last_mut() {
            Some(t) if t.year == year => {
                t.pnl += r.pnl;
                t.periods += 1;
            }
            _ => out.push(YearTotal {
                year,
                pnl: r.pnl,
                periods: 1,
            }),
        }
    }
    Ok(out)
}

/// Average total P&L per year over the span of years covered, counting
/// years with no periods as zero.
pub fn average_per_year(series: &TradeSeries, periods_per_year: usize) -> Result<f64> {
    let years = yearly_totals(series, periods_per_year)?;
    let Some(last) = years.last() else {
        return Err(Error::EmptySelection("All"));
    };
    let span = (last.year + 1) as f64;
    Ok(years.iter().map(|y| y.pnl).sum::<f64>() / span)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PpgsClass {
    Positive,
    Negative,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PpgsVerdict {
    pub class: PpgsClass,
    pub n: usize,
    pub mean: f64,
    pub t_stat: Option<f64>,
    /// Two-sided p-value of the one-sample t-test.
    pub p_value: Option<f64>,
    pub note: Option<String>,
}

/// Classifies the sign of a system's expected per-period P&L with a
/// one-sample t-test on in-market periods.
pub fn ppgs_classify(series: &TradeSeries, alpha: f64) -> Result<PpgsVerdict> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "0 < alpha < 1"));
    }
    let xs: Vec<f64> = series
        .records
        .iter()
        .filter(|r| r.side != Side::Flat)
        .map(|r| r.pnl)
        .collect();
    let n = xs.len();
    let mean = if n == 0 {
        0.0
    } else {
        xs.iter().sum::<f64>() / n as f64
    };
    if n < PPGS_MIN_OBS {
        return Ok(PpgsVerdict {
            class: PpgsClass::Indeterminate,
            n,
            mean,
            t_stat: None,
            p_value: None,
            note: Some(format!(
                "need at least {PPGS_MIN_OBS} in-market periods, have {n}"
            )),
        });
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        let class = if mean > 0.0 {
            PpgsClass::Positive
        } else if mean < 0.0 {
            PpgsClass::Negative
        } else {
            PpgsClass::Indeterminate
        };
        return Ok(PpgsVerdict {
            class,
            n,
            mean,
            t_stat: None,
            p_value: Some(if mean == 0.0 { 1.0 } else { 0.0 }),
            note: Some("zero variance".into()),
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("valid t distribution");
    let p = 2.0 * dist.cdf(-t.abs());
    let class = match (p < alpha, mean > 0.0) {
        (true, true) => PpgsClass::Positive,
        (true, false) => PpgsClass::Negative,
        (false, _) => PpgsClass::Indeterminate,
    };
    Ok(PpgsVerdict {
        class,
        n,
        mean,
        t_stat: Some(t),
        p_value: Some(p),
        note: None,
    })
}
