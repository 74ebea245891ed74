//! The `safm` command line.
//!
//! Every subcommand writes to stdout (or `--output`) in `text`, `json` or
//! `csv` form. Randomness flows only from `--seed`, which falls back to the
//! `GRATIONAL_SEED` environment variable and then to [`DEFAULT_SEED`], so
//! identical invocations produce byte-identical output regardless of
//! `--threads`.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::betmath::{self, BetSpec, GrowthCurve};
use crate::error::{Error, Result};
use crate::fmt::{json_num, sig};
use crate::games::{self, Stakes};
use crate::grational::{self, GrationalProblem, LossKind, McBudget};
use crate::millerclear::{self, AuctionSpec, OpinionDistribution};
use crate::popp::{self, SizingSchedule, StateVars};
use crate::sysstats::{self, Filter, TradeSeries};
use crate::wealthsim::{self, SimConfig, SimSummary};

pub const DEFAULT_SEED: u64 = 20_170_101;
pub const SEED_ENV: &str = "GRATIONAL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "safm",
    version,
    about = "Kelly sizing, constrained growth, trading statistics, guessing games, auction clearing and strategy lifecycle tools"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Root seed for every random stream.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for parallel simulation (0 = all cores). Output does
    /// not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kelly fraction, critical fraction and asymptotic growth.
    Kelly(KellyArgs),
    /// Simulate fixed-fraction (or adaptive) wealth paths.
    Simulate(SimulateArgs),
    /// Maximize growth subject to a loss-probability cap.
    Grational(GrationalArgs),
    /// Summary table for a trade CSV (period_id,side,pnl).
    Stats(StatsArgs),
    /// Matching pennies between two strategies.
    Pennies(PenniesArgs),
    /// Auction clearing prices against opinion dispersion.
    Miller(MillerArgs),
    /// Rank lifecycle phases for a nine-field sign vector.
    Popp(PoppArgs),
}

#[derive(Debug, Args)]
pub struct KellyArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Fractional Kelly scale in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Grid step for the growth curve (csv output).
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Fixed betting fraction; defaults to the Kelly fraction.
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = 1.0)]
    pub w0: f64,
    /// Bet the running plug-in estimate instead of a fixed fraction.
    #[arg(long)]
    pub adaptive: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LossArg {
    Worst,
    Drawdown,
}

#[derive(Debug, Args)]
pub struct GrationalArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Horizon in bets; large values approximate the asymptotic problem.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = LossArg::Drawdown)]
    pub loss: LossArg,
    /// Loss level in nats that counts as a violation.
    #[arg(long)]
    pub threshold: f64,
    /// Cap on the violation probability.
    #[arg(long)]
    pub u: f64,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(long, default_value_t = grational::DEFAULT_F_MAX)]
    pub f_max: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FilterArg {
    Long,
    Short,
    All,
    /// Long, Short and All rows.
    Each,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FilterArg::Each)]
    pub filter: FilterArg,
    /// Also report the average P&L per year of this many periods.
    #[arg(long)]
    pub periods_per_year: Option<usize>,
    /// Significance level for the edge classification.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct PenniesArgs {
    /// Player 1 (wins on a match): coin, fixed:H, biased:P, mixed:X,
    /// pattern:HT, exploiter:k=K, disclosed:P.
    #[arg(long, default_value = "coin")]
    pub p1: String,
    /// Player 2 (wins on a mismatch); ignored with --spy.
    #[arg(long, default_value = "exploiter:k=2")]
    pub p2: String,
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1)]
    pub matches: usize,
    #[arg(long, default_value_t = 1.0)]
    pub stake: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rake: f64,
    /// Player 2 sees player 1's choice before writing.
    #[arg(long)]
    pub spy: bool,
}

#[derive(Debug, Args)]
pub struct MillerArgs {
    #[arg(long, default_value_t = 50.0)]
    pub mean: f64,
    /// Comma-separated opinion standard deviations.
    #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20")]
    pub sds: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub buyers: usize,
    #[arg(long, default_value_t = 50)]
    pub shares: usize,
    #[arg(long, default_value_t = 0)]
    pub short: usize,
    /// Sample the buyers instead of using the normal quantile.
    #[arg(long)]
    pub empirical: bool,
    /// Condition opinions on positive prices.
    #[arg(long)]
    pub truncate: bool,
}

#[derive(Debug, Args)]
pub struct PoppArgs {
    /// RET,VOL,SR,SP$,POP,LEV,SDIV,SLINK,SROB using --, -, =, +, ++, ?, NA.
    #[arg(allow_hyphen_values = true)]
    pub vector: String,
    /// Multiplier for Eureka and Early Copycat.
    #[arg(long, default_value_t = 1.0)]
    pub early: f64,
    #[arg(long, default_value_t = 0.5)]
    pub late: f64,
    #[arg(long, default_value_t = 0.0)]
    pub crash: f64,
    /// Win probability and odds for an effective fraction.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

/// Parses `args` (including the program name) and runs to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = run_with(args, &mut lock);
    let _ = lock.flush();
    code
}

/// Like [`run`] but writes the primary output to `out`. Diagnostics go to
/// stderr.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cfg) {
        Ok(bytes) => {
            let written = match &cfg.output {
                Some(path) => std::fs::write(path, &bytes),
                None => out.write_all(&bytes),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed configuration and returns the rendered output.
pub fn execute(cfg: &RunConfig) -> Result<Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cfg.command {
        Command::Kelly(a) => kelly(a, cfg.format),
        Command::Simulate(a) => simulate(a, cfg.seed, cfg.format),
        Command::Grational(a) => grational(a, cfg.seed, cfg.format),
        Command::Stats(a) => stats(a, cfg.format),
        Command::Pennies(a) => pennies(a, cfg.seed, cfg.format),
        Command::Miller(a) => miller(a, cfg.seed, cfg.format),
        Command::Popp(a) => popp_cmd(a, cfg.format),
    })
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s.into_bytes()
}

fn kelly(a: &KellyArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let bet = BetSpec::new(a.p, a.d)?;
    let f = betmath::kelly_fraction(&bet);
    let f_alpha = betmath::fractional_kelly(&bet, a.alpha)?;
    let growth = betmath::asymptotic_growth(&bet, f)?;
    let growth_alpha = betmath::asymptotic_growth(&bet, f_alpha)?;
    let f_c = betmath::critical_fraction(&bet).ok();
    Ok(match format {
        OutputFormat::Text => {
            let mut s = format!("p={} d={}\n", sig(a.p), sig(a.d));
            s += &format!("f={}\n", sig(f));
            s += &format!("f_c={}\n", f_c.map(sig).unwrap_or_else(|| "none".into()));
            s += &format!("growth={}\n", sig(growth));
            if a.alpha != 1.0 {
                s += &format!(
                    "alpha={} f_alpha={} growth_alpha={}\n",
                    sig(a.alpha),
                    sig(f_alpha),
                    sig(growth_alpha)
                );
            }
            s.into_bytes()
        }
        OutputFormat::Json => json_bytes(&json!({
            "p": json_num(a.p),
            "d": json_num(a.d),
            "f": json_num(f),
            "f_c": f_c.map(json_num),
            "growth": json_num(growth),
            "alpha": json_num(a.alpha),
            "f_alpha": json_num(f_alpha),
            "growth_alpha": json_num(growth_alpha),
        })),
        OutputFormat::Csv => {
            if !(a.grid_step > 0.0 && a.grid_step < 1.0) {
                return Err(Error::domain("grid_step", a.grid_step, "0 < grid_step < 1"));
            }
            let curve = GrowthCurve::on_grid(&bet, a.grid_step)?;
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["f", "growth"])?;
            for (f, g) in curve.fractions.iter().zip(&curve.rates) {
                wtr.write_record([sig(*f), sig(*g)])?;
            }
            wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
    })
}

fn simulate(a: &SimulateArgs, seed: u64, format: OutputFormat) -> Result<Vec<u8>> {
    let bet = BetSpec::new(a.p, a.d)?;
    let paths = if a.adaptive {
        if a.w0 != 1.0 {
            return Err(Error::Config(
                "--w0 is not supported with --adaptive".into(),
            ));
        }
        // One independent adaptive path per sub-seed.
        (0..a.paths)
            .map(|k| wealthsim::adaptive_policy_path(&bet, a.steps, seed.wrapping_add(k as u64)))
            .collect::<Result<Vec<_>>>()?
    } else {
        let f = a.f.unwrap_or_else(|| betmath::kelly_fraction(&bet));
        let cfg = SimConfig::new(bet, f, a.steps, a.paths, seed)?.with_initial_wealth(a.w0)?;
        wealthsim::simulate_paths(&cfg)?
    };
    let stats: Vec<_> = paths.iter().map(|p| p.stats()).collect();
    let summary = SimSummary::from_stats(&stats);
    let f_label = if a.adaptive {
        "adaptive".to_string()
    } else {
        sig(a.f.unwrap_or_else(|| betmath::kelly_fraction(&bet)))
    };
    Ok(match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            wealthsim::write_paths_csv(&paths, &mut buf)?;
            buf
        }
        OutputFormat::Text => {
            let mut s = format!(
                "p={} d={} f={} steps={} paths={}\n",
                sig(a.p),
                sig(a.d),
                f_label,
                a.steps,
                a.paths
            );
            s += &format!(
                "growth={} se={}\n",
                sig(summary.growth.mean),
                sig(summary.growth.se)
            );
            if let Ok(g) = betmath::asymptotic_growth(
                &bet,
                a.f.unwrap_or_else(|| betmath::kelly_fraction(&bet)),
            ) {
                if !a.adaptive {
                    s += &format!("asymptotic_growth={}\n", sig(g));
                }
            }
            s += &format!(
                "worst_loss={} se={}\n",
                sig(summary.worst_loss.mean),
                sig(summary.worst_loss.se)
            );
            s += &format!(
                "drawdown={} se={}\n",
                sig(summary.drawdown.mean),
                sig(summary.drawdown.se)
            );
            s += &format!("ruined={}\n", summary.ruined);
            s.into_bytes()
        }
        OutputFormat::Json => {
            let per_path: Vec<Value> = stats
                .iter()
                .enumerate()
                .map(|(k, st)| {
                    json!({
                        "path_id": k,
                        "growth_rate": json_num(st.growth_rate),
                        "worst_loss": json_num(st.worst_loss),
                        "drawdown": json_num(st.drawdown),
                        "ruined": st.ruined,
                    })
                })
                .collect();
            json_bytes(&json!({
                "p": json_num(a.p),
                "d": json_num(a.d),
                "f": f_label,
                "steps": a.steps,
                "paths": a.paths,
                "growth": {"mean": json_num(summary.growth.mean), "se": json_num(summary.growth.se)},
                "worst_loss": {"mean": json_num(summary.worst_loss.mean), "se": json_num(summary.worst_loss.se)},
                "drawdown": {"mean": json_num(summary.drawdown.mean), "se": json_num(summary.drawdown.se)},
                "ruined": summary.ruined,
                "per_path": per_path,
            }))
        }
    })
}

fn grational(a: &GrationalArgs, seed: u64, format: OutputFormat) -> Result<Vec<u8>> {
    let problem = GrationalProblem {
        bet: BetSpec::new(a.p, a.d)?,
        n_steps: a.steps,
        loss_kind: match a.loss {
            LossArg::Worst => LossKind::WorstLoss,
            LossArg::Drawdown => LossKind::Drawdown,
        },
        loss_threshold: a.threshold,
        max_prob: a.u,
    };
    let budget = McBudget {
        n_paths: a.paths,
        root_seed: seed,
    };
    let sol = grational::solve_with_max(&problem, &budget, a.grid_step, a.f_max)?;
    let kelly = betmath::kelly_fraction(&problem.bet);
    Ok(match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            sol.write_grid_csv(&mut buf)?;
            buf
        }
        OutputFormat::Text => {
            let mut s = format!(
                "p={} d={} steps={} loss={:?} threshold={} u={}\n",
                sig(a.p),
                sig(a.d),
                a.steps,
                problem.loss_kind,
                sig(a.threshold),
                sig(a.u)
            );
            s += &format!("kelly={}\n", sig(kelly));
            s += &format!("f_star={}\n", sig(sol.f_star));
            s += &format!(
                "expected_growth={} se={}\n",
                sig(sol.expected_growth.mean),
                sig(sol.expected_growth.se)
            );
            s += &format!(
                "violation_prob={} se={}\n",
                sig(sol.violation_prob.mean),
                sig(sol.violation_prob.se)
            );
            s += &format!("feasible={}\n", sol.feasible);
            s.into_bytes()
        }
        OutputFormat::Json => {
            let grid: Vec<Value> = sol
                .grid
                .iter()
                .map(|pt| {
                    json!({
                        "f": json_num(pt.f),
                        "e_growth": json_num(pt.growth.mean),
                        "se_growth": json_num(pt.growth.se),
                        "p_violation": json_num(pt.violation.mean),
                        "se_violation": json_num(pt.violation.se),
                        "feasible": pt.feasible,
                    })
                })
                .collect();
            json_bytes(&json!({
                "kelly": json_num(kelly),
                "f_star": json_num(sol.f_star),
                "expected_growth": {"mean": json_num(sol.expected_growth.mean), "se": json_num(sol.expected_growth.se)},
                "violation_prob": {"mean": json_num(sol.violation_prob.mean), "se": json_num(sol.violation_prob.se)},
                "feasible": sol.feasible,
                "grid": grid,
            }))
        }
    })
}

fn stats(a: &StatsArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let file = std::fs::File::open(&a.input)?;
    let series = TradeSeries::read_csv(file)?;
    let filters: Vec<Filter> = match a.filter {
        FilterArg::Long => vec![Filter::Long],
        FilterArg::Short => vec![Filter::Short],
        FilterArg::All => vec![Filter::All],
        FilterArg::Each => vec![Filter::Long, Filter::Short, Filter::All],
    };
    let mut rows = Vec::new();
    for filter in filters {
        match sysstats::summarize(&series, filter) {
            Ok(row) => rows.push((filter.label(), row)),
            // Missing sides are skipped when listing every row.
            Err(Error::EmptySelection(_)) if matches!(a.filter, FilterArg::Each) => {}
            Err(e) => return Err(e),
        }
    }
    let per_year = a
        .periods_per_year
        .map(|ppy| sysstats::average_per_year(&series, ppy))
        .transpose()?;
    let ppgs = sysstats::ppgs_classify(&series, a.alpha)?;
    Ok(match format {
        OutputFormat::Text => {
            let mut s = sysstats::render_table(&rows);
            if let Some(y) = per_year {
                s += &format!("pnl_per_year={}\n", sig(y));
            }
            s += &format!("edge={:?}", ppgs.class);
            if let Some(p) = ppgs.p_value {
                s += &format!(" p_value={}", sig(p));
            }
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(label, row)| {
                    let mut v = row.to_json();
                    v["filter"] = json!(label);
                    v
                })
                .collect();
            json_bytes(&json!({
                "rows": rows,
                "pnl_per_year": per_year.map(json_num),
                "edge": format!("{:?}", ppgs.class),
                "edge_p_value": ppgs.p_value.map(json_num),
            }))
        }
        OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["filter"];
            header.extend(sysstats::SummaryRow::COLUMNS);
            wtr.write_record(&header)?;
            for (label, row) in &rows {
                let mut rec = vec![label.to_string()];
                rec.extend(row.cells());
                wtr.write_record(&rec)?;
            }
            wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
    })
}

fn pennies(a: &PenniesArgs, seed: u64, format: OutputFormat) -> Result<Vec<u8>> {
    if a.matches == 0 {
        return Err(Error::domain("matches", 0.0, "matches >= 1"));
    }
    let stakes = Stakes {
        stake: a.stake,
        rake: a.rake,
    };
    let mut transcripts = Vec::with_capacity(a.matches);
    let mut names = (String::new(), String::new());
    for m in 0..a.matches {
        let match_seed = seed.wrapping_add(m as u64);
        let mut s1 = games::parse_strategy(&a.p1)?;
        names.0 = s1.name();
        let t = if a.spy {
            names.1 = "spy".into();
            games::spy_match_with(s1.as_mut(), a.rounds, match_seed, stakes)?
        } else {
            let mut s2 = games::parse_strategy(&a.p2)?;
            names.1 = s2.name();
            games::play_match_with(s1.as_mut(), s2.as_mut(), a.rounds, match_seed, stakes)?
        };
        transcripts.push(t);
    }
    let totals2: Vec<f64> = transcripts.iter().map(|t| t.total2()).collect();
    let all_rounds = (a.rounds * a.matches) as f64;
    let mean2 = totals2.iter().sum::<f64>() / all_rounds;
    let (_, se2) = if a.matches == 1 {
        transcripts[0].player2_mean()
    } else {
        let merged = games::GameTranscript {
            rounds: transcripts
                .iter()
                .flat_map(|t| t.rounds.iter().copied())
                .collect(),
            stake: a.stake,
            rake: a.rake,
        };
        merged.player2_mean()
    };
    Ok(match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            if a.matches == 1 {
                transcripts[0].write_csv(&mut buf)?;
            } else {
                for (m, t) in transcripts.iter().enumerate() {
                    t.write_csv_tagged(Some(m), &mut buf)?;
                }
            }
            buf
        }
        OutputFormat::Text => {
            let mut s = format!(
                "p1={} p2={} rounds={} matches={} stake={} rake={}\n",
                names.0,
                names.1,
                a.rounds,
                a.matches,
                sig(a.stake),
                sig(a.rake)
            );
            s += &format!(
                "total1={} total2={}\n",
                sig(transcripts.iter().map(|t| t.total1()).sum()),
                sig(totals2.iter().sum())
            );
            s += &format!("mean2={} se={}\n", sig(mean2), sig(se2));
            s.into_bytes()
        }
        OutputFormat::Json => {
            let matches: Vec<Value> = transcripts
                .iter()
                .enumerate()
                .map(|(m, t)| {
                    let (mean, se) = t.player2_mean();
                    json!({
                        "match": m,
                        "total1": json_num(t.total1()),
                        "total2": json_num(t.total2()),
                        "mean2": json_num(mean),
                        "se2": json_num(se),
                    })
                })
                .collect();
            json_bytes(&json!({
                "p1": names.0,
                "p2": names.1,
                "rounds": a.rounds,
                "stake": json_num(a.stake),
                "rake": json_num(a.rake),
                "mean2": json_num(mean2),
                "se2": json_num(se2),
                "matches": matches,
            }))
        }
    })
}

fn miller(a: &MillerArgs, seed: u64, format: OutputFormat) -> Result<Vec<u8>> {
    let auction = AuctionSpec::new(a.shares, a.buyers).with_short_supply(a.short);
    if a.sds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("--sds must be nondecreasing".into()));
    }
    let prices: Vec<f64> = a
        .sds
        .iter()
        .map(|&sd| {
            let dist = if a.empirical {
                let mut d = OpinionDistribution::sample_normal(a.mean, sd, a.buyers, seed)?;
                if a.truncate {
                    if let OpinionDistribution::Empirical(xs) = &mut d {
                        xs.iter_mut().for_each(|x| *x = x.max(0.0));
                    }
                }
                d
            } else {
                OpinionDistribution::Normal {
                    mean: a.mean,
                    sd,
                    truncate: a.truncate,
                }
            };
            millerclear::clearing_price(&dist, &auction)
        })
        .collect::<Result<_>>()?;
    let level = auction.clearing_level();
    Ok(match format {
        OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["sd", "clearing_price"])?;
            for (sd, p) in a.sds.iter().zip(&prices) {
                wtr.write_record([sig(*sd), sig(*p)])?;
            }
            wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        OutputFormat::Text => {
            let mut s = format!(
                "mean={} buyers={} supply={} level={} mode={}\n",
                sig(a.mean),
                a.buyers,
                auction.supply(),
                sig(level),
                if a.empirical { "empirical" } else { "normal" }
            );
            for (sd, p) in a.sds.iter().zip(&prices) {
                s += &format!("sd={} price={}\n", sig(*sd), sig(*p));
            }
            s.into_bytes()
        }
        OutputFormat::Json => {
            let pts: Vec<Value> = a
                .sds
                .iter()
                .zip(&prices)
                .map(|(sd, p)| json!({"sd": json_num(*sd), "clearing_price": json_num(*p)}))
                .collect();
            json_bytes(&json!({
                "mean": json_num(a.mean),
                "buyers": a.buyers,
                "supply": auction.supply(),
                "level": json_num(level),
                "empirical": a.empirical,
                "prices": pts,
            }))
        }
    })
}

fn popp_cmd(a: &PoppArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let observed: StateVars = a.vector.parse()?;
    let schedule = SizingSchedule::new(a.early, a.late, a.crash)?;
    let ranked = popp::classify_phase(&observed);
    let top = ranked[0].score;
    // Ties at the top take the most conservative sizing.
    let multiplier = ranked
        .iter()
        .filter(|m| m.score == top)
        .map(|m| schedule.multiplier(m.phase))
        .fold(f64::INFINITY, f64::min);
    let bet = a.p.map(|p| BetSpec::new(p, a.d)).transpose()?;
    let effective = bet.map(|b| multiplier * betmath::kelly_fraction(&b));
    Ok(match format {
        OutputFormat::Text | OutputFormat::Csv if format == OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["rank", "phase", "score", "tied", "multiplier"])?;
            for (i, m) in ranked.iter().enumerate() {
                wtr.write_record([
                    (i + 1).to_string(),
                    m.phase.to_string(),
                    m.score.to_string(),
                    m.tied.to_string(),
                    sig(schedule.multiplier(m.phase)),
                ])?;
            }
            wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        OutputFormat::Json => json_bytes(&json!({
            "observed": observed.to_string(),
            "ranked": ranked.iter().map(|m| json!({
                "phase": m.phase.to_string(),
                "score": m.score,
                "tied": m.tied,
            })).collect::<Vec<_>>(),
            "multiplier": json_num(multiplier),
            "effective_fraction": effective.map(json_num),
        })),
        _ => {
            let mut s = format!("observed={observed}\n");
            for (i, m) in ranked.iter().enumerate() {
                s += &format!(
                    "{}. {} ({}) score={}{}\n",
                    i + 1,
                    m.phase,
                    m.phase.letter(),
                    m.score,
                    if m.tied { " tied" } else { "" }
                );
            }
            s += &format!("multiplier={}\n", sig(multiplier));
            if let Some(f) = effective {
                s += &format!("effective_fraction={}\n", sig(f));
            }
            s.into_bytes()
        }
    })
}
