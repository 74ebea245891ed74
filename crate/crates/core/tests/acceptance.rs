//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p safm --test acceptance`. Exits nonzero if any
//! criterion fails. Tolerances and time limits are the constants below.

mod common;

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use safm::betmath::{self, BetSpec};
use safm::games::{self, Biased, CoinFlip, Stakes};
use safm::grational::{self, GrationalProblem, LossKind, McBudget};
use safm::millerclear::{self, AuctionSpec, OpinionDistribution};
use safm::popp::{self, Phase, SizingSchedule, Stage, TransitionKind};
use safm::sysstats::{self, Filter, TradeSeries};
use safm::wealthsim::{self, SimConfig};

const KELLY_TOL: f64 = 1e-3;
const KELLY_TIME: Duration = Duration::from_secs(1);
const MC_SIGMAS: f64 = 3.0;
const ROOT_TOL: f64 = 1e-10;
const CRITICAL_TIME: Duration = Duration::from_secs(30);
const RUNS_TIME: Duration = Duration::from_secs(60);
const FIELD_TOL: f64 = 1e-12;
const RUNSPVU_TOL: f64 = 1e-9;
const MILLER_TOL: f64 = 0.01;
const EMPIRICAL_REL_TOL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| outcome(false, "panicked"));
    let tag = if result.pass { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] {id:>2} {name}: {} ({:.2}s)",
        result.detail,
        start.elapsed().as_secs_f64()
    );
    result.pass
}

fn kelly_recovery() -> Outcome {
    let start = Instant::now();
    let fractions: Vec<f64> = (0..1000).map(|i| i as f64 * 1e-3).collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for pi in 51..=99 {
        let p = pi as f64 / 100.0;
        for d in [0.5, 1.0, 2.0] {
            let bet = BetSpec::new(p, d).unwrap();
            let curve = betmath::GrowthCurve::evaluate(&bet, &fractions).unwrap();
            let best = curve.argmax().unwrap();
            let want = (p - (1.0 - p) / d).max(0.0);
            worst = worst.max((best - want).abs());
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        count == 147 && worst <= KELLY_TOL + 1e-12 && elapsed < KELLY_TIME,
        format!(
            "{count} bets, max |argmax - (p - q/d)| = {worst:.1e}, {:.3}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn matching_pennies() -> Outcome {
    let closed = games::responder_expected_gain(0.6, 0.6, 100, 200.0).unwrap();
    let closed_ok = format!("{closed:.2}") == "8.00" && (closed - 8.0).abs() < 1e-12;

    // $200 over 100 games is $2 a game; report the gain per 100 games.
    let stakes = Stakes {
        stake: 2.0,
        rake: 0.0,
    };
    let mut p1 = Biased::new(0.6).unwrap();
    let mut p2 = Biased::tails(0.6).unwrap();
    let t = games::play_match_with(&mut p1, &mut p2, 1_000_000, 2017, stakes).unwrap();
    let (mean, se) = t.player2_mean();
    let (per100, se100) = (100.0 * mean, 100.0 * se);
    let mc_ok = (per100 - 8.0).abs() <= MC_SIGMAS * se100;

    let spy = games::spy_match(&mut CoinFlip, 100, 2017).unwrap();
    let spy_ok = spy.rounds.len() == 100 && spy.rounds.iter().all(|r| r.gain2 == 1.0);

    outcome(
        closed_ok && mc_ok && spy_ok,
        format!(
            "closed form ${closed:.2}; 10^6 rounds give ${per100:.3} ± {se100:.3} per 100 games; spy +1/round: {spy_ok}"
        ),
    )
}

fn critical_fraction() -> Outcome {
    let start = Instant::now();
    let bet = BetSpec::new(0.6, 1.0).unwrap();
    let fc = betmath::critical_fraction(&bet).unwrap();
    let g = betmath::asymptotic_growth(&bet, fc).unwrap();
    let root_ok = g.abs() < ROOT_TOL && fc > 0.38 && fc < 0.40;

    let cfg = SimConfig::new(bet, fc + 0.05, 100_000, 100, 2017).unwrap();
    let stats = wealthsim::simulate_path_stats(&cfg).unwrap();
    let negative = stats.iter().filter(|s| s.growth_rate < 0.0).count();
    let elapsed = start.elapsed();
    outcome(
        root_ok && negative >= 95 && elapsed < CRITICAL_TIME,
        format!(
            "f_c = {fc:.12}, |G(f_c)| = {:.1e}; {negative}/100 runs negative at f_c + 0.05",
            g.abs()
        ),
    )
}

fn grationality() -> Outcome {
    let bet = BetSpec::new(0.6, 1.0).unwrap();
    let budget = McBudget {
        n_paths: 2000,
        root_seed: 2017,
    };
    let step = 0.01;
    let problem = |kind, threshold, u| GrationalProblem {
        bet,
        n_steps: 500,
        loss_kind: kind,
        loss_threshold: threshold,
        max_prob: u,
    };
    let kelly = betmath::kelly_fraction(&bet);
    let free = grational::solve(&problem(LossKind::Drawdown, 0.5, 1.0), &budget, step).unwrap();
    let kelly_ok = (free.f_star - kelly).abs() <= step + 1e-12;

    let us: Vec<f64> = [0.05, 0.1, 0.2, 0.5]
        .iter()
        .map(|&u| {
            grational::solve(&problem(LossKind::Drawdown, 1.0, u), &budget, step)
                .unwrap()
                .f_star
        })
        .collect();
    let ts: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
        .iter()
        .map(|&t| {
            grational::solve(&problem(LossKind::Drawdown, t, 0.1), &budget, step)
                .unwrap()
                .f_star
        })
        .collect();
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);

    // One bet at f = 0.5: losing costs ln 2 > 0.5, so P[violation] = q.
    let one = McBudget {
        n_paths: 100_000,
        root_seed: 2017,
    };
    let est =
        grational::violation_probability(&bet, 0.5, 1, LossKind::WorstLoss, 0.5, &one).unwrap();
    let exact = 1.0 - bet.p();
    let binom_se = (exact * (1.0 - exact) / one.n_paths as f64).sqrt();
    let binom_ok = (est.mean - exact).abs() <= MC_SIGMAS * binom_se;

    outcome(
        kelly_ok && mono(&us) && mono(&ts) && binom_ok,
        format!(
            "u=1 gives {:.2} (Kelly {}); f* over u {us:?}; over threshold {ts:?}; n=1 violation {:.4} vs {}",
            free.f_star,
            safm::fmt::sig(kelly),
            est.mean,
            safm::fmt::sig(exact)
        ),
    )
}

fn loss_functionals() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for (i, (p, f)) in [(0.55, 0.1), (0.6, 0.2), (0.6, 0.5), (0.7, 0.9)]
        .iter()
        .enumerate()
    {
        let cfg = SimConfig::new(BetSpec::new(*p, 1.0).unwrap(), *f, 200, 2500, i as u64).unwrap();
        for path in wealthsim::simulate_paths(&cfg).unwrap() {
            let st = path.stats();
            let lw = &path.log_wealth;
            let ok = st.drawdown >= st.worst_loss
                && st.worst_loss >= 0.0
                && st.worst_loss == brute_worst_loss(lw)
                && st.drawdown == brute_drawdown(lw)
                && path.worst_loss() == brute_worst_loss(lw)
                && path.drawdown() == brute_drawdown(lw);
            checked += 1;
            if !ok {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{checked} paths, {bad} mismatches against brute-force scans"),
    )
}

fn runs_test() -> Outcome {
    let start = Instant::now();
    let mut checked = 0u64;
    let mut worst: f64 = 0.0;
    let mut structural = true;
    for n in 1..=12usize {
        let hist = runs_histogram(n);
        for mask in 0u64..(1 << n) {
            let seq: Vec<bool> = (0..n).map(|i| (mask >> i) & 1 == 1).collect();
            let rt = sysstats::runs_test(&seq);
            let n1 = mask.count_ones() as usize;
            let want = if n1 == 0 || n1 == n {
                structural &= rt.degenerate();
                1.0
            } else {
                enumerated_p_value(&hist, n1, rt.runs)
            };
            worst = worst.max((rt.p_value_too_few - want).abs());
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-12 && structural && elapsed < RUNS_TIME,
        format!("{checked} sequences, max |p - enumerated| = {worst:.1e}"),
    )
}

fn summary_table() -> Outcome {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let series = TradeSeries::read_csv(text.as_bytes()).unwrap();
    let rows = read_fixture(&text);
    let mut mismatches = Vec::new();
    for (filter, side) in [
        (Filter::Long, Some('L')),
        (Filter::Short, Some('S')),
        (Filter::All, None),
    ] {
        let got = sysstats::summarize(&series, filter).unwrap();
        let want = oracle_summary(&rows, side);
        let fields = [
            ("np", got.np == want.np),
            ("npi", got.npi == want.npi),
            ("runs", got.runs == want.runs),
            ("maxdd", close(got.maxdd, want.maxdd, FIELD_TOL)),
            ("pnlpp", close(got.pnlpp, want.pnlpp, FIELD_TOL)),
            ("pnltot", close(got.pnltot, want.pnltot, FIELD_TOL)),
            ("sdpnl", close(got.sdpnl, want.sdpnl, FIELD_TOL)),
            ("winpct", close(got.winpct, want.winpct, FIELD_TOL)),
            (
                "ir",
                match (got.ir, want.ir) {
                    (Some(a), Some(b)) => close(a, b, FIELD_TOL),
                    (None, None) => true,
                    _ => false,
                },
            ),
            ("runspvu", close(got.runspvu, want.runspvu, RUNSPVU_TOL)),
        ];
        for (name, ok) in fields {
            if !ok {
                mismatches.push(format!("{}.{name}", filter.label()));
            }
        }
    }
    let cum_ok = sysstats::cumulative_pnl(&series)
        .iter()
        .zip(rows.iter().scan(0.0, |acc, r| {
            *acc += r.2;
            Some(*acc)
        }))
        .all(|(pt, want)| (pt.cum_pnl - want).abs() < 1e-9);
    let years = sysstats::yearly_totals(&series, 4).unwrap();
    let total: f64 = years.iter().map(|y| y.pnl).sum();
    let avg = sysstats::average_per_year(&series, 4).unwrap();
    let avg3 = safm::fmt::sig_with(avg, 3);
    outcome(
        mismatches.is_empty()
            && cum_ok
            && years.len() == 19
            && (total - 623.5).abs() < 1e-9
            && avg3 == "32.8",
        format!(
            "3 rows x 10 fields, mismatches {mismatches:?}; {:.2} over {} years = {avg3} per year",
            total,
            years.len()
        ),
    )
}

fn miller() -> Outcome {
    let auction = AuctionSpec::new(50, 1000);
    let price =
        millerclear::clearing_price(&OpinionDistribution::normal(50.0, 10.0).unwrap(), &auction)
            .unwrap();
    let oracle = simpson_normal_quantile(50.0, 10.0, 0.95);
    let normal_ok = (price - 66.449).abs() <= MILLER_TOL && (price - oracle).abs() <= MILLER_TOL;

    let big = AuctionSpec::new(5000, 100_000);
    let sample = OpinionDistribution::sample_normal(50.0, 10.0, 100_000, 2017).unwrap();
    let emp = millerclear::clearing_price(&sample, &big).unwrap();
    let emp_ok = ((emp - price) / price).abs() <= EMPIRICAL_REL_TOL;

    let sds = [0.0, 2.0, 5.0, 10.0, 20.0, 40.0];
    let sweep = |n| millerclear::dispersion_sweep(50.0, &sds, &AuctionSpec::new(n, 1000)).unwrap();
    let high = sweep(50);
    let mid = sweep(500);
    let low = sweep(950);
    let up = high.windows(2).all(|w| w[1] > w[0]);
    let flat = mid.iter().all(|p| (p - 50.0).abs() < 1e-9);
    let down = low.windows(2).all(|w| w[1] < w[0]);

    let shorts = [0, 10, 50, 100, 250, 450, 950];
    let dist = OpinionDistribution::normal(50.0, 10.0).unwrap();
    let short = millerclear::short_selling_effect(&dist, &auction, &shorts).unwrap();
    let short_ok = short.windows(2).all(|w| w[1] <= w[0]);

    outcome(
        normal_ok && emp_ok && up && flat && down && short_ok,
        format!(
            "normal {price:.4} (oracle {oracle:.4}); empirical M=10^5 {emp:.4}; sd sweep up/flat/down {up}/{flat}/{down}; short sweep nonincreasing {short_ok}"
        ),
    )
}

fn popp_fidelity() -> Outcome {
    let self_ok = popp::phase_table().iter().all(|(phase, vars)| {
        let ranked = popp::classify_phase(vars);
        ranked[0].phase == *phase && ranked[0].score == 9 && !ranked[0].tied
    });

    use Phase::*;
    use TransitionKind::*;
    let expected: HashSet<(Phase, Stage, TransitionKind)> = [
        (Eureka, Stage::Phase(EarlyCopycat), Advance),
        (EarlyCopycat, Stage::Phase(LateCopycat), Bubble),
        (EarlyCopycat, Stage::Exit, Fizzle),
        (LateCopycat, Stage::Phase(Crash), Advance),
        (LateCopycat, Stage::Exit, Fizzle),
        (Crash, Stage::Phase(Eureka), Restart),
    ]
    .into_iter()
    .collect();
    let all = popp::all_transitions();
    let got: HashSet<_> = all.iter().map(|t| (t.from, t.to, t.kind)).collect();
    let arcs_ok = got == expected && all.len() == expected.len();

    let s = SizingSchedule::default();
    let m = |p| s.multiplier(p);
    let order_ok = m(Eureka) == m(EarlyCopycat)
        && m(EarlyCopycat) > m(LateCopycat)
        && m(LateCopycat) > m(Crash);
    let enforced = SizingSchedule::new(0.5, 0.5, 0.0).is_err()
        && SizingSchedule::new(1.0, 0.2, 0.3).is_err()
        && SizingSchedule::new(1.0, 0.4, 0.1).is_ok();

    outcome(
        self_ok && arcs_ok && order_ok && enforced,
        format!(
            "self-classification {self_ok}; {} arcs match {arcs_ok}; multipliers {}/{}/{}/{} with bad orders rejected {enforced}",
            all.len(),
            m(Eureka),
            m(EarlyCopycat),
            m(LateCopycat),
            m(Crash)
        ),
    )
}

fn determinism() -> Outcome {
    let fixture = fixture_path();
    let fixture = fixture.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["kelly", "--p", "0.6", "--format", "csv"],
        vec![
            "simulate", "--p", "0.6", "--steps", "500", "--paths", "64", "--format", "csv",
        ],
        vec![
            "simulate",
            "--p",
            "0.6",
            "--steps",
            "200",
            "--paths",
            "8",
            "--adaptive",
            "--format",
            "json",
        ],
        vec![
            "grational",
            "--p",
            "0.6",
            "--steps",
            "300",
            "--threshold",
            "0.7",
            "--u",
            "0.1",
            "--format",
            "csv",
        ],
        vec!["stats", "--input", fixture, "--format", "json"],
        vec![
            "pennies",
            "--p1",
            "biased:0.6",
            "--rounds",
            "2000",
            "--matches",
            "3",
            "--format",
            "csv",
        ],
        vec![
            "miller",
            "--empirical",
            "--buyers",
            "5000",
            "--shares",
            "250",
        ],
        vec!["popp", "+,=,+,=,=,=,+,?,+", "--p", "0.6"],
    ];
    let exe = env!("CARGO_BIN_EXE_safm");
    let run = |args: &[&str], threads: &str| {
        Command::new(exe)
            .args(args)
            .args(["--seed", "2017", "--threads", threads])
            .env_remove("GRATIONAL_SEED")
            .output()
            .expect("binary runs")
    };
    let mut failures = Vec::new();
    for args in &invocations {
        let a = run(args, "1");
        let b = run(args, "1");
        let c = run(args, "4");
        let ok = a.status.success()
            && !a.stdout.is_empty()
            && a.stdout == b.stdout
            && a.stdout == c.stdout;
        if !ok {
            failures.push(args[0]);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} invocations x (twice at 1 thread, once at 4); differing: {failures:?}",
            invocations.len()
        ),
    )
}

fn main() {
    let results = [
        criterion(1, "Kelly recovery", kelly_recovery),
        criterion(2, "Matching pennies", matching_pennies),
        criterion(3, "Critical fraction", critical_fraction),
        criterion(4, "Grationality solver", grationality),
        criterion(5, "Loss functionals", loss_functionals),
        criterion(6, "Runs test", runs_test),
        criterion(7, "Summary-table arithmetic", summary_table),
        criterion(8, "Miller clearing", miller),
        criterion(9, "POPP table fidelity", popp_fidelity),
        criterion(10, "Determinism", determinism),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
