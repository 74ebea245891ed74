//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numerical code: each routine is a
//! deliberately naive second implementation of the quantity under test.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/trades.csv")
}

/// `max_s (lw[0] − lw[s])`, floored at zero, by direct scan.
pub fn brute_worst_loss(lw: &[f64]) -> f64 {
    let mut worst = 0.0;
    for s in 0..lw.len() {
        let loss = lw[0] - lw[s];
        if loss > worst {
            worst = loss;
        }
    }
    worst
}

/// `max_{i <= j} (lw[i] − lw[j])` over every pair.
pub fn brute_drawdown(lw: &[f64]) -> f64 {
    let mut worst = 0.0;
    for i in 0..lw.len() {
        for j in i..lw.len() {
            let d = lw[i] - lw[j];
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn runs_of_mask(mask: u64, n: usize) -> usize {
    let mut runs = 1;
    for i in 1..n {
        if (mask >> i) & 1 != (mask >> (i - 1)) & 1 {
            runs += 1;
        }
    }
    runs
}

/// `hist[n1][r]`: number of length-`n` binary strings with `n1` ones and
/// `r` runs, by walking all `2^n` strings.
pub fn runs_histogram(n: usize) -> Vec<Vec<u64>> {
    let mut hist = vec![vec![0u64; n + 1]; n + 1];
    for mask in 0u64..(1u64 << n) {
        let ones = mask.count_ones() as usize;
        hist[ones][runs_of_mask(mask, n)] += 1;
    }
    hist
}

/// `P[R <= runs]` over all arrangements with `n1` ones, read from a
/// [`runs_histogram`] table.
pub fn enumerated_p_value(hist: &[Vec<u64>], n1: usize, runs: usize) -> f64 {
    let row = &hist[n1];
    let total: u64 = row.iter().sum();
    let tail: u64 = row[..=runs].iter().sum();
    tail as f64 / total as f64
}

/// Enumerated too-few-runs p-value for a sequence of up to 30 outcomes.
pub fn enumerated_runs_p(outcomes: &[bool]) -> f64 {
    let n = outcomes.len();
    assert!(n <= 30);
    let n1 = outcomes.iter().filter(|&&w| w).count();
    let observed = 1 + outcomes.windows(2).filter(|w| w[0] != w[1]).count();
    if n1 == 0 || n1 == n {
        return 1.0;
    }
    let (mut tail, mut total) = (0u64, 0u64);
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        total += 1;
        if runs_of_mask(mask, n) <= observed {
            tail += 1;
        }
    }
    tail as f64 / total as f64
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF by composite Simpson integration of the density
/// from 0.
pub fn simpson_normal_cdf(z: f64) -> f64 {
    let n = 20_000;
    let h = z / n as f64;
    let mut acc = std_normal_pdf(0.0) + std_normal_pdf(z);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * std_normal_pdf(i as f64 * h);
    }
    0.5 + acc * h / 3.0
}

/// Normal quantile by bisection on [`simpson_normal_cdf`].
pub fn simpson_normal_quantile(mean: f64, sd: f64, level: f64) -> f64 {
    let (mut lo, mut hi) = (-12.0, 12.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if simpson_normal_cdf(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mean + sd * 0.5 * (lo + hi)
}

#[derive(Debug, Clone)]
pub struct OracleRow {
    pub np: usize,
    pub npi: usize,
    pub maxdd: f64,
    pub pnlpp: f64,
    pub ir: Option<f64>,
    pub pnltot: f64,
    pub sdpnl: f64,
    pub winpct: f64,
    pub runs: usize,
    pub runspvu: f64,
}

/// Parses a `period_id,side,pnl` file by hand.
pub fn read_fixture(text: &str) -> Vec<(i64, char, f64)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let parts: Vec<&str> = l.split(',').collect();
            (
                parts[0].trim().parse().unwrap(),
                parts[1].trim().chars().next().unwrap(),
                parts[2].trim().parse().unwrap(),
            )
        })
        .collect()
}

/// Summary row computed the way a spreadsheet would: explicit loops,
/// an O(n²) drawdown scan, enumerated runs p-values for short samples and a
/// Simpson-integrated normal tail for long ones.
pub fn oracle_summary(rows: &[(i64, char, f64)], side: Option<char>) -> OracleRow {
    let universe: Vec<&(i64, char, f64)> = rows
        .iter()
        .filter(|r| side.is_none_or(|s| r.1 == s))
        .collect();
    let pnl: Vec<f64> = universe
        .iter()
        .filter(|r| r.1 != 'F')
        .map(|r| r.2)
        .collect();
    let npi = pnl.len();

    let mut total = 0.0;
    for x in &pnl {
        total += x;
    }
    let mean = total / npi as f64;
    let mut ss = 0.0;
    for x in &pnl {
        ss += (x - mean) * (x - mean);
    }
    let sd = (ss / (npi as f64 - 1.0)).sqrt();

    let mut cum = vec![0.0];
    for x in &pnl {
        let last = *cum.last().unwrap();
        cum.push(last + x);
    }
    let maxdd = brute_drawdown(&cum);

    let mut wins = 0;
    for x in &pnl {
        if *x > 0.0 {
            wins += 1;
        }
    }

    // Zero periods continue whatever run is in progress.
    let mut outcomes = Vec::new();
    let mut state: Option<bool> = None;
    let mut pending = 0;
    for x in &pnl {
        if *x == 0.0 {
            match state {
                Some(s) => outcomes.push(s),
                None => pending += 1,
            }
        } else {
            let s = *x > 0.0;
            if state.is_none() {
                outcomes.extend(std::iter::repeat_n(s, pending));
            }
            state = Some(s);
            outcomes.push(s);
        }
    }
    if state.is_none() {
        outcomes.extend(std::iter::repeat_n(false, pending));
    }
    let runs = 1 + outcomes.windows(2).filter(|w| w[0] != w[1]).count();
    let n1 = outcomes.iter().filter(|&&w| w).count();
    let n2 = outcomes.len() - n1;
    let runspvu = if n1 == 0 || n2 == 0 {
        1.0
    } else if outcomes.len() <= 30 {
        enumerated_runs_p(&outcomes)
    } else {
        let (a, b) = (n1 as f64, n2 as f64);
        let n = a + b;
        let mu = 2.0 * a * b / n + 1.0;
        let var = 2.0 * a * b * (2.0 * a * b - n) / (n * n * (n - 1.0));
        simpson_normal_cdf((runs as f64 + 0.5 - mu) / var.sqrt())
    };

    OracleRow {
        np: universe.len(),
        npi,
        maxdd,
        pnlpp: mean,
        ir: if sd > 0.0 { Some(mean / sd) } else { None },
        pnltot: total,
        sdpnl: sd,
        winpct: 100.0 * wins as f64 / npi as f64,
        runs,
        runspvu,
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
