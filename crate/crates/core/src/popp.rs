//! The Pursuit-of-Profits lifecycle of a trading strategy.
//!
//! Each of the four phases is characterized by the expected qualitative
//! level of nine state variables:
//!
//! | var   | meaning                              |
//! |-------|--------------------------------------|
//! | RET   | capitalization-weighted returns      |
//! | VOL   | volatility of returns                |
//! | SR    | Sharpe ratio, (RET − risk-free)/VOL  |
//! | SP$   | funds allocated to the strategy      |
//! | POP   | number of implementors               |
//! | LEV   | leverage                             |
//! | SDIV  | strategy diversity                   |
//! | SLINK | strategy linkage                     |
//! | SROB  | strategy robustness                  |
//!
//! The phases run Eureka → Early Copycat → Late Copycat → Crash and restart
//! at Eureka. Copycat phases may instead fizzle out of the cycle.

use std::fmt;

use serde::Serialize;

use crate::betmath::{kelly_fraction, BetSpec};
use crate::error::{Error, Result};

/// Qualitative level of a state variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Level {
    /// `--`
    StrongNeg,
    /// `-`
    Neg,
    /// `=`
    Flat,
    /// `+`
    Pos,
    /// `++`
    StrongPos,
    /// `?`: unknown; matches anything when it appears in the phase table.
    Unknown,
    /// `NA`: not applicable.
    NA,
}

impl Level {
    pub fn symbol(self) -> &'static str {
        match self {
            Level::StrongNeg => "--",
            Level::Neg => "-",
            Level::Flat => "=",
            Level::Pos => "+",
            Level::StrongPos => "++",
            Level::Unknown => "?",
            Level::NA => "NA",
        }
    }

    /// Whether an observed level agrees with this expected level.
    pub fn admits(self, observed: Level) -> bool {
        match self {
            Level::Unknown => true,
            expected => expected == observed,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "--" => Level::StrongNeg,
            "-" => Level::Neg,
            "=" => Level::Flat,
            "+" => Level::Pos,
            "++" => Level::StrongPos,
            "?" => Level::Unknown,
            "NA" | "na" => Level::NA,
            other => return Err(Error::Parse(format!("unknown level '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StateVars {
    pub ret: Level,
    pub vol: Level,
    pub sr: Level,
    pub spd: Level,
    pub pop: Level,
    pub lev: Level,
    pub sdiv: Level,
    pub slink: Level,
    pub srob: Level,
}

impl StateVars {
    pub const NAMES: [&'static str; 9] = [
        "RET", "VOL", "SR", "SP$", "POP", "LEV", "SDIV", "SLINK", "SROB",
    ];

    pub fn from_array(v: [Level; 9]) -> Self {
        let [ret, vol, sr, spd, pop, lev, sdiv, slink, srob] = v;
        Self {
            ret,
            vol,
            sr,
            spd,
            pop,
            lev,
            sdiv,
            slink,
            srob,
        }
    }

    pub fn to_array(self) -> [Level; 9] {
        [
            self.ret, self.vol, self.sr, self.spd, self.pop, self.lev, self.sdiv, self.slink,
            self.srob,
        ]
    }

    pub fn all(level: Level) -> Self {
        Self::from_array([level; 9])
    }
}

impl fmt::Display for StateVars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.to_array().iter().map(|l| l.symbol()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses nine comma-separated levels in `RET,VOL,SR,SP$,POP,LEV,SDIV,SLINK,SROB`
/// order.
impl std::str::FromStr for StateVars {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Level>>>()?;
        let arr: [Level; 9] = levels
            .try_into()
            .map_err(|v: Vec<Level>| Error::Parse(format!("expected 9 levels, got {}", v.len())))?;
        Ok(Self::from_array(arr))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Phase {
    Eureka,
    EarlyCopycat,
    LateCopycat,
    Crash,
}

impl Phase {
    pub const ALL: [Phase; 4] = [
        Phase::Eureka,
        Phase::EarlyCopycat,
        Phase::LateCopycat,
        Phase::Crash,
    ];

    pub fn letter(self) -> char {
        match self {
            Phase::Eureka => 'A',
            Phase::EarlyCopycat => 'B',
            Phase::LateCopycat => 'C',
            Phase::Crash => 'D',
        }
    }

    /// Expected state-variable levels in this phase.
    pub fn expected(self) -> StateVars {
        use Level::*;
        match self {
            Phase::Eureka => {
                StateVars::from_array([StrongPos, Pos, Pos, Neg, Neg, Neg, Pos, Unknown, Pos])
            }
            Phase::EarlyCopycat => {
                StateVars::from_array([Pos, Flat, Pos, Flat, Flat, Flat, Pos, Unknown, Pos])
            }
            Phase::LateCopycat => StateVars::from_array([
                Neg, Neg, Neg, StrongPos, StrongPos, StrongPos, Neg, Unknown, Neg,
            ]),
            Phase::Crash => StateVars::all(NA),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Eureka => "Eureka",
            Phase::EarlyCopycat => "EarlyCopycat",
            Phase::LateCopycat => "LateCopycat",
            Phase::Crash => "Crash",
        })
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" | "eureka" => Phase::Eureka,
            "b" | "earlycopycat" | "early_copycat" | "early" => Phase::EarlyCopycat,
            "c" | "latecopycat" | "late_copycat" | "late" => Phase::LateCopycat,
            "d" | "crash" => Phase::Crash,
            other => return Err(Error::Parse(format!("unknown phase '{other}'"))),
        })
    }
}

/// The four phases with their expected levels, in lifecycle order.
pub fn phase_table() -> [(Phase, StateVars); 4] {
    Phase::ALL.map(|p| (p, p.expected()))
}

/// Where a transition lands: another phase, or out of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stage {
    Phase(Phase),
    /// Absorbing exit after a fizzle.
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TransitionKind {
    Advance,
    Bubble,
    Fizzle,
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Transition {
    pub from: Phase,
    pub to: Stage,
    pub kind: TransitionKind,
}

/// Arcs leaving `from`.
pub fn legal_transitions(from: Phase) -> Vec<Transition> {
    use Stage::Exit;
    use TransitionKind::*;
    let arc = |to, kind| Transition { from, to, kind };
    match from {
        Phase::Eureka => vec![arc(Stage::Phase(Phase::EarlyCopycat), Advance)],
        Phase::EarlyCopycat => vec![
            arc(Stage::Phase(Phase::LateCopycat), Bubble),
            arc(Exit, Fizzle),
        ],
        Phase::LateCopycat => vec![arc(Stage::Phase(Phase::Crash), Advance), arc(Exit, Fizzle)],
        Phase::Crash => vec![arc(Stage::Phase(Phase::Eureka), Restart)],
    }
}

/// Every arc of the lifecycle graph.
pub fn all_transitions() -> Vec<Transition> {
    Phase::ALL.into_iter().flat_map(legal_transitions).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseMatch {
    pub phase: Phase,
    /// Number of the nine variables that agree with the phase table.
    pub score: u8,
    /// Shares its score with another phase.
    pub tied: bool,
}

/// Scores `observed` against every phase, best first.
///
/// A field matches when the table entry is `?` or equals the observation;
/// `NA` is an ordinary literal and only matches `NA`. Equal scores keep
/// lifecycle order and are flagged as tied.
pub fn classify_phase(observed: &StateVars) -> Vec<PhaseMatch> {
    let obs = observed.to_array();
    let mut ranked: Vec<PhaseMatch> = Phase::ALL
        .iter()
        .map(|&phase| {
            let score = phase
                .expected()
                .to_array()
                .iter()
                .zip(&obs)
                .filter(|(e, o)| e.admits(**o))
                .count() as u8;
            PhaseMatch {
                phase,
                score,
                tied: false,
            }
        })
        .collect();
    ranked.sort_by(|a, b| b.score.cmp(&a.score).then(a.phase.cmp(&b.phase)));
    let scores: Vec<u8> = ranked.iter().map(|m| m.score).collect();
    for m in &mut ranked {
        m.tied = scores.iter().filter(|&&s| s == m.score).count() > 1;
    }
    ranked
}

/// Kelly scale per phase: largest bets early in the cycle, smaller once
/// copycats crowd in, none in a crash.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizingSchedule {
    early: f64,
    late: f64,
    crash: f64,
}

impl Default for SizingSchedule {
    fn default() -> Self {
        Self {
            early: 1.0,
            late: 0.5,
            crash: 0.0,
        }
    }
}

impl SizingSchedule {
    /// `early` applies to both Eureka and Early Copycat. Requires
    /// `1 >= early > late > crash >= 0`.
    pub fn new(early: f64, late: f64, crash: f64) -> Result<Self> {
        let ordered = (0.0..=1.0).contains(&early)
            && (0.0..=1.0).contains(&late)
            && (0.0..=1.0).contains(&crash)
            && early > late
            && late > crash;
        if !ordered {
            return Err(Error::Config(format!(
                "sizing must satisfy 1 >= A = B > C > D >= 0, got A = B = {early}, C = {late}, D = {crash}"
            )));
        }
        Ok(Self { early, late, crash })
    }

    pub fn multiplier(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Eureka | Phase::EarlyCopycat => self.early,
            Phase::LateCopycat => self.late,
            Phase::Crash => self.crash,
        }
    }

    /// `multiplier(phase) × f*`.
    pub fn effective_fraction(&self, phase: Phase, bet: &BetSpec) -> f64 {
        self.multiplier(phase) * kelly_fraction(bet)
    }
}

/// Multiplier under the default schedule.
pub fn kelly_multiplier(phase: Phase) -> f64 {
    SizingSchedule::default().multiplier(phase)
}
