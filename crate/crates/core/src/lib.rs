//! Quantitative tooling for fixed-fraction betting and strategy analysis.
//!
//! The crate is organised by capability:
//!
//! - [`betmath`]: closed-form Kelly fractions, asymptotic growth and the
//!   critical (ruin) fraction for a biased-coin wager at odds `d`.
//! - [`wealthsim`]: seeded simulation of fixed-fraction wealth processes,
//!   realized growth, the worst-loss and drawdown functionals, and the
//!   adaptive plug-in policy.
//! - [`grational`]: maximize expected growth subject to a cap on the
//!   probability of a large loss, solved by grid search over common random
//!   numbers.
//! - [`sysstats`]: trading-system P&L summaries (np, npi, maxdd, ... runspvu),
//!   the exact runs test and sign classification of a system's edge.
//! - [`games`]: matching pennies with pattern exploitation and disclosure.
//! - [`millerclear`]: unit-demand auction clearing under divergent opinions.
//! - [`popp`]: the four-phase strategy lifecycle as a sign-table state machine.
//! - [`cli`]: the `safm` command-line front end.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod betmath;
pub mod cli;
pub mod error;
pub mod fmt;
pub mod games;
pub mod grational;
pub mod millerclear;
pub mod popp;
pub mod rng;
pub mod sysstats;
pub mod wealthsim;

pub use error::{Error, Result};
