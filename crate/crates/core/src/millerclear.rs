//! Auction clearing under divergence of opinion.
//!
//! `M` potential buyers each hold a private price estimate and demand one
//! share at any price up to that estimate. With `N` shares offered plus `s`
//! shares supplied by short sellers, the market clears at the
//! `(N + s)`-th highest estimate: the marginal optimist sets the price.
//!
//! For a continuous opinion distribution the clearing price is the quantile
//! at level `1 − (N + s)/M`. It exceeds the mean estimate whenever fewer than
//! half the buyers are needed, rises with dispersion in that regime, and
//! falls as short sales add supply.

use rand_distr::{Distribution, Normal as NormalSampler};
use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::{self, ns};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum OpinionDistribution {
    /// Normal estimates; with `truncate` the distribution is conditioned on
    /// positive prices.
    Normal { mean: f64, sd: f64, truncate: bool },
    /// One estimate per buyer.
    Empirical(Vec<f64>),
}

impl OpinionDistribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        let d = OpinionDistribution::Normal {
            mean,
            sd,
            truncate: false,
        };
        d.validate()?;
        Ok(d)
    }

    /// Draws `m` estimates from `Normal(mean, sd)` using the seeded auction
    /// stream.
    pub fn sample_normal(mean: f64, sd: f64, m: usize, seed: u64) -> Result<Self> {
        Self::normal(mean, sd)?;
        if m == 0 {
            return Err(Error::domain("m_buyers", 0.0, "M >= 1"));
        }
        let sampler = NormalSampler::new(mean, sd)
            .map_err(|e| Error::Config(format!("normal sampler: {e}")))?;
        let mut rng = rng::stream(seed, ns::AUCTION);
        Ok(OpinionDistribution::Empirical(
            (0..m).map(|_| sampler.sample(&mut rng)).collect(),
        ))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OpinionDistribution::Normal { mean, sd, .. } => {
                if !mean.is_finite() {
                    return Err(Error::domain("mean", *mean, "finite"));
                }
                if !(*sd >= 0.0 && sd.is_finite()) {
                    return Err(Error::domain("sd", *sd, "sd >= 0"));
                }
            }
            OpinionDistribution::Empirical(xs) => {
                if xs.is_empty() {
                    return Err(Error::Config("empirical opinions must be nonempty".into()));
                }
                if xs.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Config("empirical opinions must be finite".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuctionSpec {
    pub n_shares: usize,
    pub m_buyers: usize,
    pub short_supply: usize,
}

impl AuctionSpec {
    pub fn new(n_shares: usize, m_buyers: usize) -> Self {
        Self {
            n_shares,
            m_buyers,
            short_supply: 0,
        }
    }

    pub fn with_short_supply(self, short_supply: usize) -> Self {
        Self {
            short_supply,
            ..self
        }
    }

    pub fn supply(&self) -> usize {
        self.n_shares + self.short_supply
    }

    /// Quantile level `1 − supply/M` that clears the market.
    pub fn clearing_level(&self) -> f64 {
        1.0 - self.supply() as f64 / self.m_buyers as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_buyers == 0 || self.supply() == 0 || self.supply() > self.m_buyers {
            return Err(Error::NoClear {
                supply: self.supply(),
                buyers: self.m_buyers,
            });
        }
        Ok(())
    }
}

/// Clearing price for `auction` under `dist`.
///
/// Empirical opinions must list exactly `m_buyers` estimates.
pub fn clearing_price(dist: &OpinionDistribution, auction: &AuctionSpec) -> Result<f64> {
    dist.validate()?;
    auction.validate()?;
    match dist {
        OpinionDistribution::Normal { mean, sd, truncate } => Ok(normal_quantile(
            *mean,
            *sd,
            *truncate,
            auction.clearing_level(),
        )),
        OpinionDistribution::Empirical(xs) => {
            if xs.len() != auction.m_buyers {
                return Err(Error::Config(format!(
                    "{} opinions for {} buyers",
                    xs.len(),
                    auction.m_buyers
                )));
            }
            Ok(kth_highest(xs, auction.supply()))
        }
    }
}

/// The `k`-th highest value (1-based).
fn kth_highest(xs: &[f64], k: usize) -> f64 {
    let mut v = xs.to_vec();
    let idx = k - 1;
    let (_, kth, _) = v.select_nth_unstable_by(idx, |a, b| b.total_cmp(a));
    *kth
}

fn normal_quantile(mean: f64, sd: f64, truncate: bool, level: f64) -> f64 {
    if sd == 0.0 {
        return if truncate { mean.max(0.0) } else { mean };
    }
    let std = Normal::standard();
    let level = if truncate {
        // Quantile of the normal conditioned on price > 0.
        let below_zero = std.cdf(-mean / sd);
        below_zero + level * (1.0 - below_zero)
    } else {
        level
    };
    if level <= 0.0 {
        return if truncate { 0.0 } else { f64::NEG_INFINITY };
    }
    if level >= 1.0 {
        return f64::INFINITY;
    }
    mean + sd * std.inverse_cdf(level)
}

/// Standard error of the empirical clearing price as an order statistic,
/// `sqrt(level·(1 − level)/M) / pdf(quantile)`, for normal opinions.
pub fn order_statistic_se(mean: f64, sd: f64, auction: &AuctionSpec) -> Result<f64> {
    auction.validate()?;
    if !(sd > 0.0) {
        return Ok(0.0);
    }
    let level = auction.clearing_level();
    let q = normal_quantile(mean, sd, false, level);
    let dens = Normal::new(mean, sd)
        .map_err(|e| Error::Config(e.to_string()))?
        .pdf(q);
    Ok((level * (1.0 - level) / auction.m_buyers as f64).sqrt() / dens)
}

/// Clearing prices for normal opinions at each of `sds`.
pub fn dispersion_sweep(mean: f64, sds: &[f64], auction: &AuctionSpec) -> Result<Vec<f64>> {
    if sds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sds must be nondecreasing".into()));
    }
    sds.iter()
        .map(|&sd| clearing_price(&OpinionDistribution::normal(mean, sd)?, auction))
        .collect()
}

/// Clearing prices as short sellers add each of `short_supplies` shares.
pub fn short_selling_effect(
    dist: &OpinionDistribution,
    auction: &AuctionSpec,
    short_supplies: &[usize],
) -> Result<Vec<f64>> {
    short_supplies
        .iter()
        .map(|&s| clearing_price(dist, &auction.with_short_supply(s)))
        .collect()
}

/// Price of an immediate second auction of the same supply among the buyers
/// who did not win the first one.
pub fn reauction_price(opinions: &[f64], auction: &AuctionSpec) -> Result<f64> {
    auction.validate()?;
    if opinions.len() != auction.m_buyers {
        return Err(Error::Config(format!(
            "{} opinions for {} buyers",
            opinions.len(),
            auction.m_buyers
        )));
    }
    let supply = auction.supply();
    let remaining = auction.m_buyers - supply;
    if supply > remaining {
        return Err(Error::NoClear {
            supply,
            buyers: remaining,
        });
    }
    Ok(kth_highest(opinions, 2 * supply))
}
