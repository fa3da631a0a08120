//! Outage bounds from symmetric auxiliary networks.
//!
//! When every source shares one source-relay rate per relay, the AF slot CDF
//! no longer depends on which block a relay forwards and the outage
//! probability is an exact Poisson-binomial tail. Replacing each relay's
//! source-relay rates by their maximum (weakest links) gives an upper bound,
//! by their minimum a lower bound.

use super::cdf::{af_slot_cdf, direct_slot_cdf, order_stat_cdf};
use super::outage_threshold;
use crate::fading::{NetworkModel, PowerProfile};
use crate::{Error, Result};

/// Exponential rates `λ = N₀ / (E_s γ)` of every link SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct RateParams {
    lambda_sd: Vec<f64>,
    lambda_sr: Vec<Vec<f64>>,
    lambda_rd: Vec<f64>,
}

impl RateParams {
    pub fn new(lambda_sd: Vec<f64>, lambda_sr: Vec<Vec<f64>>, lambda_rd: Vec<f64>) -> Result<Self> {
        let positive = |v: &f64| v.is_finite() && *v > 0.0;
        if lambda_sd.is_empty() || lambda_sr.len() != lambda_sd.len() {
            return Err(Error::InvalidNetwork("rate table dimensions do not match".into()));
        }
        if lambda_sr.iter().any(|row| row.len() != lambda_rd.len()) {
            return Err(Error::InvalidNetwork("rate table dimensions do not match".into()));
        }
        if !(lambda_sd.iter().all(positive)
            && lambda_rd.iter().all(positive)
            && lambda_sr.iter().flatten().all(positive))
        {
            return Err(Error::InvalidNetwork("rates must be positive and finite".into()));
        }
        Ok(RateParams { lambda_sd, lambda_sr, lambda_rd })
    }

    pub fn from_model(model: &NetworkModel, power: &PowerProfile) -> Self {
        let scale = power.n0() / power.es();
        let rate = |gamma: &f64| scale / gamma;
        RateParams {
            lambda_sd: model.var_sd().iter().map(rate).collect(),
            lambda_sr: model.var_sr().iter().map(|row| row.iter().map(rate).collect()).collect(),
            lambda_rd: model.var_rd().iter().map(rate).collect(),
        }
    }

    pub fn n_users(&self) -> usize {
        self.lambda_sd.len()
    }

    pub fn n_relays(&self) -> usize {
        self.lambda_rd.len()
    }

    pub fn lambda_sd(&self) -> &[f64] {
        &self.lambda_sd
    }

    pub fn lambda_sr(&self) -> &[Vec<f64>] {
        &self.lambda_sr
    }

    pub fn lambda_rd(&self) -> &[f64] {
        &self.lambda_rd
    }

    /// Per-relay source-relay rate of the bounding symmetric network.
    pub fn symmetric_source_relay(&self, bound: Bound) -> Vec<f64> {
        (0..self.n_relays())
            .map(|m| {
                let column = self.lambda_sr.iter().map(|row| row[m]);
                match bound {
                    Bound::Upper => column.fold(f64::NEG_INFINITY, f64::max),
                    Bound::Lower => column.fold(f64::INFINITY, f64::min),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Weakest source-relay link per relay.
    Upper,
    /// Strongest source-relay link per relay.
    Lower,
}

/// Exact US-LCRP outage probability of a symmetric network at threshold `beta`.
pub fn symmetric_network_outage(
    lambda_sd: &[f64],
    lambda_sr_per_relay: &[f64],
    lambda_rd: &[f64],
    n_broadcast_slots: usize,
    beta: f64,
) -> f64 {
    let direct = direct_slot_cdf(beta, lambda_sd);
    let mut probs = vec![direct; n_broadcast_slots];
    probs.extend(
        lambda_sr_per_relay
            .iter()
            .zip(lambda_rd)
            .map(|(&sr, &rd)| af_slot_cdf(beta, sr, rd)),
    );
    order_stat_cdf(&probs, lambda_rd.len() + 1)
}

/// Upper (`P′`) or lower (`P″`) bound on US-LCRP outage at end-to-end rate `rate`.
pub fn symmetric_bound_outage(
    rates: &RateParams,
    n_broadcast_slots: usize,
    rate: f64,
    bound: Bound,
) -> f64 {
    let beta = outage_threshold(rate, n_broadcast_slots, rates.n_relays());
    symmetric_network_outage(
        &rates.lambda_sd,
        &rates.symmetric_source_relay(bound),
        &rates.lambda_rd,
        n_broadcast_slots,
        beta,
    )
}
