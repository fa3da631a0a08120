//! Closed-form outage machinery.
//!
//! With `U` the `L + M` SNRs received in a US-LCRP round, the combined SNRs
//! are the `L` largest elements of `U`. A system outage is therefore the event
//! that at least `M + 1` entries of `U` fall at or below `β`, which only needs
//! the per-slot CDFs and a Poisson-binomial tail.

mod bessel;
mod bounds;
mod cdf;
mod dmt;

pub use bessel::{bessel_k1, bessel_k1_scaled, x_bessel_k1};
pub use bounds::{symmetric_bound_outage, symmetric_network_outage, Bound, RateParams};
pub use cdf::{af_slot_cdf, direct_slot_cdf, order_stat_cdf};
pub use dmt::{dmt_baseline, dmt_miso, dmt_us_lcrp, DmtPoint};

/// SNR threshold `2^((L+M)/L · R) − 1` below which a US-LCRP block fails.
pub fn outage_threshold(rate: f64, n_broadcast_slots: usize, n_relays: usize) -> f64 {
    let expansion = (n_broadcast_slots + n_relays) as f64 / n_broadcast_slots as f64;
    (expansion * rate).exp2() - 1.0
}
