//! Link-level simulation and outage analysis for user-selection based
//! cooperative relaying (US-LCRP) in multiuser amplify-and-forward networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`fading`] builds network geometries, derives link variances from path
//!   loss and draws Rayleigh block-fading coefficients from keyed streams.
//! * [`protocol`] runs one transmission round of US-LCRP and of the two
//!   two-slot benchmark schemes (two-step selection and user-relay pair
//!   selection), producing a full [`protocol::TransmissionTrace`].
//! * [`analysis`] holds the closed forms: `K₁`, per-slot CDFs, the
//!   order-statistic outage CDF, the symmetric-network bounds and the
//!   diversity-multiplexing tradeoff curves.
//! * [`montecarlo`] is the seeded, parallel outage estimator.
//! * [`config`] and [`cli`] wire experiment files and presets to CSV output.
//!
//! Indices in the Rust API are zero-based. The textual trace format and the
//! CSV files use the conventions documented on the respective writers.

pub mod analysis;
pub mod cli;
pub mod config;
mod error;
pub mod fading;
pub mod montecarlo;
pub mod protocol;
pub mod stream;
pub mod validate;

pub use error::{Error, Result};
