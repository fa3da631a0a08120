//! Seeded, parallel outage estimation.
//!
//! Trial `t` of every cell reads its fading from the stream keyed by
//! `(seed, t)`, so cells of one sweep share common random numbers and the
//! outcome does not depend on how trials are spread across workers. Outage
//! counts are integers, which makes the parallel reduction order-exact.
//!
//! Eb/N0 is taken to be the effective SNR `ρ`, i.e. transmit `E_s/N_0` scaled
//! by the fraction of the round's slots that carry fresh data: `L/(L+M)` for
//! US-LCRP and `1/2` for the two-slot benchmarks.

use std::borrow::Cow;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fading::{sample_topology, ChannelStream, Layout, NetworkModel, PowerProfile};
use crate::protocol::{run_round, system_outage, ProtocolConfig, Scheme};
use crate::stream::{keyed_rng, Domain};
use crate::{Error, Result};

/// Two-sided 95 % normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const BATCH: u64 = 2048;

/// Where each trial's network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologySource {
    /// One network for every trial.
    Fixed(NetworkModel),
    /// A fresh geometry per trial.
    PerTrial {
        n_users: usize,
        n_relays: usize,
        layout: Layout,
        pathloss_exponent: f64,
    },
}

impl TopologySource {
    pub fn n_users(&self) -> usize {
        match self {
            TopologySource::Fixed(m) => m.n_users(),
            TopologySource::PerTrial { n_users, .. } => *n_users,
        }
    }

    pub fn n_relays(&self) -> usize {
        match self {
            TopologySource::Fixed(m) => m.n_relays(),
            TopologySource::PerTrial { n_relays, .. } => *n_relays,
        }
    }

    pub fn model_for(&self, seed: u64, trial: u64) -> Result<Cow<'_, NetworkModel>> {
        match self {
            TopologySource::Fixed(m) => Ok(Cow::Borrowed(m)),
            TopologySource::PerTrial { n_users, n_relays, layout, pathloss_exponent } => {
                let mut rng = keyed_rng(seed, Domain::TrialTopology, trial, 0);
                sample_topology(&mut rng, *n_users, *n_relays, *layout, *pathloss_exponent)
                    .map(Cow::Owned)
            }
        }
    }
}

/// The network an experiment with this seed and size uses in fixed-topology mode.
pub fn fixed_topology(
    seed: u64,
    n_users: usize,
    n_relays: usize,
    layout: Layout,
    pathloss_exponent: f64,
) -> Result<NetworkModel> {
    let mut rng = keyed_rng(seed, Domain::Topology, n_users as u64, n_relays as u64);
    sample_topology(&mut rng, n_users, n_relays, layout, pathloss_exponent)
}

/// Transmit power that realises effective SNR `ebn0_db` for `scheme`.
pub fn power_for(
    scheme: Scheme,
    n_broadcast_slots: usize,
    n_relays: usize,
    ebn0_db: f64,
) -> Result<PowerProfile> {
    let rho = db_to_linear(ebn0_db);
    PowerProfile::from_es_n0(rho / scheme.duty_factor(n_broadcast_slots, n_relays))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Counts, point estimate and 95 % interval of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub outages: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl OutageEstimate {
    /// Wilson score interval; with no outages the interval is the exact
    /// one-sided `[0, 1 − 0.05^(1/n)]`.
    pub fn from_counts(outages: u64, trials: u64) -> Self {
        assert!(trials > 0 && outages <= trials);
        let n = trials as f64;
        let p_hat = outages as f64 / n;
        if outages == 0 {
            return OutageEstimate {
                outages,
                trials,
                p_hat,
                ci_low: 0.0,
                ci_high: -(0.05f64.ln() / n).exp_m1(),
            };
        }
        let (low, high) = wilson_interval(outages, trials, Z_95);
        OutageEstimate {
            outages,
            trials,
            p_hat,
            ci_low: low.min(p_hat),
            ci_high: high.max(p_hat),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// How many trials a cell runs.
///
/// Starts at `min_trials` and doubles until `target_outages` outages have been
/// seen or `max_trials` is reached, so a cell at outage level `p` ends up with
/// roughly `target_outages / p` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialBudget {
    pub min_trials: u64,
    pub max_trials: u64,
    pub target_outages: u64,
}

impl TrialBudget {
    pub fn fixed(trials: u64) -> Self {
        TrialBudget { min_trials: trials, max_trials: trials, target_outages: 0 }
    }

    pub fn adaptive(min_trials: u64, max_trials: u64) -> Self {
        TrialBudget { min_trials, max_trials: max_trials.max(min_trials), target_outages: 100 }
    }

    fn validate(&self) -> Result<()> {
        if self.min_trials == 0 {
            return Err(Error::config("trials", "at least one trial per cell is required"));
        }
        if self.max_trials < self.min_trials {
            return Err(Error::config("max_trials", "must not be below trials"));
        }
        Ok(())
    }
}

/// One `(scheme, Eb/N0, rate)` point.
#[derive(Debug, Clone, Copy)]
pub struct Cell<'a> {
    pub scheme: Scheme,
    pub topology: &'a TopologySource,
    pub n_broadcast_slots: usize,
    pub ebn0_db: f64,
    /// End-to-end rate in bit/s/Hz.
    pub rate: f64,
}

fn count_outages(cell: &Cell<'_>, seed: u64, trials: std::ops::Range<u64>) -> Result<u64> {
    let n_relays = cell.topology.n_relays();
    let power = power_for(cell.scheme, cell.n_broadcast_slots, n_relays, cell.ebn0_db)?;
    let config = ProtocolConfig::new(cell.n_broadcast_slots, power, cell.scheme)?;
    let first_batch = trials.start / BATCH;
    let last_batch = trials.end.div_ceil(BATCH);
    (first_batch..last_batch)
        .into_par_iter()
        .map(|batch| {
            let lo = (batch * BATCH).max(trials.start);
            let hi = ((batch + 1) * BATCH).min(trials.end);
            let mut count = 0u64;
            for trial in lo..hi {
                let model = cell.topology.model_for(seed, trial)?;
                let mut stream = ChannelStream::for_trial(seed, trial);
                let trace = run_round(&mut stream, &model, &config)?;
                count += u64::from(system_outage(&trace, cell.rate));
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn run_cell(cell: &Cell<'_>, budget: &TrialBudget, seed: u64) -> Result<OutageEstimate> {
    let mut trials = budget.min_trials;
    let mut outages = count_outages(cell, seed, 0..trials)?;
    while outages < budget.target_outages && trials < budget.max_trials {
        let next = (2 * trials).min(budget.max_trials);
        outages += count_outages(cell, seed, trials..next)?;
        trials = next;
    }
    Ok(OutageEstimate::from_counts(outages, trials))
}

pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(f)
}

/// Monte Carlo outage probability of one cell. `workers = 0` uses every core.
pub fn estimate_outage(
    cell: &Cell<'_>,
    budget: &TrialBudget,
    seed: u64,
    workers: usize,
) -> Result<OutageEstimate> {
    budget.validate()?;
    with_workers(workers, || run_cell(cell, budget, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// Values are end-to-end rates `R` in bit/s/Hz.
    Fixed,
    /// Values are multiplexing gains `r`, with `R = r log₂(1 + Eb/N0)`.
    Scaled,
}

impl RateMode {
    pub fn name(&self) -> &'static str {
        match self {
            RateMode::Fixed => "fixed",
            RateMode::Scaled => "scaled",
        }
    }

    pub fn rate(&self, value: f64, ebn0_db: f64) -> f64 {
        match self {
            RateMode::Fixed => value,
            RateMode::Scaled => value * (1.0 + db_to_linear(ebn0_db)).log2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    pub n_broadcast_slots: usize,
    pub topology: TopologySource,
    pub snr_points_db: Vec<f64>,
    pub rate_mode: RateMode,
    pub rate_values: Vec<f64>,
    pub budget: TrialBudget,
    pub seed: u64,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        if self.n_broadcast_slots == 0 {
            return Err(Error::config("network.broadcast_slots", "must be at least 1"));
        }
        if self.snr_points_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("sweep.ebn0_db", "points must be strictly increasing"));
        }
        if self.snr_points_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("sweep.ebn0_db", "points must be finite"));
        }
        for &v in &self.rate_values {
            let ok = match self.rate_mode {
                RateMode::Fixed => v.is_finite() && v >= 0.0,
                RateMode::Scaled => (0.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(Error::config(
                    "rate.values",
                    format!("{v} is not a valid {} rate", self.rate_mode.name()),
                ));
            }
        }
        Ok(())
    }
}

/// One CSV row. Floats are written in Rust's shortest round-trip form, with
/// an exponent for very small or large magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageRow {
    pub scheme: Scheme,
    pub n_users: usize,
    pub n_relays: usize,
    pub n_broadcast_slots: usize,
    pub rate_mode: RateMode,
    pub rate_value: f64,
    pub ebn0_db: f64,
    pub estimate: OutageEstimate,
}

pub const CSV_HEADER: &str =
    "scheme,N,M,L,rate_mode,rate_value,ebn0_db,trials,outages,p_hat,ci_low,ci_high";

impl OutageRow {
    pub fn csv_fields(&self) -> String {
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{:?},{:?},{},{},{:?},{:?},{:?}",
            self.scheme,
            self.n_users,
            self.n_relays,
            self.n_broadcast_slots,
            self.rate_mode.name(),
            self.rate_value,
            self.ebn0_db,
            e.trials,
            e.outages,
            e.p_hat,
            e.ci_low,
            e.ci_high
        )
    }
}

pub fn write_csv<W: Write>(rows: &[OutageRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_fields())?;
    }
    Ok(())
}

/// Rows are emitted scheme-major, then rate, then Eb/N0.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<OutageRow>> {
    spec.validate()?;
    with_workers(spec.workers, || {
        let mut rows = Vec::new();
        for &scheme in &spec.schemes {
            for &rate_value in &spec.rate_values {
                for &ebn0_db in &spec.snr_points_db {
                    let cell = Cell {
                        scheme,
                        topology: &spec.topology,
                        n_broadcast_slots: spec.n_broadcast_slots,
                        ebn0_db,
                        rate: spec.rate_mode.rate(rate_value, ebn0_db),
                    };
                    rows.push(OutageRow {
                        scheme,
                        n_users: spec.topology.n_users(),
                        n_relays: spec.topology.n_relays(),
                        n_broadcast_slots: spec.n_broadcast_slots,
                        rate_mode: spec.rate_mode,
                        rate_value,
                        ebn0_db,
                        estimate: run_cell(&cell, &spec.budget, spec.seed)?,
                    });
                }
            }
        }
        Ok(rows)
    })
}

/// Which points a slope fit uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeWindow {
    /// The `k` highest-SNR points with a nonzero estimate.
    Highest(usize),
    /// Every point whose estimate lies in `[low, high]`.
    ProbabilityRange { low: f64, high: f64 },
}

/// Negated least-squares slope of `log₁₀ p` against `snr_db / 10`.
pub fn fit_diversity_slope(points: &[(f64, f64)], window: SlopeWindow) -> Result<f64> {
    let mut usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, p)| p > 0.0).collect();
    usable.sort_by(|a, b| a.0.total_cmp(&b.0));
    let selected: Vec<(f64, f64)> = match window {
        SlopeWindow::Highest(k) => usable[usable.len().saturating_sub(k)..].to_vec(),
        SlopeWindow::ProbabilityRange { low, high } => {
            usable.into_iter().filter(|&(_, p)| p >= low && p <= high).collect()
        }
    };
    if selected.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs two nonzero points, got {}",
            selected.len()
        )));
    }
    let n = selected.len() as f64;
    let xs: Vec<f64> = selected.iter().map(|&(db, _)| db / 10.0).collect();
    let ys: Vec<f64> = selected.iter().map(|&(_, p)| p.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("slope fit needs distinct SNR points".into()));
    }
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_estimate() {
        for (k, n) in [(1, 10), (5, 10), (10, 10), (3, 100_000), (500, 1000)] {
            let e = OutageEstimate::from_counts(k, n);
            assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
            assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
        }
        let zero = OutageEstimate::from_counts(0, 1000);
        assert_eq!(zero.p_hat, 0.0);
        assert_eq!(zero.ci_low, 0.0);
        assert!((zero.ci_high - (1.0 - 0.05f64.powf(1e-3))).abs() < 1e-15);
    }

    #[test]
    fn wilson_reference_value() {
        // 10 of 100 at z = 1.96
        let (lo, hi) = wilson_interval(10, 100, Z_95);
        assert!((lo - 0.055_229_14).abs() < 1e-6, "{lo}");
        assert!((hi - 0.174_365_66).abs() < 1e-6, "{hi}");
    }

    #[test]
    fn slope_of_exact_power_laws() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| {
            let db = 10.0 + 5.0 * i as f64;
            (db, db_to_linear(db).powi(-2))
        }).collect();
        let s = fit_diversity_slope(&pts, SlopeWindow::Highest(4)).unwrap();
        assert!((s - 2.0).abs() < 1e-6);

        let pts: Vec<(f64, f64)> = (0..6).map(|i| {
            let db = 5.0 * i as f64;
            (db, 37.0 * db_to_linear(db).powi(-4))
        }).collect();
        let s = fit_diversity_slope(&pts, SlopeWindow::Highest(6)).unwrap();
        assert!((s - 4.0).abs() < 1e-6);
    }

    #[test]
    fn slope_needs_two_nonzero_points() {
        let pts = [(0.0, 0.1), (10.0, 0.0), (20.0, 0.0)];
        assert!(matches!(
            fit_diversity_slope(&pts, SlopeWindow::Highest(3)),
            Err(Error::InsufficientData(_))
        ));
        let pts = [(0.0, 0.1), (10.0, 0.01)];
        let s = fit_diversity_slope(&pts, SlopeWindow::ProbabilityRange { low: 1e-3, high: 1.0 })
            .unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_snr_mapping() {
        let p = power_for(Scheme::UsLcrp, 6, 3, 0.0).unwrap();
        assert!((p.es_over_n0() - 1.5).abs() < 1e-15);
        let p = power_for(Scheme::TwoStepRef12, 6, 3, 10.0).unwrap();
        assert!((p.es_over_n0() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_rate() {
        assert_eq!(RateMode::Fixed.rate(1.5, 20.0), 1.5);
        let r = RateMode::Scaled.rate(0.5, 10.0);
        assert!((r - 0.5 * 11f64.log2()).abs() < 1e-15);
        assert_eq!(RateMode::Scaled.rate(0.0, 10.0), 0.0);
    }

    #[test]
    fn sweep_validation() {
        let spec = SweepSpec {
            schemes: vec![Scheme::UsLcrp],
            n_broadcast_slots: 2,
            topology: TopologySource::Fixed(NetworkModel::homogeneous(1, 1, 1.0).unwrap()),
            snr_points_db: vec![0.0, 0.0],
            rate_mode: RateMode::Fixed,
            rate_values: vec![1.0],
            budget: TrialBudget::fixed(10),
            seed: 0,
            workers: 1,
        };
        assert!(matches!(spec.validate(), Err(Error::InvalidConfig { field, .. }) if field == "sweep.ebn0_db"));
        let scaled = SweepSpec {
            snr_points_db: vec![0.0],
            rate_mode: RateMode::Scaled,
            rate_values: vec![1.5],
            ..spec.clone()
        };
        assert!(matches!(scaled.validate(), Err(Error::InvalidConfig { field, .. }) if field == "rate.values"));
        let no_trials = SweepSpec { snr_points_db: vec![0.0], budget: TrialBudget::fixed(0), ..spec };
        assert!(no_trials.validate().is_err());
    }

    #[test]
    fn empty_scheme_set_gives_empty_table() {
        let spec = SweepSpec {
            schemes: vec![],
            n_broadcast_slots: 2,
            topology: TopologySource::Fixed(NetworkModel::homogeneous(2, 1, 1.0).unwrap()),
            snr_points_db: vec![0.0, 5.0],
            rate_mode: RateMode::Fixed,
            rate_values: vec![1.0],
            budget: TrialBudget::fixed(10),
            seed: 0,
            workers: 1,
        };
        assert!(sweep(&spec).unwrap().is_empty());
    }
}
