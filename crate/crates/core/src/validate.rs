//! Runtime checks of the protocol invariants over many random rounds.
//!
//! Every check here is a theorem about a correct implementation, so a single
//! failure means a bug. The same checks back the `validate` subcommand.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::fading::{ChannelStream, Layout};
use crate::montecarlo::{power_for, with_workers, TopologySource};
use crate::protocol::{run_round, Combining, ProtocolConfig, Scheme, TransmissionTrace};
use crate::Result;

const BATCH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    /// Sorted final SNRs equal the top `L` of everything received.
    MergeIdentity,
    /// Final SNRs are drawn from the received SNRs.
    CombinedSubset,
    /// No record ever decreases.
    LedgerMonotone,
    /// A relay slot changes at most the record of the block it forwards.
    OneTouch,
    /// `L + M` slots for US-LCRP, `2L` for the benchmarks.
    SlotBudget,
    /// AF SNR never exceeds the weaker of its two hops.
    AfBound,
    /// The forwarded block is the one with the lowest record.
    WorstBlockSelection,
    /// Joint pair selection never does worse than two-step selection.
    PairDominance,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::MergeIdentity,
        Check::CombinedSubset,
        Check::LedgerMonotone,
        Check::OneTouch,
        Check::SlotBudget,
        Check::AfBound,
        Check::WorstBlockSelection,
        Check::PairDominance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::MergeIdentity => "merge-identity",
            Check::CombinedSubset => "combined-subset",
            Check::LedgerMonotone => "ledger-monotone",
            Check::OneTouch => "one-touch",
            Check::SlotBudget => "slot-budget",
            Check::AfBound => "af-bound",
            Check::WorstBlockSelection => "worst-block-selection",
            Check::PairDominance => "pair-dominance",
        }
    }

    fn index(&self) -> usize {
        Check::ALL.iter().position(|c| c == self).expect("listed")
    }
}

/// Pass and fail counts for every check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    passed: [u64; 8],
    failed: [u64; 8],
}

impl Tally {
    pub fn record(&mut self, check: Check, ok: bool) {
        let i = check.index();
        if ok {
            self.passed[i] += 1;
        } else {
            self.failed[i] += 1;
        }
    }

    pub fn passed(&self, check: Check) -> u64 {
        self.passed[check.index()]
    }

    pub fn failed(&self, check: Check) -> u64 {
        self.failed[check.index()]
    }

    pub fn total_failures(&self) -> u64 {
        self.failed.iter().sum()
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..Check::ALL.len() {
            self.passed[i] += other.passed[i];
            self.failed[i] += other.failed[i];
        }
        self
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Sorted combined SNRs equal the `L` largest received SNRs, element by element.
pub fn merge_identity_holds(trace: &TransmissionTrace) -> bool {
    let v = sorted(trace.combined());
    let u = sorted(trace.ledger.received());
    let m = trace.n_relays;
    u.len() == v.len() + m && v.iter().enumerate().all(|(l, &x)| x == u[l + m])
}

fn combined_subset_holds(trace: &TransmissionTrace) -> bool {
    let received = trace.ledger.received();
    trace.combined().iter().all(|v| received.contains(v))
}

fn ledger_monotone_holds(trace: &TransmissionTrace) -> bool {
    match trace.scheme {
        Scheme::UsLcrp => (0..trace.n_relays).all(|m| {
            let before = trace.records_before(m);
            let after = trace.records_before(m + 1);
            before.iter().zip(after).all(|(a, b)| b >= a)
        }),
        Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => {
            trace.combined().iter().zip(&trace.direct_snrs).all(|(v, d)| v >= d)
        }
    }
}

fn one_touch_holds(trace: &TransmissionTrace) -> bool {
    match trace.scheme {
        Scheme::UsLcrp => trace.selected_blocks.iter().enumerate().all(|(m, &block)| {
            let before = trace.records_before(m);
            let after = trace.records_before(m + 1);
            before.iter().zip(after).enumerate().all(|(l, (a, b))| l == block || a == b)
        }),
        Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => {
            let relayed = trace.selected_relays.iter().filter(|r| r.is_some()).count();
            trace.selected_relays.len() == trace.n_broadcast_slots
                && trace.relay_snrs.len() == relayed
        }
    }
}

fn slot_budget_holds(trace: &TransmissionTrace) -> bool {
    let l = trace.n_broadcast_slots;
    let m = trace.n_relays;
    let expected = match trace.scheme {
        Scheme::UsLcrp => l + m,
        Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => 2 * l,
    };
    let used = match trace.scheme {
        Scheme::UsLcrp => trace.direct_snrs.len() + trace.relay_snrs.len(),
        // every request reserves its relay slot, used or not
        Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => {
            trace.direct_snrs.len() + trace.selected_relays.len()
        }
    };
    trace.slot_budget == expected && used == expected && trace.combined().len() == l
}

fn af_bound_holds(trace: &TransmissionTrace) -> bool {
    trace.relay_snrs.len() == trace.relay_link_snrs.len()
        && trace
            .relay_snrs
            .iter()
            .zip(&trace.relay_link_snrs)
            .all(|(&af, &(sr, rd))| af >= 0.0 && af <= sr.min(rd))
}

fn worst_block_holds(trace: &TransmissionTrace) -> bool {
    trace.selected_blocks.iter().enumerate().all(|(m, &block)| {
        let records = trace.records_before(m);
        block < records.len() && records.iter().enumerate().all(|(l, &r)| {
            r > records[block] || (r == records[block] && l >= block)
        })
    })
}

/// Runs every single-trace check that applies to `trace.scheme`.
pub fn check_trace(trace: &TransmissionTrace, tally: &mut Tally) {
    if trace.scheme == Scheme::UsLcrp {
        tally.record(Check::MergeIdentity, merge_identity_holds(trace));
        tally.record(Check::WorstBlockSelection, worst_block_holds(trace));
    }
    tally.record(Check::CombinedSubset, combined_subset_holds(trace));
    tally.record(Check::LedgerMonotone, ledger_monotone_holds(trace));
    tally.record(Check::OneTouch, one_touch_holds(trace));
    tally.record(Check::SlotBudget, slot_budget_holds(trace));
    tally.record(Check::AfBound, af_bound_holds(trace));
}

/// Per-block comparison of the two benchmarks on the same fading.
pub fn check_pair_dominance(
    two_step: &TransmissionTrace,
    pair_select: &TransmissionTrace,
    tally: &mut Tally,
) {
    let ok = two_step
        .combined()
        .iter()
        .zip(pair_select.combined())
        .all(|(a, b)| b >= a);
    tally.record(Check::PairDominance, ok);
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSettings {
    pub traces: u64,
    pub n_users: usize,
    pub n_relays: usize,
    pub n_broadcast_slots: usize,
    pub layout: Layout,
    pub pathloss_exponent: f64,
    pub ebn0_db: f64,
    pub seed: u64,
    pub workers: usize,
    /// Swap the destination's max-combining for min. Exists to prove the
    /// checks can fail.
    pub inject_fault: bool,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        ValidationSettings {
            traces: 100_000,
            n_users: 5,
            n_relays: 3,
            n_broadcast_slots: 6,
            layout: Layout::UniformSquare,
            pathloss_exponent: 2.0,
            ebn0_db: 10.0,
            seed: 1,
            workers: 0,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub settings: ValidationSettings,
    pub tally: Tally,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.tally.total_failures() == 0
    }

    pub fn render(&self) -> String {
        let s = &self.settings;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "traces={} users={} relays={} broadcast_slots={} seed={}",
            s.traces, s.n_users, s.n_relays, s.n_broadcast_slots, s.seed
        );
        for check in Check::ALL {
            let _ = writeln!(
                out,
                "{:<22} passed={} failed={}",
                check.name(),
                self.tally.passed(check),
                self.tally.failed(check)
            );
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "result: {verdict}");
        out
    }
}

fn validate_trace(
    settings: &ValidationSettings,
    topology: &TopologySource,
    configs: &[ProtocolConfig; 3],
    trial: u64,
    tally: &mut Tally,
) -> Result<()> {
    let model = topology.model_for(settings.seed, trial)?;
    let mut traces = Vec::with_capacity(3);
    for config in configs {
        let mut stream = ChannelStream::for_trial(settings.seed, trial);
        let trace = run_round(&mut stream, &model, config)?;
        check_trace(&trace, tally);
        traces.push(trace);
    }
    check_pair_dominance(&traces[1], &traces[2], tally);
    Ok(())
}

/// Runs `settings.traces` rounds of every scheme, each on a fresh random
/// topology, and tallies every check.
pub fn run_validation(settings: &ValidationSettings) -> Result<ValidationReport> {
    let topology = TopologySource::PerTrial {
        n_users: settings.n_users,
        n_relays: settings.n_relays,
        layout: settings.layout,
        pathloss_exponent: settings.pathloss_exponent,
    };
    let config_for = |scheme| -> Result<ProtocolConfig> {
        let power = power_for(scheme, settings.n_broadcast_slots, settings.n_relays, settings.ebn0_db)?;
        let mut config = ProtocolConfig::new(settings.n_broadcast_slots, power, scheme)?;
        if settings.inject_fault {
            config.combining = Combining::InvertedSelection;
        }
        Ok(config)
    };
    let configs = [
        config_for(Scheme::UsLcrp)?,
        config_for(Scheme::TwoStepRef12)?,
        config_for(Scheme::PairSelectRef11)?,
    ];
    let tally = with_workers(settings.workers, || {
        (0..settings.traces.div_ceil(BATCH))
            .into_par_iter()
            .map(|batch| {
                let mut tally = Tally::default();
                let hi = ((batch + 1) * BATCH).min(settings.traces);
                for trial in batch * BATCH..hi {
                    validate_trace(settings, &topology, &configs, trial, &mut tally)?;
                }
                Ok(tally)
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    })?;
    Ok(ValidationReport { settings: settings.clone(), tally })
}
