//! One transmission round of US-LCRP and of the two benchmark schemes.
//!
//! US-LCRP spends `L` broadcast slots, each carrying a fresh block from the
//! user with the strongest direct link, followed by `M` relay slots in which
//! relay `m` forwards the block with the lowest quality record and the
//! destination selection-combines. The benchmarks spend two slots per block
//! (`2L` in total): a direct slot and a relay slot.
//!
//! Channel draws come from a [`ChannelStream`], which lets several schemes
//! replay exactly the same fading realisation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::outage_threshold;
use crate::fading::{gain_snr, ChannelStream, NetworkModel, PowerProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Broadcast phase with user selection, then worst-block relaying.
    UsLcrp,
    /// Best user by direct link, then best relay by end-to-end AF SNR.
    TwoStepRef12,
    /// Jointly best user-relay pair over all `N·M` candidates.
    PairSelectRef11,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::UsLcrp, Scheme::TwoStepRef12, Scheme::PairSelectRef11];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::UsLcrp => "us-lcrp",
            Scheme::TwoStepRef12 => "two-step-ref12",
            Scheme::PairSelectRef11 => "pair-select-ref11",
        }
    }

    /// Time slots one round occupies.
    pub fn slot_budget(&self, n_broadcast_slots: usize, n_relays: usize) -> usize {
        match self {
            Scheme::UsLcrp => n_broadcast_slots + n_relays,
            Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => 2 * n_broadcast_slots,
        }
    }

    /// Fraction of the round's slots that carry fresh data.
    pub fn duty_factor(&self, n_broadcast_slots: usize, n_relays: usize) -> f64 {
        n_broadcast_slots as f64 / self.slot_budget(n_broadcast_slots, n_relays) as f64
    }

    /// SNR a block needs so that its share of the round supports rate `rate`.
    pub fn outage_threshold(&self, rate: f64, n_broadcast_slots: usize, n_relays: usize) -> f64 {
        match self {
            Scheme::UsLcrp => outage_threshold(rate, n_broadcast_slots, n_relays),
            Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => (2.0 * rate).exp2() - 1.0,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::config("schemes", format!("unknown scheme `{s}`")))
    }
}

/// How the destination merges a relayed copy into a block's record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combining {
    /// Keep the stronger copy.
    #[default]
    Selection,
    /// Keep the weaker copy. Only exists so validation can prove it notices.
    #[doc(hidden)]
    InvertedSelection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n_broadcast_slots: usize,
    pub power: PowerProfile,
    pub scheme: Scheme,
    pub combining: Combining,
}

impl ProtocolConfig {
    pub fn new(n_broadcast_slots: usize, power: PowerProfile, scheme: Scheme) -> Result<Self> {
        if n_broadcast_slots == 0 {
            return Err(Error::InvalidProtocol("at least one broadcast slot is required".into()));
        }
        Ok(ProtocolConfig {
            n_broadcast_slots,
            power,
            scheme,
            combining: Combining::Selection,
        })
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        ProtocolConfig { scheme, ..self.clone() }
    }
}

/// Index of the largest SNR, lowest index on ties.
pub fn select_user(direct_snrs: &[f64]) -> Result<usize> {
    argmax(direct_snrs).ok_or(Error::EmptyInput)
}

/// Index of the smallest record, lowest index on ties.
pub fn select_worst_block(records: &[f64]) -> Result<usize> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut best = 0;
    for (i, &r) in records.iter().enumerate().skip(1) {
        if r < records[best] {
            best = i;
        }
    }
    Ok(best)
}

fn argmax(values: &[f64]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    Some(best)
}

/// End-to-end SNR of a two-hop amplify-and-forward path, `ab / (a + b + 1)`.
#[inline]
pub fn af_equivalent_snr(rho_sr: f64, rho_rd: f64) -> f64 {
    rho_sr * rho_rd / (rho_sr + rho_rd + 1.0)
}

/// The destination's quality records plus the archive of every received SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrLedger {
    records: Vec<f64>,
    received: Vec<f64>,
    combining: Combining,
}

impl SnrLedger {
    /// Starts from the broadcast-phase SNRs, which are also the first `L`
    /// entries of the received archive.
    pub fn new(initial: Vec<f64>) -> Self {
        SnrLedger {
            received: initial.clone(),
            records: initial,
            combining: Combining::Selection,
        }
    }

    pub(crate) fn with_combining(mut self, combining: Combining) -> Self {
        self.combining = combining;
        self
    }

    /// Current record of every block.
    pub fn records(&self) -> &[f64] {
        &self.records
    }

    /// Every SNR received at the destination so far, in arrival order.
    pub fn received(&self) -> &[f64] {
        &self.received
    }

    /// Final combined SNR of each block; meaningful once the round finished.
    pub fn combined(&self) -> &[f64] {
        &self.records
    }

    pub fn select_worst_block(&self) -> usize {
        select_worst_block(&self.records).expect("ledger holds at least one block")
    }

    /// Selection-combines `relayed` into block `block`. Returns whether the
    /// record changed.
    pub fn sc_update(&mut self, block: usize, relayed: f64) -> Result<bool> {
        let len = self.records.len();
        let slot = self
            .records
            .get_mut(block)
            .ok_or(Error::BlockOutOfRange { index: block, len })?;
        self.received.push(relayed);
        let next = match self.combining {
            Combining::Selection => slot.max(relayed),
            Combining::InvertedSelection => slot.min(relayed),
        };
        let changed = next != *slot;
        *slot = next;
        Ok(changed)
    }

    pub fn min_combined(&self) -> f64 {
        self.records.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionTrace {
    pub scheme: Scheme,
    pub n_users: usize,
    pub n_relays: usize,
    pub n_broadcast_slots: usize,
    /// User transmitting block `l`.
    pub selected_users: Vec<usize>,
    /// Block forwarded in relay slot `m` (US-LCRP only).
    pub selected_blocks: Vec<usize>,
    /// Relay forwarding block `l` (benchmarks only; `None` without relays).
    pub selected_relays: Vec<Option<usize>>,
    /// Direct-link SNR of the selected user for each block.
    pub direct_snrs: Vec<f64>,
    /// AF SNR delivered in each relay slot.
    pub relay_snrs: Vec<f64>,
    /// `(source-relay, relay-destination)` SNRs behind each entry of `relay_snrs`.
    pub relay_link_snrs: Vec<(f64, f64)>,
    /// US-LCRP records entering relay slot `m`, flattened `(M + 1) × L`; the
    /// last row is the final state. Empty for the benchmarks.
    pub record_history: Vec<f64>,
    pub ledger: SnrLedger,
    pub slot_budget: usize,
}

impl TransmissionTrace {
    /// Combined SNR of each block after the round.
    pub fn combined(&self) -> &[f64] {
        self.ledger.combined()
    }

    /// Records before relay slot `m`; `m = M` gives the final records.
    pub fn records_before(&self, m: usize) -> &[f64] {
        let l = self.n_broadcast_slots;
        &self.record_history[m * l..(m + 1) * l]
    }

    /// Line-oriented dump, one slot per line, indices one-based.
    pub fn to_debug_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# scheme={} users={} relays={} broadcast_slots={} slot_budget={}",
            self.scheme, self.n_users, self.n_relays, self.n_broadcast_slots, self.slot_budget
        );
        match self.scheme {
            Scheme::UsLcrp => {
                for (l, (&user, &snr)) in self.selected_users.iter().zip(&self.direct_snrs).enumerate() {
                    let _ = writeln!(out, "BP ts={} user={} snr={:e}", l + 1, user + 1, snr);
                }
                for (m, (&block, &af)) in self.selected_blocks.iter().zip(&self.relay_snrs).enumerate() {
                    let record = self.records_before(m + 1)[block];
                    let _ = writeln!(
                        out,
                        "RP ts={} relay={} block={} af={:e} record={:e}",
                        self.n_broadcast_slots + m + 1,
                        m + 1,
                        block + 1,
                        af,
                        record
                    );
                }
            }
            Scheme::TwoStepRef12 | Scheme::PairSelectRef11 => {
                for l in 0..self.n_broadcast_slots {
                    let _ = writeln!(
                        out,
                        "BP ts={} request={} user={} snr={:e}",
                        2 * l + 1,
                        l + 1,
                        self.selected_users[l] + 1,
                        self.direct_snrs[l]
                    );
                    match self.selected_relays[l] {
                        Some(relay) => {
                            let _ = writeln!(
                                out,
                                "RP ts={} request={} relay={} af={:e} combined={:e}",
                                2 * l + 2,
                                l + 1,
                                relay + 1,
                                self.relay_snrs[l],
                                self.combined()[l]
                            );
                        }
                        None => {
                            let _ = writeln!(
                                out,
                                "RP ts={} request={} relay=- combined={:e}",
                                2 * l + 2,
                                l + 1,
                                self.combined()[l]
                            );
                        }
                    }
                }
            }
        }
        let combined: Vec<String> = self.combined().iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "V {}", combined.join(" "));
        out
    }
}

/// Whether the round fails to deliver rate `rate` on at least one block.
pub fn system_outage(trace: &TransmissionTrace, rate: f64) -> bool {
    let beta = trace.scheme.outage_threshold(rate, trace.n_broadcast_slots, trace.n_relays);
    trace.ledger.min_combined() < beta
}

fn direct_snrs_into(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    ts: usize,
    power: &PowerProfile,
    out: &mut Vec<f64>,
) {
    stream.direct_gains(model, ts, out);
    out.iter_mut().for_each(|g| *g = gain_snr(*g, power));
}

fn source_relay_snrs_into(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    ts: usize,
    user: usize,
    power: &PowerProfile,
    out: &mut Vec<f64>,
) {
    stream.source_relay_gains(model, ts, user, out);
    out.iter_mut().for_each(|g| *g = gain_snr(*g, power));
}

fn validate_inputs(model: &NetworkModel, config: &ProtocolConfig) -> Result<()> {
    if config.n_broadcast_slots == 0 {
        return Err(Error::InvalidProtocol("at least one broadcast slot is required".into()));
    }
    if model.n_users() == 0 {
        return Err(Error::InvalidNetwork("at least one user is required".into()));
    }
    Ok(())
}

/// Runs whichever scheme `config` names.
pub fn run_round(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    config: &ProtocolConfig,
) -> Result<TransmissionTrace> {
    match config.scheme {
        Scheme::UsLcrp => run_us_lcrp(stream, model, config),
        Scheme::TwoStepRef12 => run_two_step_ref12(stream, model, config),
        Scheme::PairSelectRef11 => run_pair_select_ref11(stream, model, config),
    }
}

/// US-LCRP: slots `0..L` are the broadcast phase, slot `L + m` belongs to relay `m`.
pub fn run_us_lcrp(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    config: &ProtocolConfig,
) -> Result<TransmissionTrace> {
    validate_inputs(model, config)?;
    let l_slots = config.n_broadcast_slots;
    let n_relays = model.n_relays();
    let power = &config.power;

    let mut snrs: Vec<f64> = Vec::with_capacity(model.n_users().max(n_relays));
    let mut selected_users = Vec::with_capacity(l_slots);
    let mut direct_snrs = Vec::with_capacity(l_slots);
    // source-relay SNRs of the user heard in each broadcast slot, flattened L × M
    let mut sr_snrs = Vec::with_capacity(l_slots * n_relays);

    for ts in 0..l_slots {
        direct_snrs_into(stream, model, ts, power, &mut snrs);
        let user = select_user(&snrs)?;
        selected_users.push(user);
        direct_snrs.push(snrs[user]);
        source_relay_snrs_into(stream, model, ts, user, power, &mut snrs);
        sr_snrs.extend_from_slice(&snrs);
    }

    let mut ledger = SnrLedger::new(direct_snrs.clone()).with_combining(config.combining);
    let mut record_history = Vec::with_capacity((n_relays + 1) * l_slots);
    record_history.extend_from_slice(ledger.records());
    let mut selected_blocks = Vec::with_capacity(n_relays);
    let mut relay_snrs = Vec::with_capacity(n_relays);
    let mut relay_link_snrs = Vec::with_capacity(n_relays);

    for relay in 0..n_relays {
        let block = ledger.select_worst_block();
        let rho_sr = sr_snrs[block * n_relays + relay];
        let rho_rd = gain_snr(stream.relay_dest_gain(model, l_slots + relay, relay), power);
        let relayed = af_equivalent_snr(rho_sr, rho_rd);
        ledger.sc_update(block, relayed)?;
        selected_blocks.push(block);
        relay_snrs.push(relayed);
        relay_link_snrs.push((rho_sr, rho_rd));
        record_history.extend_from_slice(ledger.records());
    }

    Ok(TransmissionTrace {
        scheme: Scheme::UsLcrp,
        n_users: model.n_users(),
        n_relays,
        n_broadcast_slots: l_slots,
        selected_users,
        selected_blocks,
        selected_relays: Vec::new(),
        direct_snrs,
        relay_snrs,
        relay_link_snrs,
        record_history,
        ledger,
        slot_budget: Scheme::UsLcrp.slot_budget(l_slots, n_relays),
    })
}

/// Selection combining of a direct copy with the best relayed candidate.
/// Returns the chosen relay (if any) and the combined SNR.
pub fn two_step_combine(direct: f64, af_candidates: &[f64]) -> (Option<usize>, f64) {
    match argmax(af_candidates) {
        Some(relay) => (Some(relay), direct.max(af_candidates[relay])),
        None => (None, direct),
    }
}

/// Best `(user, relay)` pair under the metric `max(direct, af)`. `af[n][m]`
/// is the AF SNR of user `n` through relay `m`. Ties go to the lowest user,
/// then the lowest relay.
pub fn best_pair(direct: &[f64], af: &[Vec<f64>]) -> Result<(usize, Option<usize>, f64)> {
    if direct.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut best: Option<(usize, Option<usize>, f64)> = None;
    for (n, &d) in direct.iter().enumerate() {
        let row = af.get(n).map(Vec::as_slice).unwrap_or(&[]);
        if row.is_empty() {
            if best.is_none_or(|(_, _, v)| d > v) {
                best = Some((n, None, d));
            }
            continue;
        }
        for (m, &a) in row.iter().enumerate() {
            let metric = d.max(a);
            if best.is_none_or(|(_, _, v)| metric > v) {
                best = Some((n, Some(m), metric));
            }
        }
    }
    Ok(best.expect("non-empty input"))
}

struct BenchmarkRound {
    selected_users: Vec<usize>,
    selected_relays: Vec<Option<usize>>,
    direct_snrs: Vec<f64>,
    relay_snrs: Vec<f64>,
    relay_link_snrs: Vec<(f64, f64)>,
    combined: Vec<f64>,
}

impl BenchmarkRound {
    fn with_capacity(l: usize) -> Self {
        BenchmarkRound {
            selected_users: Vec::with_capacity(l),
            selected_relays: Vec::with_capacity(l),
            direct_snrs: Vec::with_capacity(l),
            relay_snrs: Vec::with_capacity(l),
            relay_link_snrs: Vec::with_capacity(l),
            combined: Vec::with_capacity(l),
        }
    }

    fn into_trace(self, scheme: Scheme, model: &NetworkModel, l_slots: usize) -> TransmissionTrace {
        let mut ledger = SnrLedger::new(self.direct_snrs.clone());
        ledger.received.extend_from_slice(&self.relay_snrs);
        ledger.records = self.combined;
        TransmissionTrace {
            scheme,
            n_users: model.n_users(),
            n_relays: model.n_relays(),
            n_broadcast_slots: l_slots,
            selected_users: self.selected_users,
            selected_blocks: Vec::new(),
            selected_relays: self.selected_relays,
            direct_snrs: self.direct_snrs,
            relay_snrs: self.relay_snrs,
            relay_link_snrs: self.relay_link_snrs,
            record_history: Vec::new(),
            ledger,
            slot_budget: scheme.slot_budget(l_slots, model.n_relays()),
        }
    }
}

/// Two-step selection: request `l` uses slot `2l` for the direct
/// transmission and slot `2l + 1` for the relay.
pub fn run_two_step_ref12(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    config: &ProtocolConfig,
) -> Result<TransmissionTrace> {
    validate_inputs(model, config)?;
    let l_slots = config.n_broadcast_slots;
    let n_relays = model.n_relays();
    let power = &config.power;
    let mut snrs = Vec::with_capacity(model.n_users());
    let mut sr = Vec::with_capacity(n_relays);
    let mut af = Vec::with_capacity(n_relays);
    let mut links = Vec::with_capacity(n_relays);
    let mut round = BenchmarkRound::with_capacity(l_slots);

    for l in 0..l_slots {
        let (ts_direct, ts_relay) = (2 * l, 2 * l + 1);
        direct_snrs_into(stream, model, ts_direct, power, &mut snrs);
        let user = select_user(&snrs)?;
        source_relay_snrs_into(stream, model, ts_direct, user, power, &mut sr);
        af.clear();
        links.clear();
        for (relay, &rho_sr) in sr.iter().enumerate() {
            let rho_rd = gain_snr(stream.relay_dest_gain(model, ts_relay, relay), power);
            af.push(af_equivalent_snr(rho_sr, rho_rd));
            links.push((rho_sr, rho_rd));
        }
        let (relay, combined) = two_step_combine(snrs[user], &af);
        round.selected_users.push(user);
        round.selected_relays.push(relay);
        round.direct_snrs.push(snrs[user]);
        if let Some(relay) = relay {
            round.relay_snrs.push(af[relay]);
            round.relay_link_snrs.push(links[relay]);
        }
        round.combined.push(combined);
    }
    Ok(round.into_trace(Scheme::TwoStepRef12, model, l_slots))
}

/// User-relay pair selection over all `N·M` pairs, same slot layout as
/// [`run_two_step_ref12`] so both can be replayed on one stream.
pub fn run_pair_select_ref11(
    stream: &mut ChannelStream,
    model: &NetworkModel,
    config: &ProtocolConfig,
) -> Result<TransmissionTrace> {
    validate_inputs(model, config)?;
    let l_slots = config.n_broadcast_slots;
    let n_users = model.n_users();
    let n_relays = model.n_relays();
    let power = &config.power;
    let mut direct = Vec::with_capacity(n_users);
    let mut rho_rd = Vec::with_capacity(n_relays);
    let mut af = vec![Vec::with_capacity(n_relays); n_users];
    let mut sr = vec![Vec::with_capacity(n_relays); n_users];
    let mut round = BenchmarkRound::with_capacity(l_slots);

    for l in 0..l_slots {
        let (ts_direct, ts_relay) = (2 * l, 2 * l + 1);
        direct_snrs_into(stream, model, ts_direct, power, &mut direct);
        for (user, sr_row) in sr.iter_mut().enumerate() {
            source_relay_snrs_into(stream, model, ts_direct, user, power, sr_row);
        }
        rho_rd.clear();
        for relay in 0..n_relays {
            rho_rd.push(gain_snr(stream.relay_dest_gain(model, ts_relay, relay), power));
        }
        for (row, sr_row) in af.iter_mut().zip(&sr) {
            row.clear();
            row.extend(sr_row.iter().zip(&rho_rd).map(|(&a, &b)| af_equivalent_snr(a, b)));
        }
        let (user, relay, combined) = best_pair(&direct, &af)?;
        round.selected_users.push(user);
        round.selected_relays.push(relay);
        round.direct_snrs.push(direct[user]);
        if let Some(relay) = relay {
            round.relay_snrs.push(af[user][relay]);
            round.relay_link_snrs.push((sr[user][relay], rho_rd[relay]));
        }
        round.combined.push(combined);
    }
    Ok(round.into_trace(Scheme::PairSelectRef11, model, l_slots))
}
