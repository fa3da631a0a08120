//! Properties of the estimator itself: reproducibility, interval coverage,
//! trial escalation and common random numbers.

use uslcrp::fading::{Layout, NetworkModel};
use uslcrp::montecarlo::{
    db_to_linear, estimate_outage, fixed_topology, sweep, write_csv, Cell, RateMode, SweepSpec,
    TopologySource, TrialBudget,
};
use uslcrp::protocol::Scheme;

fn spec(workers: usize, topology: TopologySource) -> SweepSpec {
    SweepSpec {
        schemes: Scheme::ALL.to_vec(),
        n_broadcast_slots: 4,
        topology,
        snr_points_db: vec![0.0, 3.0],
        rate_mode: RateMode::Fixed,
        rate_values: vec![1.0],
        budget: TrialBudget::adaptive(3_000, 12_000),
        seed: 99,
        workers,
    }
}

fn csv(spec: &SweepSpec) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&sweep(spec).unwrap(), &mut out).unwrap();
    out
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let fixed = TopologySource::Fixed(fixed_topology(99, 3, 2, Layout::UniformSquare, 2.0).unwrap());
    let per_trial = TopologySource::PerTrial {
        n_users: 3,
        n_relays: 2,
        layout: Layout::Clustered,
        pathloss_exponent: 3.5,
    };
    for topology in [fixed, per_trial] {
        let one = csv(&spec(1, topology.clone()));
        assert_eq!(one, csv(&spec(8, topology.clone())));
        assert_eq!(one, csv(&spec(3, topology)));
    }
}

fn single_link() -> TopologySource {
    TopologySource::Fixed(NetworkModel::new(vec![1.0], vec![vec![]], vec![]).unwrap())
}

#[test]
fn wilson_intervals_cover_the_true_value() {
    let topology = single_link();
    // exact outage 1 − exp(−1/ρ) ≈ 0.0488 at 13 dB
    let ebn0_db = 13.0;
    let exact = 1.0 - (-1.0 / db_to_linear(ebn0_db)).exp();
    let cell = Cell { scheme: Scheme::UsLcrp, topology: &topology, n_broadcast_slots: 1, ebn0_db, rate: 1.0 };
    let covered = (0..200)
        .filter(|&seed| {
            estimate_outage(&cell, &TrialBudget::fixed(2_000), seed, 1).unwrap().contains(exact)
        })
        .count();
    assert!(covered >= 180, "{covered} of 200 intervals cover {exact}");
}

#[test]
fn escalation_stops_at_target_or_cap() {
    let topology = single_link();
    let cell = |ebn0_db| Cell { scheme: Scheme::UsLcrp, topology: &topology, n_broadcast_slots: 1, ebn0_db, rate: 1.0 };
    let budget = TrialBudget::adaptive(1_000, 64_000);

    // p ≈ 0.0488: 100 outages need about 2 000 trials
    let e = estimate_outage(&cell(13.0), &budget, 5, 1).unwrap();
    assert!(e.outages >= 100, "{e:?}");
    assert!([2_000, 4_000].contains(&e.trials), "{e:?}");

    // p ≈ 1e-5: the cap binds
    let e = estimate_outage(&cell(50.0), &budget, 5, 1).unwrap();
    assert_eq!(e.trials, 64_000);
    if e.outages == 0 {
        assert_eq!(e.ci_low, 0.0);
        assert!((e.ci_high - (1.0 - 0.05f64.powf(1.0 / 64_000.0))).abs() < 1e-12);
    }
}

#[test]
fn common_random_numbers_make_counts_monotone_in_rate() {
    let topology = TopologySource::Fixed(fixed_topology(4, 4, 2, Layout::UniformSquare, 2.0).unwrap());
    for scheme in Scheme::ALL {
        let counts: Vec<u64> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&rate| {
                let cell = Cell { scheme, topology: &topology, n_broadcast_slots: 4, ebn0_db: 4.0, rate };
                estimate_outage(&cell, &TrialBudget::fixed(20_000), 2, 0).unwrap().outages
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{scheme}: {counts:?}");
    }
}

#[test]
fn pair_selection_never_loses_to_two_step_on_shared_fading() {
    let topology = TopologySource::Fixed(fixed_topology(6, 5, 3, Layout::UniformSquare, 2.0).unwrap());
    for ebn0_db in [-2.0, 2.0, 6.0] {
        let run = |scheme| {
            let cell = Cell { scheme, topology: &topology, n_broadcast_slots: 6, ebn0_db, rate: 1.0 };
            estimate_outage(&cell, &TrialBudget::fixed(20_000), 3, 0).unwrap().outages
        };
        assert!(run(Scheme::PairSelectRef11) <= run(Scheme::TwoStepRef12));
    }
}
