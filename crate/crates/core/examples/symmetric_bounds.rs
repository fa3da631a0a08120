// Closed-form outage bounds for US-LCRP next to a Monte Carlo estimate.
//
// ```text
// cargo run --release --example symmetric_bounds
// ```

use uslcrp::analysis::{symmetric_bound_outage, Bound, RateParams};
use uslcrp::fading::Layout;
use uslcrp::montecarlo::{estimate_outage, fixed_topology, power_for, Cell, TopologySource, TrialBudget};
use uslcrp::protocol::Scheme;

/// `(Eb/N0, lower, estimate, upper)` per point.
pub fn run_example() -> uslcrp::Result<Vec<(f64, f64, f64, f64)>> {
    let (n_users, n_relays, l) = (5, 3, 6);
    let model = fixed_topology(1, n_users, n_relays, Layout::UniformSquare, 2.0)?;
    let topology = TopologySource::Fixed(model.clone());
    let mut rows = Vec::new();
    println!("{:>6} {:>11} {:>11} {:>11}", "Eb/N0", "lower", "simulated", "upper");
    for ebn0_db in [-2.0, 0.0, 2.0] {
        let power = power_for(Scheme::UsLcrp, l, n_relays, ebn0_db)?;
        let rates = RateParams::from_model(&model, &power);
        let upper = symmetric_bound_outage(&rates, l, 1.0, Bound::Upper);
        let lower = symmetric_bound_outage(&rates, l, 1.0, Bound::Lower);
        let cell = Cell { scheme: Scheme::UsLcrp, topology: &topology, n_broadcast_slots: l, ebn0_db, rate: 1.0 };
        let e = estimate_outage(&cell, &TrialBudget::fixed(20_000), 3, 0)?;
        println!("{ebn0_db:>6.1} {lower:>11.4e} {:>11.4e} {upper:>11.4e}", e.p_hat);
        rows.push((ebn0_db, lower, e.p_hat, upper));
    }
    Ok(rows)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
