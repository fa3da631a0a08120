// Outage probability of the three schemes on one network, cell by cell.
//
// ```text
// cargo run --release --example scheme_comparison
// ```

use uslcrp::fading::Layout;
use uslcrp::montecarlo::{estimate_outage, fixed_topology, Cell, OutageEstimate, TopologySource, TrialBudget};
use uslcrp::protocol::Scheme;

pub fn run_example() -> uslcrp::Result<Vec<(Scheme, f64, OutageEstimate)>> {
    let topology = TopologySource::Fixed(fixed_topology(1, 5, 3, Layout::UniformSquare, 2.0)?);
    let budget = TrialBudget::adaptive(2_000, 20_000);
    let mut results = Vec::new();
    println!("{:<18} {:>6} {:>10} {:>22}", "scheme", "Eb/N0", "p_hat", "95% interval");
    for scheme in Scheme::ALL {
        for ebn0_db in [0.0, 2.0, 4.0] {
            let cell = Cell { scheme, topology: &topology, n_broadcast_slots: 6, ebn0_db, rate: 1.0 };
            let e = estimate_outage(&cell, &budget, 7, 0)?;
            println!(
                "{:<18} {:>6.1} {:>10.3e} [{:.3e}, {:.3e}]",
                scheme.name(),
                ebn0_db,
                e.p_hat,
                e.ci_low,
                e.ci_high
            );
            results.push((scheme, ebn0_db, e));
        }
    }
    Ok(results)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
