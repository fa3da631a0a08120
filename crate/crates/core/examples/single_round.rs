// One transmission round of every scheme on the same fading realisation.
//
// ```text
// cargo run --example single_round
// ```

use uslcrp::fading::{ChannelStream, Layout};
use uslcrp::montecarlo::{fixed_topology, power_for};
use uslcrp::protocol::{run_round, system_outage, ProtocolConfig, Scheme};

pub fn run_example() -> uslcrp::Result<Vec<String>> {
    let (n_users, n_relays, n_broadcast_slots) = (5, 3, 6);
    let model = fixed_topology(1, n_users, n_relays, Layout::UniformSquare, 2.0)?;
    let mut dumps = Vec::new();
    for scheme in Scheme::ALL {
        let power = power_for(scheme, n_broadcast_slots, n_relays, 3.0)?;
        let config = ProtocolConfig::new(n_broadcast_slots, power, scheme)?;
        // every scheme reads trial 0 of seed 42, so they see the same channels
        let mut stream = ChannelStream::for_trial(42, 0);
        let trace = run_round(&mut stream, &model, &config)?;
        let dump = trace.to_debug_string();
        println!("{dump}outage at R = 1: {}\n", system_outage(&trace, 1.0));
        dumps.push(dump);
    }
    Ok(dumps)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
