// Drawing network geometries and freezing one into a TOML file.
//
// ```text
// cargo run --example topology
// ```

use uslcrp::fading::{sample_topology, Layout, NetworkModel};
use uslcrp::stream::{keyed_rng, Domain};

pub fn run_example() -> uslcrp::Result<NetworkModel> {
    let mut rng = keyed_rng(11, Domain::Topology, 0, 0);
    for layout in [Layout::UniformSquare, Layout::Clustered] {
        let model = sample_topology(&mut rng, 3, 2, layout, 3.5)?;
        let geometry = model.geometry().expect("sampled models keep their geometry");
        println!("{}:", layout.name());
        for (i, p) in geometry.users.iter().enumerate() {
            println!("  user {i} at ({:.3}, {:.3}), S-D variance {:.3}", p.x, p.y, model.var_sd()[i]);
        }
        for (i, p) in geometry.relays.iter().enumerate() {
            println!("  relay {i} at ({:.3}, {:.3}), R-D variance {:.3}", p.x, p.y, model.var_rd()[i]);
        }
    }

    let model = sample_topology(&mut rng, 2, 2, Layout::UniformSquare, 2.0)?;
    let text = model.to_toml()?;
    println!("\n{text}");
    let restored = NetworkModel::from_toml(&text)?;
    assert_eq!(restored, model);
    Ok(restored)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
