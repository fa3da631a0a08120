// A preset experiment, trimmed down and written as CSV, the same way the
// `outage` subcommand does it.
//
// ```text
// cargo run --release --example outage_sweep
// ```

use uslcrp::cli::outage_csv;
use uslcrp::config::ExperimentConfig;

pub fn run_example() -> uslcrp::Result<String> {
    let mut config = ExperimentConfig::preset("fig4")?;
    config.experiment.trials = 1_000;
    config.experiment.max_trials = 10_000;
    config.sweep.ebn0_db = vec![0.0, 2.0, 4.0];
    config.validate()?;
    println!("# configuration\n{}", config.to_toml()?);
    let csv = outage_csv(&config)?;
    print!("{csv}");
    Ok(csv)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
