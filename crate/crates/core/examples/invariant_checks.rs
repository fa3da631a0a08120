// Running the protocol invariant checks, then watching them catch a broken
// combiner.
//
// ```text
// cargo run --release --example invariant_checks
// ```

use uslcrp::validate::{run_validation, ValidationReport, ValidationSettings};

pub fn run_example() -> uslcrp::Result<(ValidationReport, ValidationReport)> {
    let settings = ValidationSettings { traces: 5_000, ..ValidationSettings::default() };
    let clean = run_validation(&settings)?;
    print!("{}", clean.render());

    let broken = run_validation(&ValidationSettings { inject_fault: true, ..settings })?;
    print!("\nwith min-combining:\n{}", broken.render());
    Ok((clean, broken))
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
