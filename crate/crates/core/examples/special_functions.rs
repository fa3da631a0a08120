// The per-slot outage CDFs and the order-statistic combination, checked
// against a quick simulation.
//
// ```text
// cargo run --release --example special_functions
// ```

use rand::Rng;
use uslcrp::analysis::{af_slot_cdf, bessel_k1, direct_slot_cdf, order_stat_cdf};
use uslcrp::protocol::af_equivalent_snr;
use uslcrp::stream::{keyed_rng, Domain};

/// `(analytic, empirical)` AF-slot CDF at a few thresholds.
pub fn run_example() -> uslcrp::Result<Vec<(f64, f64)>> {
    for x in [0.1, 1.0, 5.0] {
        println!("K1({x}) = {:.15}", bessel_k1(x)?);
    }

    let (lambda_sr, lambda_rd) = (0.5, 2.0);
    let mut rng = keyed_rng(5, Domain::Auxiliary, 0, 0);
    let exp = |rng: &mut rand_chacha::ChaCha8Rng, rate: f64| -(1.0 - rng.random::<f64>()).ln() / rate;
    let samples: Vec<f64> = (0..1_000_000)
        .map(|_| af_equivalent_snr(exp(&mut rng, lambda_sr), exp(&mut rng, lambda_rd)))
        .collect();
    let mut pairs = Vec::new();
    for beta in [0.1, 0.3, 1.0] {
        let analytic = af_slot_cdf(beta, lambda_sr, lambda_rd);
        let empirical = samples.iter().filter(|&&s| s <= beta).count() as f64 / samples.len() as f64;
        println!("AF CDF at {beta}: analytic {analytic:.5}, empirical {empirical:.5}");
        pairs.push((analytic, empirical));
    }

    // five users heard directly: the best of them is below 1 with this probability
    let direct = direct_slot_cdf(1.0, &[1.0, 0.8, 1.2, 2.0, 0.5]);
    println!("direct slot CDF at 1: {direct:.6}");
    // at least 3 of 4 independent slots in outage
    let probs = [0.1, 0.2, 0.3, 0.4];
    println!("P(at least 3 of 4 fail) = {:.6}", order_stat_cdf(&probs, 3));
    Ok(pairs)
}

fn main() -> uslcrp::Result<()> {
    run_example().map(|_| ())
}
