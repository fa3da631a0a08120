// Diversity-multiplexing tradeoff curves of US-LCRP, the two-slot baseline
// and the ideal MISO channel.
//
// ```text
// cargo run --example dmt_frontier
// ```

use uslcrp::analysis::{dmt_baseline, dmt_miso, dmt_us_lcrp};

pub fn run_example() -> Vec<[f64; 6]> {
    let (n, m) = (5, 3);
    let mut table = Vec::new();
    println!("{:>5} {:>8} {:>8} {:>8} {:>8} {:>8}", "r", "L=5", "L=10", "L=20", "base", "MISO");
    for i in 0..=10 {
        let r = f64::from(i) / 10.0;
        let row = [
            r,
            dmt_us_lcrp(n, m, 5, r),
            dmt_us_lcrp(n, m, 10, r),
            dmt_us_lcrp(n, m, 20, r),
            dmt_baseline(n, m, r),
            dmt_miso(n, m, r),
        ];
        println!(
            "{:>5.2} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            row[0], row[1], row[2], row[3], row[4], row[5]
        );
        table.push(row);
    }
    for l in [5, 10, 20] {
        println!("L = {l}: zero diversity from r = {:.3}", l as f64 / (l + m) as f64);
    }
    table
}

fn main() {
    run_example();
}
