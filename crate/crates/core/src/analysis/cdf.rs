use super::bessel::x_bessel_k1;

/// CDF at `beta` of the strongest of `N` independent exponential direct links
/// with rates `lambda_sd`.
pub fn direct_slot_cdf(beta: f64, lambda_sd: &[f64]) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    lambda_sd
        .iter()
        .map(|&lambda| -(-lambda * beta).exp_m1())
        .product::<f64>()
        .clamp(0.0, 1.0)
}

/// CDF at `beta` of the AF end-to-end SNR `ab/(a+b+1)` with
/// `a ~ Exp(lambda_sr)` and `b ~ Exp(lambda_rd)`:
///
/// `1 − exp(−(λ_sr + λ_rd) β) · z K₁(z)`, `z = 2 √(λ_sr λ_rd β (β + 1))`.
pub fn af_slot_cdf(beta: f64, lambda_sr: f64, lambda_rd: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let z = 2.0 * (lambda_sr * lambda_rd * beta * (beta + 1.0)).sqrt();
    let survival = (-(lambda_sr + lambda_rd) * beta).exp() * x_bessel_k1(z);
    (1.0 - survival).clamp(0.0, 1.0)
}

/// Probability that at least `threshold` of the independent events with
/// probabilities `probs` occur (Poisson-binomial upper tail), `O(K²)`.
pub fn order_stat_cdf(probs: &[f64], threshold: usize) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if threshold > probs.len() {
        return 0.0;
    }
    // exact[j] = P(exactly j events among those processed so far)
    let mut exact = vec![0.0; probs.len() + 1];
    exact[0] = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            exact[j] = exact[j] * (1.0 - p) + exact[j - 1] * p;
        }
        exact[0] *= 1.0 - p;
    }
    exact[threshold..].iter().sum::<f64>().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{keyed_rng, Domain};
    use rand::Rng;

    /// Sum over every subset of size ≥ threshold of ∏ p · ∏ (1 − p).
    fn subset_enumeration(probs: &[f64], threshold: usize) -> f64 {
        let k = probs.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << k) {
            if (mask.count_ones() as usize) < threshold {
                continue;
            }
            let mut term = 1.0;
            for (i, &p) in probs.iter().enumerate() {
                term *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
            }
            total += term;
        }
        total
    }

    #[test]
    fn direct_examples() {
        assert_eq!(direct_slot_cdf(0.0, &[1.0, 2.0]), 0.0);
        assert!((direct_slot_cdf(2f64.ln(), &[1.0]) - 0.5).abs() < 1e-15);
        let v = direct_slot_cdf(0.7, &[1.3; 3]);
        assert!((v - (1.0 - (-1.3f64 * 0.7).exp()).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn af_at_origin_is_zero() {
        assert_eq!(af_slot_cdf(0.0, 1.0, 1.0), 0.0);
        assert!(af_slot_cdf(1e-12, 1.0, 1.0) < 1e-10);
    }

    #[test]
    fn af_monotone_and_bounded() {
        for &(a, b) in &[(1.0, 1.0), (0.1, 7.0), (30.0, 0.02)] {
            let mut prev = 0.0;
            for i in 0..4000 {
                let beta = i as f64 * 0.01;
                let v = af_slot_cdf(beta, a, b);
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev - 1e-15, "decrease at beta={beta}");
                prev = v;
            }
        }
    }

    #[test]
    fn af_dominates_min_of_links() {
        // ab/(a+b+1) ≤ min(a, b), so its CDF lies above that of min(a, b)
        for i in 1..200 {
            let beta = i as f64 * 0.05;
            let min_cdf = 1.0 - (-(0.4 + 2.0) * beta).exp();
            assert!(af_slot_cdf(beta, 0.4, 2.0) >= min_cdf - 1e-15);
        }
    }

    #[test]
    fn order_stat_examples() {
        assert_eq!(order_stat_cdf(&[1.0, 1.0, 1.0], 3), 1.0);
        assert!((order_stat_cdf(&[0.5, 0.5], 1) - 0.75).abs() < 1e-15);
        assert_eq!(order_stat_cdf(&[0.3, 0.2], 3), 0.0);
        assert_eq!(order_stat_cdf(&[0.3, 0.2], 0), 1.0);
        assert_eq!(order_stat_cdf(&[], 0), 1.0);
    }

    #[test]
    fn order_stat_matches_enumeration() {
        let mut rng = keyed_rng(9, Domain::Auxiliary, 0, 0);
        for _ in 0..1000 {
            let k = rng.random_range(1..=6);
            let probs: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            for t in 0..=k + 1 {
                let dp = order_stat_cdf(&probs, t);
                let brute = subset_enumeration(&probs, t);
                assert!((dp - brute).abs() < 1e-12, "k={k} t={t}: {dp} vs {brute}");
            }
        }
    }
}
