//! Diversity-multiplexing tradeoff curves for an `N`-user, `M`-relay network.

/// One point of a DMT frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    /// Multiplexing gain.
    pub r: f64,
    /// Diversity gain.
    pub d: f64,
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// `(M + N)(1 − (L + M)/L · r)⁺`
pub fn dmt_us_lcrp(n_users: usize, n_relays: usize, n_broadcast_slots: usize, r: f64) -> f64 {
    let slots = (n_broadcast_slots + n_relays) as f64;
    (n_users + n_relays) as f64 * positive_part(1.0 - slots * r / n_broadcast_slots as f64)
}

/// `(M + N)(1 − 2r)⁺`, shared by both two-slot benchmark schemes.
pub fn dmt_baseline(n_users: usize, n_relays: usize, r: f64) -> f64 {
    (n_users + n_relays) as f64 * positive_part(1.0 - 2.0 * r)
}

/// `(M + N)(1 − r)⁺`, the `(M+N)`-input single-output ideal.
pub fn dmt_miso(n_users: usize, n_relays: usize, r: f64) -> f64 {
    (n_users + n_relays) as f64 * positive_part(1.0 - r)
}

impl DmtPoint {
    pub fn us_lcrp(n_users: usize, n_relays: usize, n_broadcast_slots: usize, r: f64) -> Self {
        DmtPoint { r, d: dmt_us_lcrp(n_users, n_relays, n_broadcast_slots, r) }
    }

    pub fn baseline(n_users: usize, n_relays: usize, r: f64) -> Self {
        DmtPoint { r, d: dmt_baseline(n_users, n_relays, r) }
    }

    pub fn miso(n_users: usize, n_relays: usize, r: f64) -> Self {
        DmtPoint { r, d: dmt_miso(n_users, n_relays, r) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn reported_values() {
        assert!((dmt_us_lcrp(5, 3, 5, 0.4) - 2.88).abs() < TOL);
        assert!((dmt_us_lcrp(5, 3, 10, 0.4) - 3.84).abs() < TOL);
        assert!((dmt_us_lcrp(5, 3, 20, 0.4) - 4.32).abs() < TOL);
        assert!((dmt_baseline(5, 3, 0.4) - 1.6).abs() < TOL);
        assert!((dmt_baseline(5, 3, 0.3) - 3.2).abs() < TOL);
        assert!((dmt_us_lcrp(5, 3, 6, 0.3) - 4.4).abs() < TOL);
        assert!((dmt_us_lcrp(5, 3, 6, 0.4) - 3.2).abs() < TOL);
        assert!((dmt_us_lcrp(5, 3, 6, 0.5) - 2.0).abs() < TOL);
        assert_eq!(dmt_baseline(5, 3, 0.5), 0.0);
    }

    #[test]
    fn clamps() {
        assert_eq!(dmt_us_lcrp(5, 3, 6, 6.0 / 9.0 + 1e-9), 0.0);
        assert_eq!(dmt_us_lcrp(5, 3, 6, 0.9), 0.0);
        assert_eq!(dmt_baseline(5, 3, 0.7), 0.0);
        assert_eq!(dmt_miso(5, 3, 1.0), 0.0);
        assert_eq!(dmt_miso(5, 3, 0.0), 8.0);
        assert_eq!(dmt_miso(5, 3, 0.5), 4.0);
    }

    #[test]
    fn large_l_approaches_miso() {
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            assert!((dmt_us_lcrp(5, 3, 1_000_000, r) - dmt_miso(5, 3, r)).abs() < 1e-4);
        }
    }

    #[test]
    fn dominates_baseline_when_l_exceeds_m() {
        for l in 4..30 {
            let knee = l as f64 / (l + 3) as f64;
            for i in 0..100 {
                let r = knee * i as f64 / 100.0;
                assert!(dmt_us_lcrp(5, 3, l, r) >= dmt_baseline(5, 3, r) - TOL);
            }
        }
        assert_eq!(dmt_us_lcrp(5, 3, 6, 0.0), dmt_baseline(5, 3, 0.0));
    }
}
