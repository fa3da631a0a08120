//! Modified Bessel function of the second kind, order one.
//!
//! Power series up to `x = 2`, Steed's continued fraction (CF2) above.

use std::f64::consts::PI;

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const MAX_ITER: usize = 10_000;

/// `K₁(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x <= SERIES_LIMIT {
        Ok(k1_series(x))
    } else {
        Ok(k1_scaled_cf2(x) * (-x).exp())
    }
}

/// `eˣ K₁(x)` for `x > 0`; stays finite where `K₁` underflows.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x <= SERIES_LIMIT {
        Ok(k1_series(x) * x.exp())
    } else {
        Ok(k1_scaled_cf2(x))
    }
}

/// `x K₁(x)` extended continuously to `x = 0` (value 1) and `+∞` (value 0).
pub fn x_bessel_k1(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x == f64::INFINITY {
        0.0
    } else if x <= SERIES_LIMIT {
        x * k1_series(x)
    } else {
        (x.ln() + k1_scaled_cf2(x).ln() - x).exp()
    }
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("K1 requires a positive finite argument, got {x}")))
    }
}

/// `K₁(x) = 1/x + ln(x/2) I₁(x) − (x/4) Σ (ψ(k+1) + ψ(k+2)) (x²/4)ᵏ / (k!(k+1)!)`
fn k1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    // term = (x²/4)^k / (k! (k+1)!)
    let mut term = 1.0;
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    // ψ(k+1) and ψ(k+2)
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = 1.0 - EULER_GAMMA;
    for k in 0..MAX_ITER {
        i1_sum += term;
        let contrib = (psi_a + psi_b) * term;
        psi_sum += contrib;
        if term < f64::EPSILON * 1e-2 * i1_sum && contrib.abs() < f64::EPSILON * 1e-2 * psi_sum.abs() {
            break;
        }
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 2.0));
        psi_a += 1.0 / (kf + 1.0);
        psi_b += 1.0 / (kf + 2.0);
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
}

/// `eˣ K₁(x)` by Steed's method for `K₀`/`K₁`, valid for `x ≳ 2`.
fn k1_scaled_cf2(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    h *= a1;
    let k0_scaled = (PI / (2.0 * x)).sqrt() / s;
    k0_scaled * (x + 0.5 - h) / x
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `eˣ K₁(x) = ∫₀^∞ exp(−x (cosh t − 1)) cosh t dt` by the trapezoid rule,
    /// which converges geometrically for this analytic, rapidly decaying integrand.
    fn k1_scaled_quadrature(x: f64) -> f64 {
        let step: f64 = 0.01;
        let mut sum = 0.5;
        let mut t = step;
        loop {
            let v = (-x * (t.cosh() - 1.0)).exp() * t.cosh();
            sum += v;
            if v < 1e-18 * sum {
                break;
            }
            t += step;
        }
        sum * step
    }

    // 30-digit reference values, rounded to f64
    const REFERENCE: [(f64, f64); 15] = [
        (1e-6, 999_999.999_992_784_3),
        (1e-3, 999.996_238_156_085_6),
        (0.1, 9.853_844_780_870_606),
        (0.5, 1.656_441_120_003_301),
        (1.0, 0.601_907_230_197_234_6),
        (1.9, 0.159_660_153_032_667_63),
        (2.0, 0.139_865_881_816_522_43),
        (2.1, 0.122_746_411_533_507_9),
        (3.0, 0.040_156_431_128_194_184),
        (5.0, 0.004_044_613_445_452_164),
        (10.0, 1.864_877_345_382_558_5e-5),
        (30.0, 2.167_732_001_891_549_4e-14),
        (100.0, 4.679_853_735_636_909e-45),
        (300.0, 3.729_895_858_332_372_6e-132),
        (700.0, 4.673_110_796_707_966e-306),
    ];

    #[test]
    fn matches_reference_table() {
        for (x, want) in REFERENCE {
            let got = bessel_k1(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "K1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn value_at_one() {
        let got = bessel_k1(1.0).unwrap();
        assert!((got - 0.601_907_230_197_234_6).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_across_range() {
        let mut x: f64 = 1e-6;
        while x <= 700.0 {
            let want = k1_scaled_quadrature(x);
            let got = bessel_k1_scaled(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "x = {x}: {got} vs {want}");
            x *= 1.37;
        }
    }

    #[test]
    fn continuity_at_method_switch() {
        let below = bessel_k1(SERIES_LIMIT).unwrap();
        let above = bessel_k1(SERIES_LIMIT * (1.0 + 1e-12)).unwrap();
        assert!(((below - above) / below).abs() < 1e-10);
    }

    #[test]
    fn small_argument_limit() {
        assert!((1e-8 * bessel_k1(1e-8).unwrap() - 1.0).abs() < 1e-7);
        assert_eq!(x_bessel_k1(0.0), 1.0);
        assert_eq!(x_bessel_k1(f64::INFINITY), 0.0);
        assert!((x_bessel_k1(1e-12) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strictly_decreasing() {
        let mut prev = bessel_k1(0.1).unwrap();
        let mut x = 0.1;
        while x < 50.0 {
            x += 0.05;
            let next = bessel_k1(x).unwrap();
            assert!(next < prev, "not decreasing at {x}");
            prev = next;
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k1(f64::NAN).is_err());
        assert!(bessel_k1_scaled(0.0).is_err());
    }
}
